"""Zeroth-order optimization via complex-step gradient estimates.

The single-point estimator queries a holomorphic lift of the objective at
x + i*delta*u and reads the gradient signal out of the imaginary part, so
the smoothing parameter can shrink to the bottom of double precision
without subtractive cancellation.  The package bundles the estimator, the
projected-descent schedules for each convergence regime, a
strong-convexity estimation pipeline built on diagonally dominant
programming, and a benchmark CLI (``izo``).
"""

from .algorithms import (
    FeasibleSet,
    NonFiniteIterateError,
    Trace,
    run_izo,
    run_izo_baseline,
    run_izo_custom,
    run_online_izo,
    suffix_average,
    tail_average,
    uniform_average,
)
from .estimators import (
    GradientSample,
    SmoothingShape,
    cd_derivative,
    cs_derivative,
    cs_gradient_ellipsoid,
    cs_gradient_sample,
    fd_derivative,
    real_multipoint_gradient,
    smoothed_value_estimate,
)
from .oracle import (
    AnalyticFunction,
    DomainError,
    NoiseModel,
    NoisyOracle,
    make_builtin,
)
from .rng import RandomSource, complex_shift, derive_seed, sample_unit_ball, sample_unit_sphere
from .schedules import Schedule, ScheduleError, make_schedule
from .tau import (
    DataPoint,
    DdpBasis,
    QuadraticModel,
    TauEstimate,
    collect_data,
    estimate_tau,
    optimize_with_tau_estimation,
)

__version__ = "0.1.0"
