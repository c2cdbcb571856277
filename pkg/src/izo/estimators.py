"""Scalar derivative estimators and the single-point complex-step gradient sampler.

The scalar trio (forward difference, central difference, complex step)
exists to expose the cancellation behaviour of each rule; the two
difference quotients are computed exactly as written so their double
precision failure modes are reproduced faithfully.  The gradient sampler
turns one imaginary-part query at ``x + i*delta*u`` into the estimate
``(n/delta) * Im f(x + i*delta*u) * u`` whose mean over uniform sphere
directions is the gradient of the imaginary delta-smoothed function.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .oracle import NoisyOracle
from .rng import RandomSource, complex_shift, sample_unit_ball, sample_unit_sphere

__all__ = [
    "GradientSample",
    "SmoothingShape",
    "fd_derivative",
    "cd_derivative",
    "cs_derivative",
    "cs_gradient_sample",
    "cs_gradient_ellipsoid",
    "real_multipoint_gradient",
    "smoothed_value_estimate",
]


@dataclass
class GradientSample:
    """One gradient estimate together with its direction and query cost."""

    g: np.ndarray
    u: np.ndarray
    delta: float
    queries_used: int


@dataclass
class SmoothingShape:
    """Smoothing solid for the gradient sampler: the ball or an ellipsoid.

    For the ellipsoid, ``qhalf`` is the symmetric positive definite square
    root Q^(1/2) of the shape matrix; the sphere needs no data.
    """

    kind: str = "sphere"
    qhalf: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("sphere", "ellipsoid"):
            raise ValueError(f"unknown smoothing shape {self.kind!r}")
        if self.kind == "ellipsoid":
            if self.qhalf is None:
                raise ValueError("ellipsoid shape requires the qhalf matrix")
            q = np.asarray(self.qhalf, dtype=np.float64)
            if q.ndim != 2 or q.shape[0] != q.shape[1]:
                raise ValueError(f"qhalf must be square, got shape {q.shape}")
            if not np.allclose(q, q.T, atol=1e-12 * max(1.0, float(np.abs(q).max()))):
                raise ValueError("qhalf must be symmetric")
            eigs = np.linalg.eigvalsh(q)
            if eigs[0] <= 1e-12 * max(1.0, eigs[-1]):
                raise ValueError(f"qhalf must be positive definite (min eig {eigs[0]:g})")
            self.qhalf = q
            self._eig_range = (float(eigs[0]), float(eigs[-1]))

    def max_stretch(self) -> float:
        if self.kind == "sphere":
            return 1.0
        return self._eig_range[1]


def _scalar_point(x: float, shift: complex = 0.0) -> np.ndarray:
    return np.array([x + shift], dtype=np.complex128)


def fd_derivative(oracle: NoisyOracle, x: float, delta: float) -> float:
    """Forward quotient (f(x+delta) - f(x)) / delta; two real queries.

    Evaluated exactly as written, so for delta below the rounding floor the
    two evaluations coincide and the estimate collapses to zero.
    """
    if delta <= 0.0:
        raise ValueError(f"step must be positive, got {delta}")
    f_plus = oracle.query_re(_scalar_point(x + delta))
    f_zero = oracle.query_re(_scalar_point(x))
    return (f_plus - f_zero) / delta


def cd_derivative(oracle: NoisyOracle, x: float, delta: float) -> float:
    """Central quotient (f(x+delta) - f(x-delta)) / (2 delta); two real queries."""
    if delta <= 0.0:
        raise ValueError(f"step must be positive, got {delta}")
    f_plus = oracle.query_re(_scalar_point(x + delta))
    f_minus = oracle.query_re(_scalar_point(x - delta))
    return (f_plus - f_minus) / (2.0 * delta)


def cs_derivative(oracle: NoisyOracle, x: float, delta: float) -> float:
    """Complex-step derivative Im f(x + i delta) / delta; one query.

    No subtraction occurs, so delta can be driven to the smallest positive
    doubles without losing a digit.
    """
    if delta <= 0.0:
        raise ValueError(f"step must be positive, got {delta}")
    return oracle.query_im(_scalar_point(x, 1j * delta)) / delta


def cs_gradient_sample(
    oracle: NoisyOracle, x: np.ndarray, delta: float, rng: RandomSource
) -> GradientSample:
    """Single-point spherical estimate (n/delta) * Im f(x + i delta u) * u."""
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    u = sample_unit_sphere(n, rng)
    value = oracle.query_im(complex_shift(x, u, delta))
    g = (n / delta) * value * u
    return GradientSample(g=g, u=u, delta=delta, queries_used=1)


def cs_gradient_ellipsoid(
    oracle: NoisyOracle,
    x: np.ndarray,
    delta: float,
    shape: SmoothingShape,
    rng: RandomSource,
) -> GradientSample:
    """Ellipsoidal variant: query at x + i delta Q^(1/2) u, read off Q^(-1/2) u.

    With the identity shape this coincides with :func:`cs_gradient_sample`
    for the same direction draw.
    """
    if shape.kind != "ellipsoid":
        raise ValueError("cs_gradient_ellipsoid requires an ellipsoid shape")
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    u = sample_unit_sphere(n, rng)
    stretched = shape.qhalf @ u
    norm = float(np.linalg.norm(stretched))
    z = np.empty(n, dtype=np.complex128)
    z.real = x
    z.imag = delta * stretched
    value = oracle.query_im(z)
    g = (n / delta) * value * np.linalg.solve(shape.qhalf, u)
    return GradientSample(g=g, u=u, delta=delta * norm, queries_used=1)


def real_multipoint_gradient(
    oracle: NoisyOracle,
    x: np.ndarray,
    delta: float,
    rng: RandomSource,
    variant: str = "forward",
) -> GradientSample:
    """Classic two-query real estimator along a random sphere direction.

    forward: (n/delta) (f(x + delta u) - f(x)) u
    central: (n/(2 delta)) (f(x + delta u) - f(x - delta u)) u

    Both real queries draw independent noise.  This is the baseline whose
    shrinking steps cancel catastrophically; it is kept bit-faithful.
    """
    if variant not in ("forward", "central"):
        raise ValueError(f"unknown variant {variant!r}")
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    u = sample_unit_sphere(n, rng)
    plus = (x + delta * u).astype(np.complex128)
    if variant == "forward":
        diff = oracle.query_re(plus) - oracle.query_re(x.astype(np.complex128))
        g = (n / delta) * diff * u
    else:
        minus = (x - delta * u).astype(np.complex128)
        diff = oracle.query_re(plus) - oracle.query_re(minus)
        g = (n / (2.0 * delta)) * diff * u
    return GradientSample(g=g, u=u, delta=delta, queries_used=2)


def smoothed_value_estimate(
    oracle: NoisyOracle, x: np.ndarray, delta: float, m: int, rng: RandomSource
) -> float:
    """Monte-Carlo estimate of the imaginary delta-smoothed value at x.

    Averages m real-part queries at x + i delta v with v uniform on the
    unit ball.
    """
    if m < 1:
        raise ValueError(f"sample count must be >= 1, got {m}")
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    total = 0.0
    for _ in range(m):
        v = sample_unit_ball(n, rng)
        total += oracle.query_re(complex_shift(x, v, delta))
    return total / m
