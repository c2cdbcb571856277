"""Strong-convexity estimation from logged complex-lifted evaluations.

The estimator fits the tightest quadratic model lying below the observed
real parts, with positive definiteness of the curvature enforced through
a diagonally dominant cone: the fitted matrix is written as
``P = tau0*I + U^T Q U`` with Q diagonally dominant, which is an
LP-representable inner approximation of ``P - tau0*I >= 0``.  Re-solving
after the Cholesky basis change ``U <- chol(P)`` (basis pursuit) walks the
cone toward the semidefinite optimum; the model's smallest eigenvalue is
the strong-convexity estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import cholesky_upper, min_eigenvalue, smat, svec, svec_length, sym_outer
from .oracle import NoisyOracle
from .rng import RandomSource, complex_shift, sample_unit_ball, sample_unit_sphere
from .simplex import LpProblem, LpSolution, solve_lp

__all__ = [
    "TauEstimationError",
    "DataPoint",
    "QuadraticModel",
    "DdpBasis",
    "TauEstimate",
    "min_data_points",
    "dd_margin",
    "collect_data",
    "build_ddp_lp",
    "estimate_tau",
    "optimize_with_tau_estimation",
]

# Basis pursuit stops early once Q is this close to the identity off-diagonal.
PURSUIT_OFFDIAG_TOL = 1e-6


class TauEstimationError(RuntimeError):
    """The model LP failed; carries the solver status."""

    def __init__(self, status: str, message: str):
        self.status = status
        super().__init__(message)


@dataclass
class DataPoint:
    """One logged oracle observation (x, u, delta, noisy Re f(x + i delta u))."""

    x: np.ndarray
    u: np.ndarray
    delta: float
    value: float


@dataclass
class QuadraticModel:
    """Lower quadratic model (1/2)<Px, x> + <q, x> + r."""

    p_matrix: np.ndarray
    q: np.ndarray
    r: float

    def predict(self, x: np.ndarray, u: np.ndarray | None = None, delta: float = 0.0) -> float:
        """Model value of Re at x + i delta u (the lifted query point).

        The imaginary offset contributes ``- delta^2 <Pu, u> / 2`` exactly,
        because the model is quadratic.
        """
        val = 0.5 * float(x @ self.p_matrix @ x) + float(self.q @ x) + self.r
        if u is not None and delta != 0.0:
            val -= 0.5 * delta * delta * float(u @ self.p_matrix @ u)
        return val


@dataclass
class DdpBasis:
    """Basis matrix for the diagonally dominant cone; identity to start."""

    u_matrix: np.ndarray

    @classmethod
    def identity(cls, n: int) -> "DdpBasis":
        return cls(u_matrix=np.eye(n))

    def __post_init__(self) -> None:
        U = np.asarray(self.u_matrix, dtype=np.float64)
        n = U.shape[0]
        if U.shape != (n, n):
            raise ValueError(f"basis must be square, got {U.shape}")
        # Guards invertibility; pursuit feeds Cholesky factors of definite
        # matrices here, whose diagonal is safely positive.
        diag = np.abs(np.diag(U))
        scale = max(1.0, float(np.abs(U).max()))
        if diag.min() <= 1e-12 * scale:
            raise ValueError("basis matrix is numerically singular")
        self.u_matrix = U


@dataclass
class TauEstimate:
    """Result of the pursuit: the estimate, the model, and diagnostics."""

    tau_hat: float
    model: QuadraticModel
    objectives: list[float] = field(default_factory=list)
    tau_per_iteration: list[float] = field(default_factory=list)
    basis: DdpBasis | None = None
    certificate_q: np.ndarray | None = None


def min_data_points(n: int) -> int:
    """Points needed to pin down a quadratic model in R^n: (n+1)(n+2)/2."""
    return (n + 1) * (n + 2) // 2


def dd_margin(Q: np.ndarray) -> float:
    """Worst diagonal-dominance margin min_i (Q_ii - sum_{j != i} |Q_ij|).

    Nonnegative (up to solver tolerance) for every certificate the pursuit
    produces; combined with P = tau0*I + U^T Q U it witnesses P >= tau0*I.
    """
    Q = np.asarray(Q, dtype=np.float64)
    diag = np.diag(Q)
    off = np.abs(Q).sum(axis=1) - np.abs(diag)
    return float((diag - off).min())


def collect_data(
    oracle: NoisyOracle,
    count: int,
    *,
    trace=None,
    center: np.ndarray | None = None,
    radius: float = 1.0,
    delta: float = 1e-8,
    rng: RandomSource | None = None,
) -> list[DataPoint]:
    """Gather data points, reusing a run's logged queries when available.

    With ``trace`` given, the first ``count`` logged points are returned
    and no oracle query is spent.  Otherwise fresh points are sampled
    uniformly from the ball of the given radius around ``center`` (one
    real-part query each).
    """
    n = oracle.function.dim
    if count < min_data_points(n):
        raise ValueError(
            f"need at least (n+1)(n+2)/2 = {min_data_points(n)} points for n={n}, got {count}"
        )
    if trace is not None:
        if len(trace.data_points) < count:
            raise ValueError(
                f"trace holds {len(trace.data_points)} logged points, need {count}"
            )
        return list(trace.data_points[:count])
    if center is None or rng is None:
        raise ValueError("fresh sampling needs a center point and a random source")
    center = np.asarray(center, dtype=np.float64)
    points = []
    for _ in range(count):
        x = center + radius * sample_unit_ball(n, rng)
        u = sample_unit_sphere(n, rng)
        value = oracle.query_re(complex_shift(x, u, delta))
        points.append(DataPoint(x=x, u=u, delta=delta, value=value))
    return points


@dataclass
class _LpLayout:
    n: int
    n_svec: int
    n_offdiag: int
    t_matrix: np.ndarray  # svec(U^T Q U) = t_matrix @ svec(Q)
    constant: float  # sum_k (value_k - tau0 * base prediction), added back to the LP objective


def _basis_transfer_matrix(U: np.ndarray) -> np.ndarray:
    """Matrix T with svec(U^T Q U) = T @ svec(Q)."""
    n = U.shape[0]
    m = svec_length(n)
    T = np.empty((m, m))
    iu, ju = np.triu_indices(n)
    sqrt2 = math.sqrt(2.0)
    for col in range(m):
        i, j = int(iu[col]), int(ju[col])
        if i == j:
            M = np.outer(U[i], U[i])
        else:
            M = (np.outer(U[i], U[j]) + np.outer(U[j], U[i])) / sqrt2
        T[:, col] = svec(0.5 * (M + M.T))
    return T


def build_ddp_lp(
    data: list[DataPoint], tau0: float, basis: DdpBasis
) -> tuple[LpProblem, _LpLayout]:
    """Assemble the diagonally-dominant model-fitting LP in the given basis.

    Variables are (svec(Q), q, r, s) where ``P = tau0*I + U^T Q U``, the
    s_ij >= |Q_ij| slacks linearize the dominance constraints
    ``Q_ii >= sum_j |Q_ij|``, and every observation imposes the lower-bound
    constraint value_k >= model prediction at its lifted query point.  The
    objective is the total slack of the model below the data (a constant
    minus the sum of predictions).
    """
    if not data:
        raise ValueError("model fitting needs at least one data point")
    if tau0 <= 0.0:
        raise ValueError(f"tau lower bound must be positive, got {tau0}")
    n = data[0].x.size
    U = basis.u_matrix
    if U.shape != (n, n):
        raise ValueError(f"basis is {U.shape}, data dimension is {n}")
    n_svec = svec_length(n)
    n_offdiag = n * (n - 1) // 2
    n_vars = n_svec + n + 1 + n_offdiag

    T = _basis_transfer_matrix(U)
    svec_eye = svec(np.eye(n))

    iu, ju = np.triu_indices(n)
    diag_pos = np.flatnonzero(iu == ju)  # svec index of Q_ii
    off_pos = np.flatnonzero(iu != ju)  # svec index of Q_ij, i<j
    sqrt2 = math.sqrt(2.0)

    rows = []
    rhs = []

    # Lower-bound constraints: prediction_k <= value_k.
    for pt in data:
        w = 0.5 * (sym_outer(pt.x, pt.x) - pt.delta**2 * sym_outer(pt.u, pt.u))
        row = np.zeros(n_vars)
        row[:n_svec] = T.T @ w
        row[n_svec : n_svec + n] = pt.x
        row[n_svec + n] = 1.0
        rows.append(row)
        rhs.append(pt.value - tau0 * float(svec_eye @ w))

    # Absolute-value linearization: Q_ij <= s_ij and -Q_ij <= s_ij.
    for a, pos in enumerate(off_pos):
        for sign in (1.0, -1.0):
            row = np.zeros(n_vars)
            row[pos] = sign / sqrt2  # svec carries sqrt(2) * Q_ij
            row[n_svec + n + 1 + a] = -1.0
            rows.append(row)
            rhs.append(0.0)

    # Dominance rows: sum_{j != i} s_ij <= Q_ii.
    off_pairs = list(zip(iu[off_pos], ju[off_pos]))
    for i in range(n):
        row = np.zeros(n_vars)
        row[diag_pos[i]] = -1.0
        for a, (pi, pj) in enumerate(off_pairs):
            if pi == i or pj == i:
                row[n_svec + n + 1 + a] = 1.0
        rows.append(row)
        rhs.append(0.0)

    # Objective: minimize sum_k (value_k - prediction_k) = const - sum_k prediction_k.
    c = np.zeros(n_vars)
    constant = 0.0
    for pt, row, b in zip(data, rows[: len(data)], rhs[: len(data)]):
        c[: n_svec + n + 1] -= row[: n_svec + n + 1]
        constant += b

    nonneg = np.zeros(n_vars, dtype=bool)
    nonneg[n_svec + n + 1 :] = True  # only the slacks are sign-constrained

    problem = LpProblem(c=c, a_ub=np.array(rows), b_ub=np.array(rhs), nonneg=nonneg)
    layout = _LpLayout(
        n=n, n_svec=n_svec, n_offdiag=n_offdiag, t_matrix=T, constant=constant
    )
    return problem, layout


def _solve_model(
    data: list[DataPoint], tau0: float, basis: DdpBasis
) -> tuple[QuadraticModel, np.ndarray, float, LpSolution]:
    problem, layout = build_ddp_lp(data, tau0, basis)
    sol = solve_lp(problem)
    if sol.status != "optimal":
        raise TauEstimationError(
            sol.status, f"model LP ended with status {sol.status!r}"
        )
    n, n_svec = layout.n, layout.n_svec
    Q = smat(sol.x[:n_svec])
    U = basis.u_matrix
    P = tau0 * np.eye(n) + U.T @ Q @ U
    P = 0.5 * (P + P.T)
    q = sol.x[n_svec : n_svec + n].copy()
    r = float(sol.x[n_svec + n])
    objective = layout.constant + sol.objective
    return QuadraticModel(p_matrix=P, q=q, r=r), Q, objective, sol


def estimate_tau(
    data: list[DataPoint],
    tau0: float,
    pursuit_iterations: int,
    *,
    sigma_xi: float = 0.0,
) -> TauEstimate:
    """Estimate the strong-convexity modulus by basis pursuit over the dd cone.

    Runs ``pursuit_iterations`` rounds: solve the model LP in the current
    basis, then set the next basis to the Cholesky factor of the fitted
    curvature matrix.  The previous optimum stays (approximately) feasible
    after the basis change, so the reported objective is nonincreasing.
    With noisy observations (``sigma_xi > 0``) each value is lowered by
    3 sqrt(sigma_xi) first so the fitted model stays a high-probability
    lower bound.  Returns min eigenvalue of the final fit; always >= tau0
    by construction.
    """
    if pursuit_iterations < 1:
        raise ValueError(f"need at least one pursuit iteration, got {pursuit_iterations}")
    if not data:
        raise ValueError("estimation needs data points")
    if sigma_xi > 0.0:
        margin = 3.0 * math.sqrt(sigma_xi)
        data = [
            DataPoint(x=pt.x, u=pt.u, delta=pt.delta, value=pt.value - margin)
            for pt in data
        ]
    n = data[0].x.size
    basis = DdpBasis.identity(n)
    estimate = TauEstimate(tau_hat=tau0, model=QuadraticModel(np.eye(n), np.zeros(n), 0.0))
    for _ in range(pursuit_iterations):
        model, Q, objective, _ = _solve_model(data, tau0, basis)
        estimate.model = model
        estimate.objectives.append(objective)
        estimate.tau_per_iteration.append(min_eigenvalue(model.p_matrix))
        estimate.basis = basis
        estimate.certificate_q = Q
        off = Q - np.diag(np.diag(Q))
        if n > 1 and float(np.abs(off).max()) < PURSUIT_OFFDIAG_TOL:
            break
        if n == 1:
            break  # the dd cone is exact in one dimension
        basis = DdpBasis(cholesky_upper(model.p_matrix))
    estimate.tau_hat = estimate.tau_per_iteration[-1]
    return estimate


def optimize_with_tau_estimation(
    oracle: NoisyOracle,
    feasible_set,
    x1,
    total: int,
    rng: RandomSource,
    *,
    tau0: float,
    delta: float,
    sigma_xi: float = 0.0,
    switch_at: int | None = None,
    pursuit_iterations: int | None = None,
    data_mode: str = "fresh",
    sample_radius: float = 1.0,
    checkpoints=None,
) -> tuple["Trace", TauEstimate | None]:
    """Constrained quadratic-regime run that upgrades tau once, in flight.

    Runs the 2/(tau k) stepsize with constant smoothing; after ``switch_at``
    iterations (default (n+1)(n+2)/2) the dd-model estimate replaces tau
    for every later stepsize.

    ``data_mode`` picks where the model data comes from.  ``"trace"``
    reuses the run's own lifted queries (one extra real-part query per
    early step, nothing at estimation time); with the large early steps of
    a small tau0 those iterates all sit on the projection boundary, whose
    shell leaves the radial curvature unidentified, so the conservative
    default is ``"fresh"``: sample the data ball around the current
    iterate at estimation time (one query per point, honestly counted).
    """
    from .algorithms import Trace  # deferred: algorithms imports this module's DataPoint

    x = feasible_set.project(np.array(x1, dtype=np.float64, copy=True))
    n = x.size
    if switch_at is None:
        switch_at = min_data_points(n)
    if pursuit_iterations is None:
        pursuit_iterations = n
    if checkpoints is None:
        from .algorithms import geometric_checkpoints

        checkpoints = geometric_checkpoints(total)
    is_checkpoint = np.zeros(total + 1, dtype=bool)
    is_checkpoint[list(checkpoints)] = True

    fn = oracle.function
    trace = Trace(n=n, total=total, regime="quad_constrained_tau_adaptive")
    if fn.gradient is not None:
        trace.grad_norm_sq = []
    if n <= 64:
        trace.history = np.empty((total, n), dtype=np.float64)
    sum_x = np.zeros(n)
    start_queries = oracle.query_count
    tau = tau0
    estimate: TauEstimate | None = None
    data: list[DataPoint] = []

    if data_mode not in ("fresh", "trace"):
        raise ValueError(f"unknown data mode {data_mode!r}")

    for k in range(1, total + 1):
        u = sample_unit_sphere(n, rng)
        z = complex_shift(x, u, delta)
        value = oracle.query_im(z)
        if data_mode == "trace" and k <= switch_at:
            data.append(DataPoint(x=x.copy(), u=u, delta=delta, value=oracle.query_re(z)))
        mu = 2.0 / (tau * k)
        x = feasible_set.project(x - mu * (n / delta) * value * u)
        if not math.isfinite(float(np.dot(x, x))):
            from .algorithms import NonFiniteIterateError

            raise NonFiniteIterateError(k)
        sum_x += x
        if trace.history is not None:
            trace.history[k - 1] = x
        if k == switch_at:
            if data_mode == "fresh":
                data = collect_data(
                    oracle, switch_at, center=x, radius=sample_radius, delta=delta, rng=rng
                )
            estimate = estimate_tau(data, tau0, pursuit_iterations, sigma_xi=sigma_xi)
            tau = estimate.tau_hat
            trace.data_points = data
        if is_checkpoint[k]:
            trace.checkpoints.append(k)
            trace.f_values.append(fn.value(x))
            trace.f_uniform.append(fn.value(sum_x / k))
            if trace.history is not None and k >= 2:
                suffix = trace.history[k // 2 : k].mean(axis=0)
            else:
                suffix = x
            trace.f_suffix.append(fn.value(suffix))
            trace.mu_values.append(mu)
            trace.delta_values.append(delta)
            trace.queries_at.append(oracle.query_count - start_queries)
            if trace.grad_norm_sq is not None:
                gr = fn.gradient(x)
                trace.grad_norm_sq.append(float(np.dot(gr, gr)))

    trace.sum_x = sum_x
    trace.final_x = x
    trace.prefix_sums[total] = sum_x.copy()
    trace.total_queries = oracle.query_count - start_queries
    return trace, estimate
