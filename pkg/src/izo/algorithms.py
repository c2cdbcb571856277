"""Projected stochastic descent driven by the complex-step gradient sampler.

One iteration is ``x_{k+1} = project(x_k - mu_k * g_k)`` where ``g_k`` is
the single-point estimate at ``x_k`` with smoothing ``delta_k``.  The run
returns a :class:`Trace` carrying checkpointed noiseless function values,
the running averages every guarantee is stated for, and honest query
accounting (one query per iteration here, two for the multi-point
baseline).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .oracle import NoisyOracle
from .rng import RandomSource, complex_shift, sample_unit_sphere, sphere_block
from .schedules import Schedule, baseline_smoothing

__all__ = [
    "NonFiniteIterateError",
    "FeasibleSet",
    "Trace",
    "run_izo",
    "run_izo_custom",
    "run_izo_baseline",
    "run_online_izo",
    "uniform_average",
    "suffix_average",
    "tail_average",
    "geometric_checkpoints",
]

# Keep full iterate history only for small dimensions; long runs at large n
# would otherwise hold gigabytes.
HISTORY_DIM_LIMIT = 64


class NonFiniteIterateError(RuntimeError):
    """An iterate overflowed to inf/nan; carries the offending iteration."""

    def __init__(self, k: int, message: str | None = None):
        self.k = k
        super().__init__(message or f"non-finite iterate at k={k} (stepsize too large for tau?)")


@dataclass
class FeasibleSet:
    """Feasible region with a Euclidean projection.

    Supported kinds: the whole space, a centred ball, a coordinate box,
    or a custom projection map (with an optional membership test used for
    contract checks).
    """

    kind: str
    center: np.ndarray | None = None
    radius: float | None = None
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None
    project_fn: Callable[[np.ndarray], np.ndarray] | None = None
    contains_fn: Callable[[np.ndarray], bool] | None = None

    @classmethod
    def whole_space(cls) -> "FeasibleSet":
        return cls(kind="whole_space")

    @classmethod
    def ball(cls, center, radius: float) -> "FeasibleSet":
        if radius <= 0.0:
            raise ValueError(f"ball radius must be positive, got {radius}")
        return cls(kind="ball", center=np.asarray(center, dtype=np.float64), radius=float(radius))

    @classmethod
    def box(cls, lower, upper) -> "FeasibleSet":
        lo = np.asarray(lower, dtype=np.float64)
        hi = np.asarray(upper, dtype=np.float64)
        if lo.shape != hi.shape or np.any(lo > hi):
            raise ValueError("box bounds must have equal shape with lower <= upper")
        return cls(kind="box", lower=lo, upper=hi)

    @classmethod
    def custom(cls, project_fn, contains_fn=None) -> "FeasibleSet":
        return cls(kind="custom", project_fn=project_fn, contains_fn=contains_fn)

    def project(self, x: np.ndarray) -> np.ndarray:
        if self.kind == "whole_space":
            return x
        if self.kind == "ball":
            d = x - self.center
            norm = math.sqrt(float(np.dot(d, d)))
            if norm <= self.radius:
                return x
            return self.center + d * (self.radius / norm)
        if self.kind == "box":
            return np.clip(x, self.lower, self.upper)
        y = self.project_fn(x)
        if self.contains_fn is not None and not self.contains_fn(y):
            raise RuntimeError("custom projection returned a non-member point")
        return y

    def contains(self, x: np.ndarray, tol: float = 1e-9) -> bool:
        if self.kind == "whole_space":
            return True
        if self.kind == "ball":
            return float(np.linalg.norm(x - self.center)) <= self.radius * (1.0 + tol) + tol
        if self.kind == "box":
            return bool(np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))
        if self.contains_fn is not None:
            return bool(self.contains_fn(x))
        return True


@dataclass
class Trace:
    """Checkpointed record of one optimization run.

    ``checkpoints`` lists the iterations k at which the noiseless value of
    the iterate and of the running averages was recorded.  ``prefix_sums``
    holds the iterate partial sums needed to reconstruct suffix and tail
    averages without full history; for dimensions up to
    ``HISTORY_DIM_LIMIT`` the full history is kept as well.
    """

    n: int
    total: int
    regime: str
    checkpoints: list[int] = field(default_factory=list)
    f_values: list[float] = field(default_factory=list)
    f_uniform: list[float] = field(default_factory=list)
    f_suffix: list[float] = field(default_factory=list)
    mu_values: list[float] = field(default_factory=list)
    delta_values: list[float] = field(default_factory=list)
    grad_norm_sq: list[float] | None = None
    queries_at: list[int] = field(default_factory=list)
    history: np.ndarray | None = None
    prefix_sums: dict[int, np.ndarray] = field(default_factory=dict)
    sum_x: np.ndarray | None = None
    final_x: np.ndarray | None = None
    total_queries: int = 0
    min_grad_norm_sq: float | None = None
    data_points: list = field(default_factory=list)
    per_round_losses: list[float] | None = None

    def iterate_at(self, k: int) -> np.ndarray:
        if self.history is None:
            raise ValueError("full history was not stored for this run")
        return self.history[k - 1]

    def prefix_sum(self, k: int) -> np.ndarray:
        """Sum of the first k iterates."""
        if k == self.total and self.sum_x is not None:
            return self.sum_x
        if k in self.prefix_sums:
            return self.prefix_sums[k]
        if self.history is not None:
            return self.history[:k].sum(axis=0)
        raise ValueError(f"no prefix sum recorded at k={k}")


def geometric_checkpoints(total: int) -> list[int]:
    """Logging stride 1, 2, 4, ... plus the final iteration."""
    ks = []
    k = 1
    while k <= total:
        ks.append(k)
        k *= 2
    if ks[-1] != total:
        ks.append(total)
    return ks


def uniform_average(trace: Trace) -> np.ndarray:
    """Mean of all iterates x_1..x_K."""
    return trace.prefix_sum(trace.total) / trace.total


def suffix_average(trace: Trace) -> np.ndarray:
    """Mean of the last half of the iterates (K must be even)."""
    total = trace.total
    if total % 2 != 0:
        raise ValueError(f"suffix averaging needs an even horizon, got K={total}")
    half = total // 2
    return (trace.prefix_sum(total) - trace.prefix_sum(half)) * (2.0 / total)


def tail_average(trace: Trace, k0: int) -> np.ndarray:
    """Mean of x_{K0+1}..x_K, the average the warm-up regimes are stated for."""
    total = trace.total
    if total <= k0:
        raise ValueError(f"tail averaging needs K > K0 (and K >= 2*K0); got K={total}, K0={k0}")
    if k0 == 0:
        return uniform_average(trace)
    return (trace.prefix_sum(total) - trace.prefix_sum(k0)) / (total - k0)


def _snapshot_plan(checkpoints: Sequence[int], extra: Sequence[int], total: int) -> set[int]:
    ks = set(checkpoints)
    ks.update(c // 2 for c in checkpoints if c >= 2)
    ks.update(k for k in extra if 1 <= k <= total)
    ks.add(total)
    if total >= 2:
        ks.add(total // 2)
    return ks


class _DirectionBuffer:
    """Blocks of iid uniform sphere directions for the run loops.

    Directions are independent of the iterates, so drawing them a block at
    a time is distributionally identical to one draw per iteration and
    keeps the per-step cost flat.
    """

    __slots__ = ("n", "rng", "block_size", "_block", "_pos")

    def __init__(self, n: int, rng: RandomSource, block_size: int = 512):
        self.n = n
        self.rng = rng
        self.block_size = block_size
        self._block = np.empty((0, n))
        self._pos = 0

    def next(self) -> np.ndarray:
        if self._pos == self._block.shape[0]:
            self._block = sphere_block(self.n, self.block_size, self.rng)
            self._pos = 0
        u = self._block[self._pos]
        self._pos += 1
        return u


def _run_loop(
    oracle: NoisyOracle,
    feasible_set: FeasibleSet,
    x1,
    total: int,
    rng: RandomSource,
    mu: np.ndarray,
    dl: np.ndarray,
    *,
    gradient_step,
    regime: str,
    collect_re: int = 0,
    track_grad_norm: bool = False,
    store_history: bool | None = None,
    snapshot_at: Sequence[int] = (),
    checkpoints: Sequence[int] | None = None,
) -> Trace:
    x = feasible_set.project(np.array(x1, dtype=np.float64, copy=True))
    n = x.size
    if checkpoints is None:
        checkpoints = geometric_checkpoints(total)
    snapshots = _snapshot_plan(checkpoints, snapshot_at, total)
    is_checkpoint = np.zeros(total + 1, dtype=bool)
    is_checkpoint[list(checkpoints)] = True
    take_snapshot = np.zeros(total + 1, dtype=bool)
    take_snapshot[sorted(snapshots)] = True

    if store_history is None:
        store_history = n <= HISTORY_DIM_LIMIT
    fn = oracle.function
    grad_fn = fn.gradient
    track_grad_norm = track_grad_norm and grad_fn is not None

    trace = Trace(n=n, total=total, regime=regime)
    if grad_fn is not None:
        trace.grad_norm_sq = []
    if store_history:
        trace.history = np.empty((total, n), dtype=np.float64)
    sum_x = np.zeros(n)
    min_gn2 = math.inf
    start_queries = oracle.query_count
    directions = _DirectionBuffer(n, rng)
    if collect_re:
        from .tau import DataPoint  # deferred to avoid a module cycle

    for k in range(1, total + 1):
        u = directions.next()
        delta_k = dl[k - 1]
        g = gradient_step(x, u, delta_k)
        if collect_re and k <= collect_re:
            z = complex_shift(x, u, delta_k)
            trace.data_points.append(
                DataPoint(x=x.copy(), u=u.copy(), delta=delta_k, value=oracle.query_re(z))
            )
        x = feasible_set.project(x - mu[k - 1] * g)
        if not math.isfinite(float(np.dot(x, x))):
            raise NonFiniteIterateError(k)
        sum_x += x
        if store_history:
            trace.history[k - 1] = x
        if track_grad_norm:
            gr = grad_fn(x)
            gn2 = float(np.dot(gr, gr))
            if gn2 < min_gn2:
                min_gn2 = gn2
        if take_snapshot[k]:
            trace.prefix_sums[k] = sum_x.copy()
        if is_checkpoint[k]:
            trace.checkpoints.append(k)
            trace.f_values.append(fn.value(x))
            trace.f_uniform.append(fn.value(sum_x / k))
            half = k // 2
            if half >= 1 and half in trace.prefix_sums:
                suffix = (sum_x - trace.prefix_sums[half]) / (k - half)
            else:
                suffix = x
            trace.f_suffix.append(fn.value(suffix))
            trace.mu_values.append(float(mu[k - 1]))
            trace.delta_values.append(float(dl[k - 1]))
            trace.queries_at.append(oracle.query_count - start_queries)
            if grad_fn is not None:
                gr = grad_fn(x)
                trace.grad_norm_sq.append(float(np.dot(gr, gr)))

    trace.sum_x = sum_x
    trace.final_x = x
    trace.total_queries = oracle.query_count - start_queries
    if track_grad_norm:
        trace.min_grad_norm_sq = min_gn2
    return trace


def run_izo(
    oracle: NoisyOracle,
    feasible_set: FeasibleSet,
    schedule: Schedule,
    x1,
    total: int,
    rng: RandomSource,
    *,
    collect_re: int = 0,
    track_grad_norm: bool = False,
    store_history: bool | None = None,
    snapshot_at: Sequence[int] = (),
    checkpoints: Sequence[int] | None = None,
) -> Trace:
    """Run the single-point complex-step descent for `total` iterations.

    The initial point is projected onto the feasible set before the first
    step; beyond that feasibility of x1 is all that is ever assumed.  With
    ``collect_re = N`` the first N iterations additionally log the noisy
    real part at the same lifted query point (one extra query each), which
    is the raw material of the strong-convexity estimator.  Deterministic
    given (seed, config): identical inputs give bit-identical traces.
    """
    if schedule.total is not None and schedule.total != total:
        raise ValueError(
            f"schedule was built for K={schedule.total} but the run asks for K={total}"
        )
    mu = schedule.stepsize_array(total)
    dl = schedule.smoothing_array(total)
    n = np.asarray(x1).size
    zbuf = np.empty(n, dtype=np.complex128)
    query_im = oracle.query_im

    def gradient_step(x, u, delta_k):
        zbuf.real = x
        zbuf.imag = delta_k * u
        return (n / delta_k) * query_im(zbuf) * u

    return _run_loop(
        oracle,
        feasible_set,
        x1,
        total,
        rng,
        mu,
        dl,
        gradient_step=gradient_step,
        regime=schedule.regime,
        collect_re=collect_re,
        track_grad_norm=track_grad_norm,
        store_history=store_history,
        snapshot_at=snapshot_at,
        checkpoints=checkpoints,
    )


def run_izo_custom(
    oracle: NoisyOracle,
    feasible_set: FeasibleSet,
    x1,
    total: int,
    rng: RandomSource,
    *,
    mu: np.ndarray,
    dl: np.ndarray,
    regime: str = "custom",
    collect_re: int = 0,
    track_grad_norm: bool = False,
    store_history: bool | None = None,
    snapshot_at: Sequence[int] = (),
    checkpoints: Sequence[int] | None = None,
) -> Trace:
    """Single-point complex-step descent with caller-supplied mu/delta arrays.

    Used for comparison arms whose laws fall outside the named regimes
    (the plain constant-stepsize arm of the nonconvex benchmark, for
    instance).
    """
    mu = np.asarray(mu, dtype=np.float64)
    dl = np.asarray(dl, dtype=np.float64)
    if mu.shape != (total,) or dl.shape != (total,):
        raise ValueError(f"mu/delta arrays must have length K={total}")
    n = np.asarray(x1).size
    zbuf = np.empty(n, dtype=np.complex128)
    query_im = oracle.query_im

    def gradient_step(x, u, delta_k):
        zbuf.real = x
        zbuf.imag = delta_k * u
        return (n / delta_k) * query_im(zbuf) * u

    return _run_loop(
        oracle,
        feasible_set,
        x1,
        total,
        rng,
        mu,
        dl,
        gradient_step=gradient_step,
        regime=regime,
        collect_re=collect_re,
        track_grad_norm=track_grad_norm,
        store_history=store_history,
        snapshot_at=snapshot_at,
        checkpoints=checkpoints,
    )


def run_izo_baseline(
    oracle: NoisyOracle,
    feasible_set: FeasibleSet,
    x1,
    total: int,
    rng: RandomSource,
    *,
    tau: float,
    sigma_xi: float,
    variant: str = "central",
    store_history: bool | None = None,
    checkpoints: Sequence[int] | None = None,
) -> Trace:
    """Multi-point reference run: central differences with the shrinking
    smoothing law delta_k = (3 n^2 sigma / (4k + 9 n^2))^(1/4).

    Two real queries per iteration.  Once delta_k falls below the rounding
    floor the difference quotients collapse and progress stalls; that
    behaviour is the point of the comparison.
    """
    if variant not in ("forward", "central"):
        raise ValueError(f"unknown variant {variant!r}")
    n = oracle.function.dim
    mu = 2.0 / (tau * np.arange(1, total + 1, dtype=np.float64))
    dl = baseline_smoothing(np.arange(1, total + 1), n, sigma_xi)
    query_re = oracle.query_re

    def gradient_step(x, u, delta_k):
        plus = (x + delta_k * u).astype(np.complex128)
        if variant == "forward":
            diff = query_re(plus) - query_re(x.astype(np.complex128))
            return (n / delta_k) * diff * u
        minus = (x - delta_k * u).astype(np.complex128)
        diff = query_re(plus) - query_re(minus)
        return (n / (2.0 * delta_k)) * diff * u

    return _run_loop(
        oracle,
        feasible_set,
        x1,
        total,
        rng,
        mu,
        dl,
        gradient_step=gradient_step,
        regime="beta_baseline",
        store_history=store_history,
        checkpoints=checkpoints,
    )


def run_online_izo(
    oracles: Sequence[NoisyOracle],
    feasible_set: FeasibleSet,
    schedule: Schedule,
    x1,
    total: int,
    rng: RandomSource,
    *,
    store_history: bool | None = None,
) -> Trace:
    """Online variant: round k queries the next objective at the current point.

    The update at round k uses the imaginary-part query of f_{k+1} at x_k;
    the reported per-round loss is the noiseless f_k(x_k), matching the
    regret definition.  Needs at least K+1 oracles.
    """
    if len(oracles) < total + 1:
        raise ValueError(f"need at least K+1 = {total + 1} oracles, got {len(oracles)}")
    if schedule.regime != "online_quadratic":
        raise ValueError(f"online runs use the online_quadratic regime, got {schedule.regime!r}")
    x = feasible_set.project(np.array(x1, dtype=np.float64, copy=True))
    n = x.size
    mu = schedule.stepsize_array(total)
    dl = schedule.smoothing_array(total)
    trace = Trace(n=n, total=total, regime=schedule.regime, per_round_losses=[])
    if store_history is None:
        store_history = n <= HISTORY_DIM_LIMIT
    if store_history:
        trace.history = np.empty((total, n), dtype=np.float64)
    sum_x = np.zeros(n)
    queries = 0
    directions = _DirectionBuffer(n, rng)
    for k in range(1, total + 1):
        trace.per_round_losses.append(oracles[k - 1].true_value(x))
        u = directions.next()
        delta_k = dl[k - 1]
        value = oracles[k].query_im(complex_shift(x, u, delta_k))
        queries += 1
        x = feasible_set.project(x - mu[k - 1] * (n / delta_k) * value * u)
        if not math.isfinite(float(np.dot(x, x))):
            raise NonFiniteIterateError(k)
        sum_x += x
        if store_history:
            trace.history[k - 1] = x
    trace.sum_x = sum_x
    trace.final_x = x
    trace.total_queries = queries
    trace.prefix_sums[total] = sum_x.copy()
    return trace
