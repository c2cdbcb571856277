"""Stepsize and smoothing schedules for each convergence regime.

Each regime fixes the pair (mu_k, delta_k) that its convergence guarantee
asks for.  The constrained regimes run the same 2/(tau k) stepsize whether
or not the objective is quadratic; only the smoothing sequence changes (a
decaying delta_k buys off the bias of non-quadratic objectives, a constant
delta is best when the estimator is unbiased).  The unconstrained regimes
prepend a warm-up phase of K0 flat steps before strong convexity takes
over.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["ScheduleError", "Schedule", "make_schedule", "REGIMES", "baseline_smoothing"]

REGIMES = (
    "sc_constrained",
    "sc_unconstrained",
    "quad_constrained",
    "quad_unconstrained",
    "nonconvex",
    "online_quadratic",
    "anytime_unconstrained",
)

_NEEDS_L1 = ("sc_unconstrained", "quad_unconstrained", "nonconvex", "anytime_unconstrained")
_NEEDS_TAU = (
    "sc_constrained",
    "sc_unconstrained",
    "quad_constrained",
    "quad_unconstrained",
    "online_quadratic",
    "anytime_unconstrained",
)
_HAS_WARMUP = ("sc_unconstrained", "quad_unconstrained")


class ScheduleError(ValueError):
    """Invalid or inconsistent schedule configuration."""


@dataclass(frozen=True)
class Schedule:
    """Per-iteration stepsize mu_k and smoothing delta_k for one regime.

    ``total`` is the planned horizon K; the unconstrained regimes need it
    because their warm-up stepsize is 1/(tau K).  ``k0`` is the warm-up
    length (zero for regimes without one).
    """

    regime: str
    n: int
    delta: float
    tau: float | None = None
    l1: float | None = None
    total: int | None = None
    k0: int = 0

    def stepsize(self, k: int) -> float:
        if k < 1:
            raise ScheduleError(f"iteration index must be >= 1, got {k}")
        r = self.regime
        if r in ("sc_constrained", "quad_constrained", "online_quadratic"):
            return 2.0 / (self.tau * k)
        if r in ("sc_unconstrained", "quad_unconstrained"):
            if k <= self.k0:
                return 1.0 / (self.tau * self.total)
            return 2.0 / (self.tau * k)
        if r == "anytime_unconstrained":
            return 1.0 / (self.tau * (k + 2.0 * self.k0))
        if r == "nonconvex":
            return 1.0 / (self.n * self.l1 * k ** (2.0 / 3.0))
        raise ScheduleError(f"unknown regime {r!r}")

    def smoothing(self, k: int) -> float:
        if k < 1:
            raise ScheduleError(f"iteration index must be >= 1, got {k}")
        r = self.regime
        if r in ("quad_constrained", "quad_unconstrained", "online_quadratic"):
            return self.delta
        if r == "sc_unconstrained" and k <= self.k0:
            return self.delta * self.total ** (-1.0 / 6.0)
        return self.delta * k ** (-1.0 / 6.0)

    def stepsize_array(self, total: int) -> np.ndarray:
        k = np.arange(1, total + 1, dtype=np.float64)
        r = self.regime
        if r in ("sc_constrained", "quad_constrained", "online_quadratic"):
            return 2.0 / (self.tau * k)
        if r in ("sc_unconstrained", "quad_unconstrained"):
            mu = 2.0 / (self.tau * k)
            mu[: self.k0] = 1.0 / (self.tau * self.total)
            return mu
        if r == "anytime_unconstrained":
            return 1.0 / (self.tau * (k + 2.0 * self.k0))
        if r == "nonconvex":
            return 1.0 / (self.n * self.l1 * k ** (2.0 / 3.0))
        raise ScheduleError(f"unknown regime {r!r}")

    def smoothing_array(self, total: int) -> np.ndarray:
        k = np.arange(1, total + 1, dtype=np.float64)
        r = self.regime
        if r in ("quad_constrained", "quad_unconstrained", "online_quadratic"):
            return np.full(total, self.delta)
        dl = self.delta * k ** (-1.0 / 6.0)
        if r == "sc_unconstrained":
            dl[: self.k0] = self.delta * self.total ** (-1.0 / 6.0)
        return dl


def make_schedule(
    regime: str,
    *,
    n: int,
    delta: float,
    tau: float | None = None,
    l1: float | None = None,
    total: int | None = None,
) -> Schedule:
    """Build and validate a schedule for the given regime.

    The unconstrained regimes compute the warm-up length K0 from (n, L1,
    tau) and refuse horizons shorter than 2 K0, reporting the computed K0
    so the caller can fix the configuration.
    """
    if regime not in REGIMES:
        raise ScheduleError(f"unknown regime {regime!r}; expected one of {REGIMES}")
    if n < 1:
        raise ScheduleError(f"dimension must be >= 1, got {n}")
    if not delta > 0.0:
        raise ScheduleError(f"smoothing scale must be positive, got {delta}")
    if regime in _NEEDS_TAU:
        if tau is None or tau <= 0.0:
            raise ScheduleError(f"regime {regime} needs tau > 0, got {tau}")
    if regime in _NEEDS_L1:
        if l1 is None or l1 <= 0.0:
            raise ScheduleError(f"regime {regime} needs L1 > 0, got {l1}")

    k0 = 0
    if regime == "sc_unconstrained" or regime == "anytime_unconstrained":
        k0 = math.floor(8.0 * n * n * l1 * l1 / (tau * tau))
    elif regime == "quad_unconstrained":
        k0 = math.floor(4.0 * n * l1 * l1 / (tau * tau))

    if regime in _HAS_WARMUP:
        if total is None:
            raise ScheduleError(f"regime {regime} needs the horizon K up front")
        if total < 2 * k0:
            raise ScheduleError(
                f"regime {regime} needs K >= 2*K0 = {2 * k0} (computed K0 = {k0}), got K = {total}"
            )
    return Schedule(regime=regime, n=n, delta=delta, tau=tau, l1=l1, total=total, k0=k0)


def baseline_smoothing(k, n: int, sigma_xi: float):
    """Smoothing law of the multi-point reference algorithm.

    delta_k = (3 n^2 sigma_xi / (4k + 9 n^2))^(1/4); paired with the same
    2/(tau k) stepsize as the constrained regimes.
    """
    k = np.asarray(k, dtype=np.float64)
    return (3.0 * n * n * sigma_xi / (4.0 * k + 9.0 * n * n)) ** 0.25
