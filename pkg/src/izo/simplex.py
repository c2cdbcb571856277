"""Dense two-phase simplex solver with Bland's anti-cycling rule.

Covers the desk-scale linear programs produced by the diagonally-dominant
model fit: minimize ``c @ v`` subject to ``a_ub @ v <= b_ub`` with each
variable either free or nonnegative.  Free variables are split internally,
phase 1 drives artificial variables out of the basis, and both phases pick
the lowest-index candidate (Bland), so the method terminates on degenerate
vertices at the cost of some extra pivots.  Infeasible and unbounded
problems are reported through the status field, never as exceptions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["LpProblem", "LpSolution", "solve_lp", "SimplexLimitError"]

_RC_TOL = 1e-9  # reduced-cost threshold for optimality
_PIV_TOL = 1e-9  # minimum magnitude of a pivot element
_FEAS_TOL = 1e-7  # phase-1 objective above this means infeasible


class SimplexLimitError(RuntimeError):
    """Safety iteration cap reached (should not happen under Bland's rule)."""


@dataclass
class LpProblem:
    """minimize c @ v  subject to  a_ub @ v <= b_ub.

    ``nonneg[j]`` marks variable j as >= 0; unmarked variables are free.
    """

    c: np.ndarray
    a_ub: np.ndarray
    b_ub: np.ndarray
    nonneg: np.ndarray

    def __post_init__(self) -> None:
        self.c = np.asarray(self.c, dtype=np.float64)
        self.a_ub = np.atleast_2d(np.asarray(self.a_ub, dtype=np.float64))
        self.b_ub = np.asarray(self.b_ub, dtype=np.float64)
        self.nonneg = np.asarray(self.nonneg, dtype=bool)
        m, n = self.a_ub.shape
        if self.c.shape != (n,) or self.b_ub.shape != (m,) or self.nonneg.shape != (n,):
            raise ValueError(
                f"inconsistent LP shapes: A{self.a_ub.shape}, c{self.c.shape}, "
                f"b{self.b_ub.shape}, nonneg{self.nonneg.shape}"
            )


@dataclass
class LpSolution:
    x: np.ndarray | None
    objective: float | None
    status: str  # optimal | infeasible | unbounded
    pivots: int = 0


def _pivot(tableau: np.ndarray, cost: np.ndarray, row: int, col: int) -> None:
    tableau[row] /= tableau[row, col]
    piv_row = tableau[row]
    factors = tableau[:, col].copy()
    factors[row] = 0.0
    tableau -= np.outer(factors, piv_row)
    cost -= cost[col] * piv_row


# After this many pivots without objective progress the entering rule drops
# from Dantzig (fast) to Bland (anti-cycling, terminating).
_STALL_LIMIT = 24


def _simplex_iterate(
    tableau: np.ndarray,
    cost: np.ndarray,
    basis: np.ndarray,
    allowed: np.ndarray,
    max_pivots: int,
) -> tuple[str, int]:
    """Pivot until optimal or unbounded; returns (status, pivot count).

    Entering variable by Dantzig's rule while the objective moves; during
    degenerate stalls both choices fall back to Bland's lowest-index rule,
    which guarantees termination.
    """
    pivots = 0
    stall = 0
    while True:
        reduced = cost[:-1]
        if stall < _STALL_LIMIT:
            masked = np.where(allowed, reduced, 0.0)
            col = int(np.argmin(masked))
            if masked[col] >= -_RC_TOL:
                return "optimal", pivots
        else:
            candidates = np.flatnonzero(allowed & (reduced < -_RC_TOL))
            if candidates.size == 0:
                return "optimal", pivots
            col = int(candidates[0])  # Bland: lowest index enters
        column = tableau[:, col]
        rows = np.flatnonzero(column > _PIV_TOL)
        if rows.size == 0:
            return "unbounded", pivots
        ratios = tableau[rows, -1] / column[rows]
        best = ratios.min()
        ties = rows[ratios <= best + 1e-12 * (1.0 + abs(best))]
        if stall < _STALL_LIMIT and ties.size == 1:
            row = int(ties[0])
        else:
            row = int(ties[np.argmin(basis[ties])])  # Bland: lowest basic index leaves
        before = cost[-1]
        _pivot(tableau, cost, row, col)
        basis[row] = col
        pivots += 1
        stall = stall + 1 if cost[-1] == before else 0
        if pivots > max_pivots:
            raise SimplexLimitError(f"simplex exceeded {max_pivots} pivots")


def solve_lp(problem: LpProblem, *, max_pivots: int = 200_000) -> LpSolution:
    """Solve the LP by dense two-phase simplex with Bland's rule."""
    m, n_orig = problem.a_ub.shape

    # Split free variables v = v+ - v- so every simplex variable is >= 0.
    col_of_plus = np.empty(n_orig, dtype=int)
    col_of_minus = np.full(n_orig, -1, dtype=int)
    cols = []
    for j in range(n_orig):
        col_of_plus[j] = len(cols)
        cols.append((j, 1.0))
        if not problem.nonneg[j]:
            col_of_minus[j] = len(cols)
            cols.append((j, -1.0))
    n_split = len(cols)

    a_split = np.zeros((m, n_split))
    c_split = np.zeros(n_split)
    for idx, (j, sign) in enumerate(cols):
        a_split[:, idx] = sign * problem.a_ub[:, j]
        c_split[idx] = sign * problem.c[j]

    # Equality form with slacks; flip rows so the right-hand side is >= 0.
    b = problem.b_ub.copy()
    slack_sign = np.ones(m)
    flip = b < 0.0
    a_split[flip] *= -1.0
    b[flip] *= -1.0
    slack_sign[flip] = -1.0

    need_art = np.flatnonzero(flip)
    n_art = need_art.size
    n_total = n_split + m + n_art

    tableau = np.zeros((m, n_total + 1))
    tableau[:, :n_split] = a_split
    tableau[np.arange(m), n_split + np.arange(m)] = slack_sign
    art_cols = n_split + m + np.arange(n_art)
    tableau[need_art, art_cols] = 1.0
    tableau[:, -1] = b

    basis = n_split + np.arange(m)
    basis[need_art] = art_cols

    total_pivots = 0
    if n_art:
        # Phase 1: minimize the artificial mass.
        phase1 = np.zeros(n_total + 1)
        phase1[art_cols] = 1.0
        for i in np.flatnonzero(np.isin(basis, art_cols)):
            phase1 -= tableau[i]
        allowed = np.ones(n_total, dtype=bool)
        status, pivots = _simplex_iterate(tableau, phase1, basis, allowed, max_pivots)
        total_pivots += pivots
        if -phase1[-1] > _FEAS_TOL:
            return LpSolution(x=None, objective=None, status="infeasible", pivots=total_pivots)
        # Pivot lingering zero-level artificials out of the basis; rows where
        # that is impossible are redundant and are dropped.
        keep = np.ones(m, dtype=bool)
        for i in range(m):
            if basis[i] >= n_split + m:
                pivot_cols = np.flatnonzero(np.abs(tableau[i, : n_split + m]) > _PIV_TOL)
                if pivot_cols.size:
                    _pivot(tableau, phase1, i, int(pivot_cols[0]))
                    basis[i] = int(pivot_cols[0])
                    total_pivots += 1
                else:
                    keep[i] = False
        if not keep.all():
            tableau = tableau[keep]
            basis = basis[keep]
        tableau = np.delete(tableau, art_cols, axis=1)

    n_work = n_split + m
    # Phase 2 cost row, reduced against the current basis.
    cost = np.zeros(n_work + 1)
    cost[:n_split] = c_split
    for i, bj in enumerate(basis):
        if cost[bj] != 0.0:
            cost -= cost[bj] * tableau[i]
    allowed = np.ones(n_work, dtype=bool)
    status, pivots = _simplex_iterate(tableau, cost, basis, allowed, max_pivots)
    total_pivots += pivots
    if status == "unbounded":
        return LpSolution(x=None, objective=None, status="unbounded", pivots=total_pivots)

    values = np.zeros(n_work)
    values[basis] = tableau[:, -1]
    x = values[col_of_plus]
    has_minus = col_of_minus >= 0
    x[has_minus] -= values[col_of_minus[has_minus]]
    objective = float(problem.c @ x)
    return LpSolution(x=x, objective=objective, status="optimal", pivots=total_pivots)
