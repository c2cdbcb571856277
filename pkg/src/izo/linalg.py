"""Small dense symmetric-matrix utilities used by the model-fitting pipeline.

The svec/smat pair uses the orthonormal convention (off-diagonal entries
scaled by sqrt 2) so the vector inner product reproduces the Frobenius
inner product; ``<svec(P), sym_outer(x, x)> = <Px, x>`` is the identity
that fixes all scalings downstream.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "FactorizationError",
    "svec",
    "smat",
    "sym_outer",
    "svec_length",
    "svec_dim",
    "cholesky_upper",
    "jacobi_eigenvalues",
    "min_eigenvalue",
]

_SQRT2 = math.sqrt(2.0)


class FactorizationError(ValueError):
    """Cholesky pivot failure on a matrix that is not positive definite."""


def svec_length(n: int) -> int:
    return n * (n + 1) // 2


def svec_dim(length: int) -> int:
    """Matrix size n for a packed length n(n+1)/2, validating triangularity."""
    n = int((math.isqrt(8 * length + 1) - 1) // 2)
    if n * (n + 1) // 2 != length:
        raise ValueError(f"length {length} is not a triangular number")
    return n


def _check_symmetric(P: np.ndarray, what: str = "matrix") -> np.ndarray:
    P = np.asarray(P, dtype=np.float64)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise ValueError(f"{what} must be square, got shape {P.shape}")
    scale = max(1.0, float(np.abs(P).max()))
    if float(np.abs(P - P.T).max()) > 4e-15 * scale * P.shape[0]:
        raise ValueError(f"{what} must be symmetric")
    return P


def svec(P: np.ndarray) -> np.ndarray:
    """Pack a symmetric matrix into length n(n+1)/2, off-diagonals times sqrt 2."""
    P = _check_symmetric(P)
    n = P.shape[0]
    iu, ju = np.triu_indices(n)
    out = P[iu, ju].copy()
    out[iu != ju] *= _SQRT2
    return out


def smat(p: np.ndarray) -> np.ndarray:
    """Inverse of :func:`svec`; smat(svec(P)) = P."""
    p = np.asarray(p, dtype=np.float64)
    n = svec_dim(p.size)
    iu, ju = np.triu_indices(n)
    vals = p.copy()
    vals[iu != ju] /= _SQRT2
    P = np.zeros((n, n))
    P[iu, ju] = vals
    P[ju, iu] = vals
    return P


def sym_outer(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """svec of the symmetrized outer product (x y^T + y x^T) / 2.

    Satisfies <svec(P), sym_outer(x, y)> = <Px, y> for symmetric P.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"vectors must have equal length, got {x.shape} and {y.shape}")
    n = x.size
    iu, ju = np.triu_indices(n)
    out = 0.5 * (x[iu] * y[ju] + y[iu] * x[ju])
    out[iu != ju] *= _SQRT2
    return out


def cholesky_upper(P: np.ndarray, *, pivot_floor: float = 1e-12) -> np.ndarray:
    """Upper-triangular U with U^T U = P, for symmetric positive definite P.

    Raises :class:`FactorizationError` naming the failing pivot when some
    leading minor is not positive (relative to the matrix scale).
    """
    P = _check_symmetric(P)
    n = P.shape[0]
    scale = max(1.0, float(np.abs(np.diag(P)).max()))
    U = np.zeros((n, n))
    for i in range(n):
        s = P[i, i] - float(np.dot(U[:i, i], U[:i, i]))
        if s <= pivot_floor * scale:
            raise FactorizationError(
                f"pivot {i} is {s:.3e}; matrix is not positive definite at that scale"
            )
        U[i, i] = math.sqrt(s)
        if i + 1 < n:
            U[i, i + 1 :] = (P[i, i + 1 :] - U[:i, i] @ U[:i, i + 1 :]) / U[i, i]
    return U


def jacobi_eigenvalues(
    P: np.ndarray, *, tol: float = 1e-12, max_sweeps: int = 64
) -> np.ndarray:
    """All eigenvalues of a symmetric matrix by cyclic Jacobi sweeps, ascending.

    Sweeps until the off-diagonal Frobenius mass is below tol times the
    matrix norm; convergence is quadratic so a handful of sweeps suffice
    at the sizes used here.
    """
    A = _check_symmetric(P).copy()
    n = A.shape[0]
    if n == 1:
        return np.array([A[0, 0]])
    norm = float(np.linalg.norm(A))
    if norm == 0.0:
        return np.zeros(n)
    for _ in range(max_sweeps):
        off = math.sqrt(max(float(np.sum(A * A)) - float(np.sum(np.diag(A) ** 2)), 0.0))
        if off <= tol * norm:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(1.0, theta))
                c = 1.0 / math.hypot(1.0, t)
                s = t * c
                row_p = A[p, :].copy()
                row_q = A[q, :].copy()
                A[p, :] = c * row_p - s * row_q
                A[q, :] = s * row_p + c * row_q
                col_p = A[:, p].copy()
                col_q = A[:, q].copy()
                A[:, p] = c * col_p - s * col_q
                A[:, q] = s * col_p + c * col_q
                A[p, q] = 0.0
                A[q, p] = 0.0
    return np.sort(np.diag(A))


def min_eigenvalue(P: np.ndarray) -> float:
    """Smallest eigenvalue of a symmetric matrix (cyclic Jacobi)."""
    return float(jacobi_eigenvalues(P)[0])
