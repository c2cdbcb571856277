"""Holomorphic test functions behind a noisy complex-evaluation oracle.

An :class:`AnalyticFunction` bundles a holomorphic evaluation map with the
metadata (strong convexity, Lipschitz constants, known minimizer) that the
stepsize schedules and the benchmark reports need.  A :class:`NoisyOracle`
wraps one such function together with a zero-mean noise channel and an
honest query counter: every real-part or imaginary-part request is one
query, and each request draws its own fresh noise realization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .rng import RandomSource

__all__ = [
    "DomainError",
    "AnalyticFunction",
    "NoiseModel",
    "NoisyOracle",
    "BUILTIN_FUNCTIONS",
    "make_builtin",
    "half_sq_norm",
    "quadratic",
    "regularized_ls",
    "quartic_regularized_ls",
    "himmelblau",
    "log_scalar",
    "power_scalar",
    "bump_tail",
    "pde_velocity_norm",
    "disk_flow_velocity",
    "validate_disk_flow",
]

NOISE_KINDS = ("gaussian", "uniform", "none")


class DomainError(ValueError):
    """A query point lies outside the function's real domain or holomorphy strip."""


@dataclass
class AnalyticFunction:
    """A real-analytic function with an explicit holomorphic extension.

    ``evaluate`` maps a complex vector to a complex scalar and must be the
    holomorphic extension of a real-valued function: real input gives a
    result with zero imaginary part.  ``strip_halfwidth`` is the largest
    imaginary box half-width on which the extension is trusted; functions
    whose singularities move with the evaluation point (the scalar log)
    override ``strip_at``.  ``gradient`` is a reference gradient used for
    validation and reporting only, never by the optimizers.
    """

    name: str
    dim: int
    evaluate: Callable[[np.ndarray], complex]
    strip_halfwidth: float = 1.0
    strip_at: Callable[[np.ndarray], float] | None = None
    real_domain: tuple[float, float] | None = None
    tau: float | None = None
    l1: float | None = None
    l2: float | None = None
    minimizer: np.ndarray | None = None
    optimum: float | None = None
    gradient: Callable[[np.ndarray], np.ndarray] | None = None
    params: dict = field(default_factory=dict)

    def strip(self, x: np.ndarray) -> float:
        if self.strip_at is not None:
            return self.strip_at(x)
        return self.strip_halfwidth

    def value(self, x: np.ndarray) -> float:
        """Noiseless real value at a real point (reporting side channel)."""
        z = np.asarray(x, dtype=np.float64).astype(np.complex128)
        return float(self.evaluate(z).real)


@dataclass
class NoiseModel:
    """Zero-mean additive noise with second moment at most ``sigma_xi``."""

    sigma_xi: float = 0.0
    kind: str = "gaussian"

    def __post_init__(self) -> None:
        if self.kind not in NOISE_KINDS:
            raise ValueError(f"unknown noise kind {self.kind!r}; expected one of {NOISE_KINDS}")
        if self.sigma_xi < 0.0:
            raise ValueError(f"noise variance bound must be >= 0, got {self.sigma_xi}")
        if self.sigma_xi == 0.0:
            self.kind = "none"
        self._std = math.sqrt(self.sigma_xi)
        # uniform on [-w, w] has variance w^2/3
        self._half_width = math.sqrt(3.0 * self.sigma_xi)

    def draw(self, rng: RandomSource) -> float:
        if self.kind == "none":
            return 0.0
        if self.kind == "gaussian":
            return self._std * rng.standard_normal()
        return self._half_width * (2.0 * rng.uniform() - 1.0)


class NoisyOracle:
    """Stochastic complex oracle: noisy Re/Im evaluations of one function.

    Each call to :meth:`query_re` or :meth:`query_im` is a single oracle
    query (the counter increments by exactly one) and draws an independent
    noise realization from the oracle's own stream, so noise is independent
    of whatever direction randomness the caller uses.
    """

    __slots__ = ("function", "noise", "rng", "query_count")

    def __init__(
        self,
        function: AnalyticFunction,
        noise: NoiseModel | None = None,
        rng: RandomSource | None = None,
    ):
        self.function = function
        self.noise = noise if noise is not None else NoiseModel(0.0, "none")
        self.rng = rng if rng is not None else RandomSource(0)
        self.query_count = 0

    def _check_point(self, z: np.ndarray) -> None:
        f = self.function
        re = z.real
        if f.real_domain is not None:
            lo, hi = f.real_domain
            if re.min() < lo or re.max() > hi:
                raise DomainError(
                    f"{f.name}: real part outside domain [{lo}, {hi}]"
                )
        im = z.imag
        width = max(float(im.max()), -float(im.min()))
        if width > 0.0 and width >= f.strip(re):
            raise DomainError(
                f"{f.name}: imaginary width {width:g} outside holomorphy strip "
                f"(half-width {f.strip(re):g})"
            )

    def query_im(self, z: np.ndarray) -> float:
        """Im f(z) + fresh noise; one oracle query."""
        z = np.asarray(z, dtype=np.complex128)
        self._check_point(z)
        val = self.function.evaluate(z)
        self.query_count += 1
        return float(val.imag) + self.noise.draw(self.rng)

    def query_re(self, z: np.ndarray) -> float:
        """Re f(z) + fresh noise; one oracle query."""
        z = np.asarray(z, dtype=np.complex128)
        self._check_point(z)
        val = self.function.evaluate(z)
        self.query_count += 1
        return float(val.real) + self.noise.draw(self.rng)

    def true_value(self, x: np.ndarray) -> float:
        """Noiseless f(x) at a real point; not an oracle query.

        Reporting side channel so suboptimality traces stay honest about
        query accounting.
        """
        return self.function.value(x)

    def reference_gradient(self, x: np.ndarray) -> np.ndarray:
        if self.function.gradient is None:
            raise ValueError(f"{self.function.name} has no reference gradient")
        return self.function.gradient(np.asarray(x, dtype=np.float64))


# ---------------------------------------------------------------------------
# Built-in test corpus
# ---------------------------------------------------------------------------


def half_sq_norm(n: int) -> AnalyticFunction:
    """f(x) = (1/2) <x, x>; tau = L1 = 1, constant Hessian."""
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")

    def evaluate(z: np.ndarray) -> complex:
        return 0.5 * complex(np.dot(z, z))

    return AnalyticFunction(
        name="half_sq_norm",
        dim=n,
        evaluate=evaluate,
        strip_halfwidth=1.0,
        tau=1.0,
        l1=1.0,
        l2=0.0,
        minimizer=np.zeros(n),
        optimum=0.0,
        gradient=lambda x: x.copy(),
        params={"n": n},
    )


def _check_spd(P: np.ndarray, what: str) -> np.ndarray:
    P = np.asarray(P, dtype=np.float64)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise ValueError(f"{what} must be square, got shape {P.shape}")
    if not np.allclose(P, P.T, atol=1e-12 * max(1.0, float(np.abs(P).max()))):
        raise ValueError(f"{what} must be symmetric")
    return P


def quadratic(P: np.ndarray, q: np.ndarray, r: float = 0.0) -> AnalyticFunction:
    """f(x) = (1/2)<Px, x> + <q, x> + r with P symmetric positive definite."""
    P = _check_spd(P, "quadratic matrix")
    q = np.asarray(q, dtype=np.float64)
    n = P.shape[0]
    if q.shape != (n,):
        raise ValueError(f"linear term must have length {n}, got {q.shape}")
    eigs = np.linalg.eigvalsh(P)
    if eigs[0] <= 0.0:
        raise ValueError(f"quadratic matrix must be positive definite (min eig {eigs[0]:g})")
    x_star = np.linalg.solve(P, -q)
    f_star = float(0.5 * x_star @ P @ x_star + q @ x_star + r)

    def evaluate(z: np.ndarray) -> complex:
        return complex(0.5 * (z @ P @ z) + q @ z + r)

    return AnalyticFunction(
        name="quadratic",
        dim=n,
        evaluate=evaluate,
        strip_halfwidth=1.0,
        tau=float(eigs[0]),
        l1=float(eigs[-1]),
        l2=0.0,
        minimizer=x_star,
        optimum=f_star,
        gradient=lambda x: P @ x + q,
        params={"n": n},
    )


def regularized_ls(A: np.ndarray, b: np.ndarray, lam: float) -> AnalyticFunction:
    """f(x) = (1/2)||Ax - b||^2 + (lam/2)||x||^2, the l2-regularized least squares."""
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if A.ndim != 2 or b.shape != (A.shape[0],):
        raise ValueError(f"incompatible shapes A{A.shape}, b{b.shape}")
    if lam < 0.0:
        raise ValueError(f"regularization weight must be >= 0, got {lam}")
    n = A.shape[1]
    M = A.T @ A + lam * np.eye(n)
    eigs = np.linalg.eigvalsh(M)
    x_star = np.linalg.solve(M, A.T @ b)

    def evaluate(z: np.ndarray) -> complex:
        res = A @ z - b
        return complex(0.5 * np.dot(res, res) + 0.5 * lam * np.dot(z, z))

    fn = AnalyticFunction(
        name="regularized_ls",
        dim=n,
        evaluate=evaluate,
        strip_halfwidth=1.0,
        tau=float(eigs[0]),
        l1=float(eigs[-1]),
        l2=0.0,
        minimizer=x_star,
        gradient=lambda x: A.T @ (A @ x - b) + lam * x,
        params={"n": n, "m": A.shape[0], "lam": lam},
    )
    fn.optimum = fn.value(x_star)
    return fn


def quartic_regularized_ls(
    A: np.ndarray, b: np.ndarray, lam: float, quartic: float, radius: float = 1.0
) -> AnalyticFunction:
    """Regularized least squares plus quartic penalty ``quartic * sum(x_i^4)``.

    The quartic term keeps the function strongly convex with the same
    global modulus but gives it a genuinely non-constant Hessian, so this
    is the corpus member with nonzero L2.  The L1/L2 metadata are valid
    over the centred ball of the given radius.
    """
    base = regularized_ls(A, b, lam)
    if quartic < 0.0:
        raise ValueError(f"quartic weight must be >= 0, got {quartic}")
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    n = base.dim

    def evaluate(z: np.ndarray) -> complex:
        res = A @ z - b
        return complex(
            0.5 * np.dot(res, res) + 0.5 * lam * np.dot(z, z) + quartic * np.sum(z**4)
        )

    def grad(x: np.ndarray) -> np.ndarray:
        return A.T @ (A @ x - b) + lam * x + 4.0 * quartic * x**3

    x_star = _newton_minimize(
        grad,
        lambda x: A.T @ A + lam * np.eye(n) + np.diag(12.0 * quartic * x**2),
        np.asarray(base.minimizer, dtype=np.float64),
    )
    fn = AnalyticFunction(
        name="quartic_regularized_ls",
        dim=n,
        evaluate=evaluate,
        strip_halfwidth=1.0,
        tau=base.tau,
        l1=base.l1 + 12.0 * quartic * radius**2,
        l2=24.0 * quartic * radius,
        minimizer=x_star,
        gradient=grad,
        params={"n": n, "m": A.shape[0], "lam": lam, "quartic": quartic, "radius": radius},
    )
    fn.optimum = fn.value(x_star)
    return fn


def _newton_minimize(grad, hess, x0: np.ndarray, iters: int = 100) -> np.ndarray:
    """Damped Newton for smooth strongly convex functions (metadata only)."""
    x = x0.astype(np.float64).copy()
    for _ in range(iters):
        g = grad(x)
        if float(np.dot(g, g)) < 1e-30:
            break
        x = x - np.linalg.solve(hess(x), g)
    return x


_HIMMELBLAU_MINIMIZERS = np.array(
    [
        [3.0, 2.0],
        [-2.805118086952745, 3.1313125182505729],
        [-3.7793102533777469, -3.2831859912861694],
        [3.5844283403304917, -1.8481265269644297],
    ]
)


def himmelblau() -> AnalyticFunction:
    """The two-dimensional four-well polynomial benchmark.

    ``f(x, y) = (x^2 + y - 11)^2 + (x + y^2 - 7)^2``; all four global
    minimizers have value 0 and lie inside the radius-6 ball, over which
    the L1/L2 metadata bounds are computed.
    """

    def evaluate(z: np.ndarray) -> complex:
        a = z[0] * z[0] + z[1] - 11.0
        b = z[0] + z[1] * z[1] - 7.0
        return complex(a * a + b * b)

    def grad(x: np.ndarray) -> np.ndarray:
        a = x[0] * x[0] + x[1] - 11.0
        b = x[0] + x[1] * x[1] - 7.0
        return np.array([4.0 * x[0] * a + 2.0 * b, 2.0 * a + 4.0 * x[1] * b])

    # Hessian sup over the radius-6 ball, from a dense polar grid; the
    # 2x2 eigenvalues are closed-form.  Third-derivative tensor norm is
    # sqrt(576 (x^2+y^2) + 96) <= sqrt(576*36 + 96).
    rr = np.linspace(0.0, 6.0, 121)
    tt = np.linspace(0.0, 2.0 * math.pi, 241)
    gx = np.outer(rr, np.cos(tt)).ravel()
    gy = np.outer(rr, np.sin(tt)).ravel()
    hxx = 12.0 * gx * gx + 4.0 * gy - 42.0
    hyy = 12.0 * gy * gy + 4.0 * gx - 26.0
    hxy = 4.0 * (gx + gy)
    lam_max = 0.5 * (hxx + hyy) + np.sqrt(0.25 * (hxx - hyy) ** 2 + hxy**2)
    l1 = float(np.max(np.abs(lam_max)))
    l2 = math.sqrt(576.0 * 36.0 + 96.0)

    return AnalyticFunction(
        name="himmelblau",
        dim=2,
        evaluate=evaluate,
        strip_halfwidth=1.0,
        l1=l1,
        l2=l2,
        minimizer=_HIMMELBLAU_MINIMIZERS[0].copy(),
        optimum=0.0,
        gradient=grad,
        params={},
    )


def himmelblau_minimizers() -> np.ndarray:
    """All four global minimizers (reporting/diagnostics)."""
    return _HIMMELBLAU_MINIMIZERS.copy()


def log_scalar() -> AnalyticFunction:
    """f(x) = log x on x > 0; strip half-width 0.9x keeps the branch point out."""

    def evaluate(z: np.ndarray) -> complex:
        return complex(np.log(z[0]))

    return AnalyticFunction(
        name="log_scalar",
        dim=1,
        evaluate=evaluate,
        strip_halfwidth=0.9,
        strip_at=lambda x: 0.9 * float(abs(x[0])),
        real_domain=(1e-300, math.inf),
        l2=16.0,  # sup |f'''| = 2/x^3 on x >= 0.5
        gradient=lambda x: 1.0 / x,
        params={},
    )


def power_scalar(p: int) -> AnalyticFunction:
    """f(x) = x^p for integer p >= 1 (entire)."""
    p = int(p)
    if p < 1:
        raise ValueError(f"power must be >= 1, got {p}")

    def evaluate(z: np.ndarray) -> complex:
        return complex(z[0] ** p)

    l2 = float(p * (p - 1) * max(p - 2, 0)) * 1.5 ** max(p - 3, 0)  # on |x| <= 1.5
    return AnalyticFunction(
        name="power_scalar",
        dim=1,
        evaluate=evaluate,
        strip_halfwidth=1.0,
        l2=l2,
        gradient=lambda x: p * x ** (p - 1),
        params={"p": p},
    )


def bump_tail() -> AnalyticFunction:
    """f(x) = exp(-1/x) for x > 0, the classic smooth-but-not-analytic tail.

    Its lift exp(-1/(x+iy)) = exp(-x/(x^2+y^2)) (cos(y/(x^2+y^2)) +
    i sin(y/(x^2+y^2))) satisfies the Cauchy-Riemann equations away from 0,
    so the complex-step machinery applies even though the function is not
    real-analytic at the origin.  The lift is evaluated through exactly
    that expansion.
    """

    def evaluate(z: np.ndarray) -> complex:
        x, y = float(z[0].real), float(z[0].imag)
        r2 = x * x + y * y
        mag = math.exp(-x / r2)
        if y == 0.0:
            return complex(mag, 0.0)
        arg = y / r2
        return complex(mag * math.cos(arg), mag * math.sin(arg))

    def grad(x: np.ndarray) -> np.ndarray:
        return np.exp(-1.0 / x) / (x * x)

    return AnalyticFunction(
        name="bump_tail",
        dim=1,
        evaluate=evaluate,
        strip_halfwidth=0.4,
        real_domain=(1e-300, math.inf),
        l2=10.0,  # sup |f'''| on x >= 0.5 is below 5
        gradient=grad,
        params={},
    )


# ---------------------------------------------------------------------------
# Potential-flow objective
# ---------------------------------------------------------------------------


def disk_flow_velocity(radius, speed, x, y):
    """Velocity field induced by a disk moving along the negative x-axis.

    Doublet potential ``phi = speed * radius^2 * x / (x^2 + y^2)`` for a
    disk of the given radius moving with velocity (-speed, 0) through
    fluid at rest; the field is ``u = grad(phi)``.  Valid away from the
    origin; holomorphic in the radius, which is how the objective is
    complex-lifted.
    """
    rho2 = x * x + y * y
    scale = speed * radius * radius / (rho2 * rho2)
    ux = scale * (y * y - x * x)
    uy = -2.0 * scale * x * y
    return ux, uy


def validate_disk_flow(
    radius: float, speed: float, *, grid_points: int = 21, step: float = 1e-20
) -> dict:
    """Numerical certificate that the chosen flow field is the right one.

    Checks, on a grid over [-3, 3]^2 that excludes the disk, that the
    field is divergence-free and curl-free, and that the normal component
    matches the disk's own velocity on its boundary (the slip condition).
    Derivatives are taken by complex step in each coordinate, so the
    residuals are at rounding level when the field is genuinely potential.
    Returns the three max residuals.
    """
    coords = np.linspace(-3.0, 3.0, grid_points)
    div_max = 0.0
    curl_max = 0.0
    for px in coords:
        for py in coords:
            if math.hypot(px, py) <= radius + 0.1:
                continue
            ux_dx, uy_dx = disk_flow_velocity(radius, speed, px + 1j * step, py)
            ux_dy, uy_dy = disk_flow_velocity(radius, speed, px, py + 1j * step)
            div_max = max(div_max, abs(ux_dx.imag / step + uy_dy.imag / step))
            curl_max = max(curl_max, abs(uy_dx.imag / step - ux_dy.imag / step))
    theta = np.linspace(0.0, 2.0 * math.pi, 720, endpoint=False)
    slip_max = 0.0
    for t in theta:
        nx, ny = math.cos(t), math.sin(t)
        ux, uy = disk_flow_velocity(radius, speed, radius * nx, radius * ny)
        slip_max = max(slip_max, abs(ux * nx + uy * ny - (-speed) * nx))
    return {"div": div_max, "curl": curl_max, "slip": slip_max}


def pde_velocity_norm(speed: float = 2.0) -> AnalyticFunction:
    """Squared flow speed at the probe point (2, 2) as a function of disk radius.

    Objective of the PDE-constrained benchmark: choose the radius in [1, 2]
    of a disk moving at the given speed so the induced velocity at (2, 2)
    is smallest.  The closed-form field makes this a polynomial in the
    radius, evaluated through the complex lift of the field components.
    """
    if speed <= 0.0:
        raise ValueError(f"disk speed must be positive, got {speed}")

    def evaluate(z: np.ndarray) -> complex:
        ux, uy = disk_flow_velocity(z[0], speed, 2.0, 2.0)
        return complex(ux * ux + uy * uy)

    def grad(r: np.ndarray) -> np.ndarray:
        # d/dr of speed^2 r^4 / 64
        return speed * speed * r**3 / 16.0

    fn = AnalyticFunction(
        name="pde_velocity_norm",
        dim=1,
        evaluate=evaluate,
        strip_halfwidth=1.0,
        l1=10.0,
        l2=3.0 * speed * speed / 4.0,
        minimizer=np.array([1.0]),
        gradient=grad,
        params={"speed": speed},
    )
    fn.optimum = fn.value(np.array([1.0]))
    return fn


# ---------------------------------------------------------------------------
# Name-addressable registry (CLI surface)
# ---------------------------------------------------------------------------

BUILTIN_FUNCTIONS = {
    "half_sq_norm": half_sq_norm,
    "quadratic": quadratic,
    "regularized_ls": regularized_ls,
    "quartic_regularized_ls": quartic_regularized_ls,
    "himmelblau": himmelblau,
    "log_scalar": log_scalar,
    "power_scalar": power_scalar,
    "bump_tail": bump_tail,
    "pde_velocity_norm": pde_velocity_norm,
}


def make_builtin(name: str, **params) -> AnalyticFunction:
    """Construct a builtin by registry name (CLI/config entry point)."""
    try:
        ctor = BUILTIN_FUNCTIONS[name]
    except KeyError:
        known = ", ".join(sorted(BUILTIN_FUNCTIONS))
        raise ValueError(f"unknown function {name!r}; known: {known}") from None
    return ctor(**params)
