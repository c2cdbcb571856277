"""Seeded randomness plus uniform sampling on spheres and balls.

Everything downstream (direction draws, oracle noise, experiment setup)
consumes :class:`RandomSource`, a small counter-based generator kept
in-repo so that streams are reproducible bit-for-bit from a 64-bit seed
and do not depend on the host library's generator evolution.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "DimensionError",
    "RandomSource",
    "derive_seed",
    "sample_unit_sphere",
    "sample_unit_ball",
    "sphere_block",
    "complex_shift",
]

_MASK64 = 0xFFFFFFFFFFFFFFFF
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 2.0**-53
_TWO_PI = 2.0 * math.pi

# Minimum block size for the Box-Muller buffer; amortizes numpy call
# overhead when normals are popped one or a few at a time.
_NORMAL_BLOCK = 4096


class DimensionError(ValueError):
    """A sampler or vector operation was given an invalid dimension."""


def _mix(words: np.ndarray) -> np.ndarray:
    # uint64 arithmetic is modular by design here
    with np.errstate(over="ignore"):
        z = (words ^ (words >> _S30)) * _MIX1
        z = (z ^ (z >> _S27)) * _MIX2
        return z ^ (z >> _S31)


class RandomSource:
    """Counter-based 64-bit generator (SplitMix64 output function).

    Draw ``i`` of the stream is ``mix64(seed + (i+1) * golden)``, a pure
    function of ``(seed, counter)``.  Identical seeds therefore produce
    bit-identical streams for identical draw sequences, and the state
    never depends on what the sampled values were used for.

    Not thread-safe; use one instance per thread of execution.
    """

    __slots__ = ("seed", "_counter", "_normal_buf", "_normal_pos", "_block")

    def __init__(self, seed: int):
        self.seed = int(seed) & _MASK64
        self._counter = 0
        self._normal_buf = np.empty(0, dtype=np.float64)
        self._normal_pos = 0
        self._block = 32  # grows geometrically up to _NORMAL_BLOCK

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"RandomSource(seed={self.seed}, counter={self._counter})"

    def uint64(self, count: int) -> np.ndarray:
        """Next `count` raw 64-bit words of the stream."""
        idx = np.arange(
            self._counter + 1, self._counter + count + 1, dtype=np.uint64
        )
        self._counter += count
        with np.errstate(over="ignore"):
            words = np.uint64(self.seed) + idx * _GOLDEN
        return _mix(words)

    def uniforms(self, count: int) -> np.ndarray:
        """`count` doubles uniform on [0, 1), 53 random bits each."""
        return (self.uint64(count) >> _S11).astype(np.float64) * _INV53

    def uniform(self) -> float:
        return float(self.uniforms(1)[0])

    def _refill_normals(self, need: int) -> None:
        # sources drawn from heavily get big blocks; one-shot sources stay cheap
        pairs = max((need + 1) // 2, self._block)
        self._block = min(2 * self._block, _NORMAL_BLOCK)
        u1 = self.uniforms(pairs)
        u2 = self.uniforms(pairs)
        # Box-Muller, branch-free;  1 - u1 lies in (0, 1] so the log is finite.
        radius = np.sqrt(-2.0 * np.log1p(-u1))
        angle = _TWO_PI * u2
        buf = np.empty(2 * pairs, dtype=np.float64)
        buf[0::2] = radius * np.cos(angle)
        buf[1::2] = radius * np.sin(angle)
        self._normal_buf = buf
        self._normal_pos = 0

    def normals(self, count: int) -> np.ndarray:
        """`count` standard normal deviates (buffered Box-Muller pairs).

        May return a read-view into the internal buffer; the buffer is
        replaced (never rewritten) on refill, so served values are stable.
        """
        pos = self._normal_pos
        if self._normal_buf.size - pos >= count:
            self._normal_pos = pos + count
            return self._normal_buf[pos : pos + count]
        out = np.empty(count, dtype=np.float64)
        filled = 0
        while filled < count:
            avail = self._normal_buf.size - self._normal_pos
            if avail == 0:
                self._refill_normals(count - filled)
                avail = self._normal_buf.size
            take = min(avail, count - filled)
            out[filled : filled + take] = self._normal_buf[
                self._normal_pos : self._normal_pos + take
            ]
            self._normal_pos += take
            filled += take
        return out

    def standard_normal(self) -> float:
        pos = self._normal_pos
        if pos < self._normal_buf.size:
            self._normal_pos = pos + 1
            return float(self._normal_buf[pos])
        return float(self.normals(1)[0])


def derive_seed(master: int, *indices: int) -> int:
    """Stable child seed from a master seed and an index path.

    Used to give each repeat / oracle / initial condition of an experiment
    an independent stream while keeping the whole experiment a function of
    one configured seed.
    """
    word = int(master) & _MASK64
    golden = 0x9E3779B97F4A7C15
    for ix in indices:
        word = ((word + ((int(ix) + 1) & _MASK64)) * golden) & _MASK64
        word = ((word ^ (word >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        word = ((word ^ (word >> 27)) * 0x94D049BB133111EB) & _MASK64
        word = word ^ (word >> 31)
    return word


def sample_unit_sphere(n: int, rng: RandomSource) -> np.ndarray:
    """One point uniform on the unit sphere in R^n (normalized Gaussian)."""
    if n < 1:
        raise DimensionError(f"sphere dimension must be >= 1, got {n}")
    while True:
        g = rng.normals(n)
        norm = math.sqrt(float(np.dot(g, g)))
        if norm > 0.0:
            return g / norm


def sphere_block(n: int, count: int, rng: RandomSource) -> np.ndarray:
    """`count` independent uniform sphere points as a (count, n) array.

    Same distribution as repeated :func:`sample_unit_sphere`; used by
    Monte-Carlo heavy callers where a per-sample Python loop would dominate.
    """
    if n < 1:
        raise DimensionError(f"sphere dimension must be >= 1, got {n}")
    g = rng.normals(n * count).reshape(count, n)
    norms = np.sqrt(np.einsum("ij,ij->i", g, g))
    bad = norms == 0.0
    while bad.any():  # pragma: no cover - probability ~2^-53 per row
        k = int(bad.sum())
        g[bad] = rng.normals(n * k).reshape(k, n)
        norms[bad] = np.sqrt(np.einsum("ij,ij->i", g[bad], g[bad]))
        bad = norms == 0.0
    return g / norms[:, None]


def sample_unit_ball(n: int, rng: RandomSource) -> np.ndarray:
    """One point uniform on the unit ball: r * u with r = U^(1/n)."""
    if n < 1:
        raise DimensionError(f"ball dimension must be >= 1, got {n}")
    u = sample_unit_sphere(n, rng)
    radius = rng.uniform() ** (1.0 / n)
    return radius * u


def complex_shift(x: np.ndarray, u: np.ndarray, delta: float) -> np.ndarray:
    """The complex test point x + i*delta*u, built componentwise.

    The only rounding is in the product delta * u_j; there is no
    subtraction anywhere, which is what makes the downstream derivative
    estimates cancellation-free.
    """
    x = np.asarray(x, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    if x.shape != u.shape:
        raise DimensionError(
            f"point and direction must have equal length, got {x.shape} and {u.shape}"
        )
    if delta <= 0.0:
        raise ValueError(f"shift size must be positive, got {delta}")
    z = np.empty(x.shape, dtype=np.complex128)
    z.real = x
    z.imag = delta * u
    return z
