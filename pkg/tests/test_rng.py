"""Generator determinism and sampler distribution checks."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from izo.rng import (
    DimensionError,
    RandomSource,
    complex_shift,
    derive_seed,
    sample_unit_ball,
    sample_unit_sphere,
    sphere_block,
)

EPS = np.finfo(np.float64).eps


def test_same_seed_same_stream():
    a = RandomSource(123456789)
    b = RandomSource(123456789)
    assert np.array_equal(a.uint64(1000), b.uint64(1000))
    assert np.array_equal(a.normals(333), b.normals(333))
    assert np.array_equal(a.uniforms(57), b.uniforms(57))


def test_different_seeds_differ():
    a = RandomSource(1).uint64(64)
    b = RandomSource(2).uint64(64)
    assert not np.array_equal(a, b)


def test_stream_is_pure_function_of_state():
    # drawing in chunks consumes the same underlying word stream
    a = RandomSource(7)
    got = np.concatenate([a.uint64(3), a.uint64(5)])
    assert np.array_equal(got, RandomSource(7).uint64(8))


def test_uniforms_in_unit_interval():
    u = RandomSource(3).uniforms(100_000)
    assert u.min() >= 0.0 and u.max() < 1.0
    assert abs(u.mean() - 0.5) < 0.01


def test_normals_moments():
    g = RandomSource(11).normals(200_000)
    assert abs(g.mean()) < 0.01
    assert abs(g.std() - 1.0) < 0.01


@given(st.integers(min_value=0, max_value=2**64 - 1))
@settings(max_examples=25, deadline=None)
def test_derive_seed_in_range(master):
    child = derive_seed(master, 4, 2)
    assert 0 <= child < 2**64
    assert child != derive_seed(master, 4, 3)


class TestSphere:
    def test_dimension_error(self):
        with pytest.raises(DimensionError):
            sample_unit_sphere(0, RandomSource(1))

    def test_n1_is_sign(self):
        # the zero-sphere is {-1, +1}, each with probability 1/2
        vals = [float(sample_unit_sphere(1, RandomSource(s))[0]) for s in range(200)]
        assert set(vals) == {-1.0, 1.0}
        frac = sum(1 for v in vals if v > 0) / len(vals)
        assert 0.35 < frac < 0.65

    @pytest.mark.parametrize("n", [2, 3, 7, 50])
    def test_unit_norm(self, n):
        rng = RandomSource(5)
        for _ in range(50):
            u = sample_unit_sphere(n, rng)
            assert abs(np.linalg.norm(u) - 1.0) <= 4 * EPS

    def test_coordinate_means(self):
        # CLT bound 3/sqrt(M) on mean of unit-variance/sqrt(n) coordinates
        m = 100_000
        block = sphere_block(5, m, RandomSource(17))
        assert np.abs(block.mean(axis=0)).max() < 0.02

    def test_block_matches_distribution_scale(self):
        block = sphere_block(3, 50_000, RandomSource(23))
        norms = np.linalg.norm(block, axis=1)
        assert np.abs(norms - 1.0).max() <= 8 * EPS
        # E[u_i^2] = 1/n
        assert abs((block[:, 0] ** 2).mean() - 1.0 / 3.0) < 0.01


class TestBall:
    def test_dimension_error(self):
        with pytest.raises(DimensionError):
            sample_unit_ball(0, RandomSource(1))

    def test_n1_interval(self):
        rng = RandomSource(2)
        vals = [float(sample_unit_ball(1, rng)[0]) for _ in range(500)]
        assert all(-1.0 <= v <= 1.0 for v in vals)

    def test_inside_ball(self):
        rng = RandomSource(3)
        for _ in range(200):
            v = sample_unit_ball(3, rng)
            assert np.linalg.norm(v) <= 1.0 + 4 * EPS

    def test_volume_fraction(self):
        # fraction with ||v|| <= 1/2 equals (1/2)^2 in two dimensions
        rng = RandomSource(19)
        m = 100_000
        inside = sum(
            1 for _ in range(m) if np.linalg.norm(sample_unit_ball(2, rng)) <= 0.5
        )
        assert abs(inside / m - 0.25) < 0.01


class TestComplexShift:
    def test_basic(self):
        z = complex_shift(np.array([1.0, 2.0]), np.array([0.0, 1.0]), 0.5)
        assert z[0] == 1.0 + 0.0j
        assert z[1] == 2.0 + 0.5j

    def test_tiny_delta_exact(self):
        # construction is cancellation-free: the imaginary part is the
        # exact rounded product even at 1e-100
        z = complex_shift(np.array([3.0, 4.0]), np.array([1.0, 0.0]), 1e-100)
        assert z[0].real == 3.0 and z[1].real == 4.0
        assert z[0].imag == 1e-100 and z[1].imag == 0.0

    def test_zero_inputs(self):
        z = complex_shift(np.zeros(3), np.zeros(3), 1.0)
        assert np.all(z == 0.0)

    def test_length_mismatch(self):
        with pytest.raises(DimensionError):
            complex_shift(np.zeros(2), np.zeros(3), 1.0)


def test_sphere_integral_identity():
    # (n/M) sum <x,u> u approximates x with error <= 5 ||x|| sqrt(n/M)
    m = 1_000_000
    for n, seed in ((2, 101), (5, 102), (20, 103)):
        rng = RandomSource(seed)
        x = RandomSource(seed + 50).normals(n).copy()
        block = sphere_block(n, m, rng)
        approx = (n / m) * (block.T @ (block @ x))
        err = np.linalg.norm(approx - x)
        assert err <= 5.0 * np.linalg.norm(x) * math.sqrt(n / m)
