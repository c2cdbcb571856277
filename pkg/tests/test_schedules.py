"""Schedule laws, warm-up lengths, and configuration validation."""

import numpy as np
import pytest

from izo.schedules import REGIMES, ScheduleError, baseline_smoothing, make_schedule


class TestLaws:
    def test_sc_constrained(self):
        s = make_schedule("sc_constrained", n=4, delta=0.5, tau=2.0)
        assert s.stepsize(1) == pytest.approx(1.0)
        assert s.stepsize(10) == pytest.approx(0.1)
        assert s.smoothing(1) == pytest.approx(0.5)
        assert s.smoothing(64) == pytest.approx(0.5 * 64 ** (-1 / 6))

    def test_quad_constrained_constant_smoothing(self):
        s = make_schedule("quad_constrained", n=4, delta=0.3, tau=1.0)
        assert all(s.smoothing(k) == 0.3 for k in (1, 10, 1000))

    def test_sc_unconstrained_warmup_length(self):
        s = make_schedule("sc_unconstrained", n=10, delta=0.1, tau=1.0, l1=1.0, total=2000)
        assert s.k0 == 800  # floor(8 n^2 L1^2 / tau^2)
        assert s.stepsize(1) == pytest.approx(1.0 / 2000)
        assert s.stepsize(800) == pytest.approx(1.0 / 2000)
        assert s.stepsize(801) == pytest.approx(2.0 / 801)
        assert s.smoothing(5) == pytest.approx(0.1 * 2000 ** (-1 / 6))
        assert s.smoothing(801) == pytest.approx(0.1 * 801 ** (-1 / 6))

    def test_quad_unconstrained_warmup_length(self):
        s = make_schedule("quad_unconstrained", n=10, delta=0.1, tau=1.0, l1=1.0, total=100)
        assert s.k0 == 40  # floor(4 n L1^2 / tau^2)
        assert s.smoothing(3) == 0.1 and s.smoothing(90) == 0.1

    def test_nonconvex(self):
        s = make_schedule("nonconvex", n=2, delta=1e-6, l1=10.0)
        assert s.stepsize(1) == pytest.approx(1.0 / 20.0)
        assert s.stepsize(8) == pytest.approx(1.0 / (20.0 * 4.0))
        assert s.smoothing(64) == pytest.approx(1e-6 * 0.5)

    def test_anytime(self):
        s = make_schedule("anytime_unconstrained", n=2, delta=0.1, tau=1.0, l1=1.0)
        assert s.k0 == 32
        assert s.stepsize(1) == pytest.approx(1.0 / 65.0)

    def test_online(self):
        s = make_schedule("online_quadratic", n=3, delta=0.2, tau=0.5)
        assert s.stepsize(4) == pytest.approx(1.0)
        assert s.smoothing(4) == 0.2


class TestValidation:
    def test_unknown_regime(self):
        with pytest.raises(ScheduleError):
            make_schedule("momentum", n=2, delta=0.1, tau=1.0)

    def test_missing_tau(self):
        with pytest.raises(ScheduleError):
            make_schedule("sc_constrained", n=2, delta=0.1)

    def test_missing_l1(self):
        with pytest.raises(ScheduleError):
            make_schedule("nonconvex", n=2, delta=0.1)

    def test_horizon_too_short_reports_k0(self):
        with pytest.raises(ScheduleError, match="K0 = 800"):
            make_schedule("sc_unconstrained", n=10, delta=0.1, tau=1.0, l1=1.0, total=100)

    def test_bad_delta(self):
        with pytest.raises(ScheduleError):
            make_schedule("sc_constrained", n=2, delta=0.0, tau=1.0)

    @pytest.mark.parametrize("regime", REGIMES)
    def test_positivity(self, regime):
        kwargs = dict(n=3, delta=0.25, tau=1.5, l1=2.0)
        if regime in ("sc_unconstrained", "quad_unconstrained"):
            kwargs["total"] = 10_000_000
        s = make_schedule(regime, **kwargs)
        for k in (1, 7, 5000):
            assert s.stepsize(k) > 0.0
            assert 0.0 < s.smoothing(k) <= 0.25


class TestArrays:
    @pytest.mark.parametrize("regime", REGIMES)
    def test_arrays_match_scalars(self, regime):
        kwargs = dict(n=3, delta=0.25, tau=1.5, l1=2.0)
        total = 500
        if regime in ("sc_unconstrained", "quad_unconstrained"):
            kwargs["total"] = total = 10_000_000
        s = make_schedule(regime, **kwargs)
        count = min(total, 500)
        mu = s.stepsize_array(count)
        dl = s.smoothing_array(count)
        for k in (1, 2, 17, 499):
            assert mu[k - 1] == pytest.approx(s.stepsize(k), rel=1e-15)
            assert dl[k - 1] == pytest.approx(s.smoothing(k), rel=1e-15)


class TestBaselineSmoothing:
    def test_formula_substitution(self):
        # n=1, sigma=1: delta_1 = (3 / 13)^(1/4)
        got = baseline_smoothing(1, 1, 1.0)
        assert got == pytest.approx((3.0 / 13.0) ** 0.25)

    def test_tiny_noise_below_rounding(self):
        # at sigma = 1e-64 and n=100 the law stays under 1e-15 for all k
        deltas = baseline_smoothing(np.arange(1, 100_001), 100, 1e-64)
        assert deltas.max() < 1e-15
