"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines and timings.  The heavy multi-seed experiments are shared through
module-scoped fixtures; everything is deterministic in the fixed master
seed below.
"""

import math
import time

import numpy as np
import pytest

from izo.algorithms import FeasibleSet, geometric_checkpoints, run_izo, tail_average
from izo.cli import main as cli_main
from izo.estimators import cs_gradient_sample
from izo.experiments import default_config, run_experiment
from izo.oracle import NoiseModel, NoisyOracle, half_sq_norm, quartic_regularized_ls
from izo.rng import RandomSource, derive_seed, sphere_block
from izo.schedules import make_schedule

SEED = 20260809


def _report(num: int, ok: bool, detail: str, started: float) -> None:
    status = "PASS" if ok else "FAIL"
    print(f"criterion {num:02d} {status} ({time.time() - started:.1f}s): {detail}")
    assert ok, f"criterion {num}: {detail}"


# ---------------------------------------------------------------------------
# Shared heavy runs
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def sweep_result():
    cfg = default_config("estimator_sweep")
    cfg.seed = SEED
    return run_experiment(cfg)


@pytest.fixture(scope="module")
def sc_quadratic_result():
    cfg = default_config("sc_quadratic")
    cfg.seed = SEED  # n=100, K=1e5, 25 repeats, sigma=1e-64, ball radius 1
    return run_experiment(cfg)


def _decade_medians(summary, arm):
    ks = summary["checkpoints"]
    med = summary["median_subopt"][arm]
    decades = [100, 1000, 10_000, 100_000]
    return decades, [med[ks.index(k)] for k in decades]


# ---------------------------------------------------------------------------
# Criteria
# ---------------------------------------------------------------------------


def test_criterion_01_estimator_stability(sweep_result):
    t0 = time.time()
    header, rows = sweep_result.tables[""]
    s = sweep_result.summary
    cs_tail = [
        r[3] for r in rows if 1e-300 <= r[0] <= 1e-8 and not math.isnan(r[3])
    ]
    n_tail = sum(1 for r in rows if 1e-300 <= r[0] <= 1e-8)
    ok = (
        s["min_err_cs"] <= 1e-15
        and s["min_err_fd"] >= 1e-9
        and s["min_err_cd"] >= 1e-11
        and len(cs_tail) == n_tail
        and max(cs_tail) <= 1e-13
    )
    _report(
        1, ok,
        f"min|cs-1|={s['min_err_cs']:.1e} (<=1e-15), min|fd-1|={s['min_err_fd']:.1e} "
        f"(>=1e-9), min|cd-1|={s['min_err_cd']:.1e} (>=1e-11), "
        f"max cs err on [1e-300,1e-8]={max(cs_tail):.1e} (<=1e-13)",
        t0,
    )


def test_criterion_02_sphere_identity():
    t0 = time.time()
    m = 1_000_000
    worst = 0.0
    for i, n in enumerate((2, 5, 20)):
        x = RandomSource(derive_seed(SEED, 200, i)).normals(n).copy()
        block = sphere_block(n, m, RandomSource(derive_seed(SEED, 201, i)))
        approx = (n / m) * (block.T @ (block @ x))
        ratio = np.linalg.norm(approx - x) / (np.linalg.norm(x) * math.sqrt(n / m))
        worst = max(worst, ratio)
    _report(2, worst <= 5.0, f"worst error ratio {worst:.2f} (<= 5)", t0)


def test_criterion_03_quadratic_unbiasedness_and_second_moment():
    t0 = time.time()
    n, delta, sigma, m = 8, 0.3, 1e-6, 1_000_000
    fn = half_sq_norm(n)
    x = RandomSource(derive_seed(SEED, 300)).normals(n)
    x = (x / np.linalg.norm(x)).copy()  # unit gradient scale
    oracle = NoisyOracle(fn, NoiseModel(sigma), RandomSource(derive_seed(SEED, 301)))
    rng = RandomSource(derive_seed(SEED, 302))
    mean = np.zeros(n)
    sq_norms = 0.0
    samples = np.empty((m, n))
    for i in range(m):
        g = cs_gradient_sample(oracle, x, delta, rng).g
        samples[i] = g
    mean = samples.mean(axis=0)
    sq_norms = float(np.einsum("ij,ij->i", samples, samples).mean())
    sigma_hat = math.sqrt(float(((samples - mean) ** 2).sum(axis=1).mean()))
    mean_err = float(np.linalg.norm(mean - x))
    mean_tol = 5.0 * sigma_hat / math.sqrt(m)
    want_second = n * float(x @ x) + n * n * sigma / delta**2
    second_rel = abs(sq_norms - want_second) / want_second
    ok = mean_err <= mean_tol and second_rel <= 0.05
    _report(
        3, ok,
        f"|mean-grad|={mean_err:.2e} (<= {mean_tol:.2e}); "
        f"E||g||^2 rel err={second_rel:.3%} (<= 5%)",
        t0,
    )


def test_criterion_04_quadratic_rate_slope(sc_quadratic_result):
    t0 = time.time()
    ks, med = _decade_medians(sc_quadratic_result.summary, "cs_delta1")
    slope = float(np.polyfit(np.log(ks), np.log(med), 1)[0])
    ok = -1.15 <= slope <= -0.80
    _report(4, ok, f"log-log slope of median subopt {slope:.3f} (in [-1.15, -0.80])", t0)


def test_criterion_05_cancellation_gap(sc_quadratic_result):
    t0 = time.time()
    summary = sc_quadratic_result.summary
    ks = summary["checkpoints"]
    i_final = ks.index(100_000)
    beta = summary["median_subopt"]["beta"][i_final]
    cs = summary["median_subopt"]["cs_delta1"][i_final]
    ratio = beta / cs
    # the tiny-smoothing run stays finite and keeps decaying
    tiny = summary["median_subopt"]["cs_delta1e100"]
    decaying = math.isfinite(tiny[i_final]) and tiny[i_final] < tiny[ks.index(100)]
    ok = ratio >= 1e3 and decaying
    _report(
        5, ok,
        f"beta/cs median ratio at K=1e5: {ratio:.1e} (>= 1e3); "
        f"delta=1e-100 run finite and decaying: {decaying}",
        t0,
    )


def _quartic_instance(n, m, lam, quartic, radius, seed, spread):
    """Quadratic-plus-quartic objective with a controlled spectrum."""
    raw = RandomSource(seed).normals(m * n).reshape(m, n).copy()
    u_mat, _, vt = np.linalg.svd(raw, full_matrices=False)
    A = u_mat @ np.diag(spread) @ vt
    b = RandomSource(derive_seed(seed, 1)).normals(m).copy()
    return quartic_regularized_ls(A, b, lam, quartic, radius=radius)


def test_criterion_06_general_sc_rate():
    t0 = time.time()
    n, m = 10, 20
    spread = np.linspace(1.0, 3.0, n)  # singular values of the design
    fn = _quartic_instance(n, m, 1e-4, 0.01, 2.0, derive_seed(SEED, 600), spread)
    radius = max(1.0, 2.0 * float(np.linalg.norm(fn.minimizer)))
    feasible = FeasibleSet.ball(np.zeros(n), radius)
    total = 100_000
    checkpoints = sorted(set(geometric_checkpoints(total)) | {100, 1000, 10_000, 100_000})
    sched = make_schedule("sc_constrained", n=n, delta=0.1, tau=fn.tau)
    subopts = []
    for rep in range(25):
        x1 = RandomSource(derive_seed(SEED, 601, rep)).normals(n).copy()
        oracle = NoisyOracle(fn, NoiseModel(1e-8), RandomSource(derive_seed(SEED, 602, rep)))
        tr = run_izo(
            oracle, feasible, sched, x1, total,
            RandomSource(derive_seed(SEED, 603, rep)),
            checkpoints=checkpoints, store_history=False,
        )
        subopts.append([fu - fn.optimum for fu in tr.f_uniform])
    med = np.median(np.array(subopts), axis=0)
    decades = [100, 1000, 10_000, 100_000]
    vals = [med[checkpoints.index(k)] for k in decades]
    slope = float(np.polyfit(np.log(decades), np.log(vals), 1)[0])
    ok = -1.05 <= slope <= -0.55
    _report(6, ok, f"log-log slope of median subopt {slope:.3f} (in [-1.05, -0.55])", t0)


def test_criterion_07_unconstrained_warmup():
    t0 = time.time()
    n, m = 5, 10
    spread = np.linspace(1.0, math.sqrt(2.0), n)
    fn = _quartic_instance(n, m, 1e-4, 0.01, 3.0, derive_seed(SEED, 700), spread)
    k0_hand = math.floor(8.0 * n * n * fn.l1**2 / fn.tau**2)
    total = 10 * k0_hand
    sched = make_schedule("sc_unconstrained", n=n, delta=0.1, tau=fn.tau, l1=fn.l1, total=total)
    assert sched.k0 == k0_hand
    improvements = []
    for rep in range(5):
        x1 = fn.minimizer + RandomSource(derive_seed(SEED, 701, rep)).normals(n)
        oracle = NoisyOracle(fn, NoiseModel(1e-8), RandomSource(derive_seed(SEED, 702, rep)))
        ck = sorted(set(geometric_checkpoints(total)) | {sched.k0})
        tr = run_izo(
            oracle, FeasibleSet.whole_space(), sched, x1, total,
            RandomSource(derive_seed(SEED, 703, rep)),
            checkpoints=ck, snapshot_at=[sched.k0],
        )
        assert np.isfinite(tr.final_x).all()
        at_k0 = tr.f_values[ck.index(sched.k0)] - fn.optimum
        tail = fn.value(tail_average(tr, sched.k0)) - fn.optimum
        improvements.append(at_k0 / tail)
    med_imp = float(np.median(improvements))
    ok = med_imp >= 10.0
    _report(
        7, ok,
        f"K0={k0_hand} (= floor(8 n^2 L1^2/tau^2)); all runs finite; "
        f"median suboptimality improvement at K=10*K0: {med_imp:.1f}x (>= 10x)",
        t0,
    )


def test_criterion_08_tau_estimation():
    t0 = time.time()
    cfg = default_config("tau_demo")
    cfg.seed = SEED
    cfg.total = 30_000
    res = run_experiment(cfg)
    s = res.summary
    brackets = [
        lam_ok and hat <= true + 1e-3
        for hat, true, lam_ok in zip(
            s["tau_hat"], s["tau_true"], (h >= s["lam"] for h in s["tau_hat"])
        )
    ]
    inf = float("inf")
    wins = sum(
        1
        for a, b in zip(s["iters_to_threshold_tauhat"], s["iters_to_threshold_tau0"])
        if (a if a is not None else inf) < (b if b is not None else inf)
    )
    frac = wins / len(s["tau_hat"])
    ok = all(brackets) and frac >= 0.8
    _report(
        8, ok,
        f"tau_hat in [lam, lam_min+lam+1e-3] for {sum(brackets)}/25 seeds; "
        f"tau-hat arm reaches 1e-6 first in {frac:.0%} of seeds (>= 80%)",
        t0,
    )


def test_criterion_09_basis_pursuit():
    t0 = time.time()
    cfg = default_config("ddp_demo")
    cfg.seed = SEED
    cfg.total = 10_000  # trace length; the pursuit itself is Z = n per run
    res = run_experiment(cfg)
    s = res.summary
    monotone_all = all(s["objective_monotone"])
    cert_ok = all(margin >= -1e-9 for margin in s["dd_certificate_margin"])
    ok = monotone_all and cert_ok and len(s["tau_hat"]) == 100
    _report(
        9, ok,
        f"objective nonincreasing in all {len(s['tau_hat'])} runs: {monotone_all}; "
        f"dd certificate margins >= -1e-9: {cert_ok}",
        t0,
    )


def test_criterion_10_nonconvex():
    t0 = time.time()
    cfg = default_config("nonconvex")
    cfg.seed = SEED
    cfg.params = {"arms": ["adapted"]}
    res = run_experiment(cfg)
    runs = res.summary["runs"]
    good = sum(1 for r in runs.values() if r["min_grad_norm_sq"] < 1e-2)
    ok = good >= 6 and len(runs) == 8
    _report(10, ok, f"min_k ||grad f(x_k)||^2 < 1e-2 for {good}/8 starts (>= 6/8)", t0)


def test_criterion_11_pde():
    t0 = time.time()
    cfg = default_config("pde")
    cfg.seed = SEED
    res = run_experiment(cfg)
    s = res.summary
    res_max = max(max(r.values()) for r in s["flow_residuals"].values())
    spread = s["spread"]
    ok = res_max < 1e-8 and spread <= 1e-2
    _report(
        11, ok,
        f"flow residuals {res_max:.1e} (< 1e-8); final radius spread "
        f"{spread:.2e} over 8 starts (<= 1e-2)",
        t0,
    )


def test_criterion_12_determinism(tmp_path):
    t0 = time.time()
    out = tmp_path / "det.csv"
    blobs = []
    for _ in range(2):
        code = cli_main([
            "sc_quadratic", "--seed", str(SEED), "--n", "8", "--K", "512",
            "--repeats", "3", "--out", str(out), "--no-plot",
        ])
        assert code == 0
        blobs.append(out.read_bytes())
    sweep = tmp_path / "sweep.csv"
    for _ in range(2):
        code = cli_main(["estimator_sweep", "--seed", str(SEED), "--out", str(sweep), "--no-plot"])
        assert code == 0
        blobs.append(sweep.read_bytes())
    ok = blobs[0] == blobs[1] and blobs[2] == blobs[3]
    _report(12, ok, "re-running with the same seed gives byte-identical CSVs", t0)
