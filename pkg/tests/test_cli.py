"""CLI surface: flags, config files, artifacts, exit codes, determinism."""

import json
import subprocess
import sys

import pytest

from izo.cli import main


def _run(argv):
    return main(argv)


class TestArtifacts:
    def test_sweep_writes_csv_summary_png(self, tmp_path):
        out = tmp_path / "sweep.csv"
        code = _run(["estimator_sweep", "--seed", "3", "--out", str(out)])
        assert code == 0
        assert out.exists()
        assert out.with_suffix(".summary.json").exists()
        assert out.with_suffix(".png").exists()
        text = out.read_text()
        assert text.startswith("# experiment=estimator_sweep")
        assert "delta,err_fd,err_cd,err_cs" in text

    def test_no_plot_skips_png(self, tmp_path):
        out = tmp_path / "s.csv"
        code = _run(["estimator_sweep", "--seed", "3", "--out", str(out), "--no-plot"])
        assert code == 0
        assert not out.with_suffix(".png").exists()

    def test_summary_reports_queries(self, tmp_path):
        out = tmp_path / "q.csv"
        code = _run([
            "sc_quadratic", "--seed", "2", "--n", "5", "--K", "64",
            "--repeats", "1", "--out", str(out), "--no-plot",
        ])
        assert code == 0
        summary = json.loads(out.with_suffix(".summary.json").read_text())
        assert summary["queries_per_run"]["cs_delta1"] == 64
        assert summary["queries_per_run"]["beta"] == 128  # two queries per step

    def test_companion_tables(self, tmp_path):
        out = tmp_path / "pde.csv"
        code = _run(["pde", "--seed", "2", "--K", "128", "--out", str(out), "--no-plot"])
        assert code == 0
        assert (tmp_path / "pde_radius.csv").exists()


class TestDeterminism:
    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (a, b):
            code = _run([
                "sc_quadratic", "--seed", "11", "--n", "6", "--K", "128",
                "--repeats", "2", "--out", str(out), "--no-plot",
            ])
            assert code == 0
        raw_a = a.read_bytes()
        raw_b = b.read_bytes()
        # identical modulo the echoed output path line
        strip = lambda raw: b"\n".join(
            l for l in raw.splitlines() if not l.startswith(b"# out=")
        )
        assert strip(raw_a) == strip(raw_b)

    def test_different_seed_differs(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        _run(["estimator_sweep", "--seed", "1", "--sigma-xi", "1e-8", "--out", str(a), "--no-plot"])
        _run(["estimator_sweep", "--seed", "2", "--sigma-xi", "1e-8", "--out", str(b), "--no-plot"])
        strip = lambda raw: b"\n".join(
            l for l in raw.splitlines() if not l.startswith(b"# ")
        )
        assert strip(a.read_bytes()) != strip(b.read_bytes())


class TestConfigFile:
    def test_flags_override_file(self, tmp_path):
        cfgfile = tmp_path / "cfg.txt"
        cfgfile.write_text(
            "experiment=estimator_sweep\nseed=1\nfunction=log_scalar\nout=ignored.csv\n"
        )
        out = tmp_path / "o.csv"
        code = _run([
            "estimator_sweep", "--config", str(cfgfile), "--seed", "9",
            "--out", str(out), "--no-plot",
        ])
        assert code == 0
        assert "# seed=9" in out.read_text()

    def test_json_config(self, tmp_path):
        cfgfile = tmp_path / "cfg.json"
        cfgfile.write_text(json.dumps({"experiment": "estimator_sweep", "seed": 4}))
        out = tmp_path / "o.csv"
        assert _run(["estimator_sweep", "--config", str(cfgfile), "--out", str(out), "--no-plot"]) == 0

    def test_wrong_experiment_in_config(self, tmp_path):
        cfgfile = tmp_path / "cfg.txt"
        cfgfile.write_text("experiment=pde\nseed=1\n")
        assert _run(["estimator_sweep", "--config", str(cfgfile), "--no-plot"]) == 1


class TestExitCodes:
    def test_missing_seed_is_config_error(self, capsys):
        assert _run(["estimator_sweep", "--no-plot"]) == 1
        assert "seed" in capsys.readouterr().err

    def test_unknown_function_is_config_error(self, tmp_path):
        out = tmp_path / "x.csv"
        code = _run([
            "estimator_sweep", "--seed", "1", "--function", "rosenbrock",
            "--out", str(out), "--no-plot",
        ])
        assert code == 1

    def test_numerical_abort_is_exit_two(self, tmp_path, capsys):
        # unconstrained run with subnormal smoothing: the noise term
        # n/delta * xi overflows and the iterate goes non-finite
        out = tmp_path / "x.csv"
        code = _run([
            "nonconvex", "--seed", "1", "--K", "200", "--set", "none",
            "--delta", "1e-300", "--out", str(out), "--no-plot",
        ])
        assert code == 2
        assert "non-finite" in capsys.readouterr().err

    def test_bad_feasible_spec(self, tmp_path):
        code = _run([
            "sc_quadratic", "--seed", "1", "--n", "4", "--K", "16", "--repeats", "1",
            "--set", "polygon:3", "--out", str(tmp_path / "y.csv"), "--no-plot",
        ])
        assert code == 1


def test_console_entry_point(tmp_path):
    out = tmp_path / "cli.csv"
    proc = subprocess.run(
        [sys.executable, "-m", "izo.cli", "estimator_sweep", "--seed", "1",
         "--out", str(out), "--no-plot"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert "wrote" in proc.stdout
    assert out.exists()
