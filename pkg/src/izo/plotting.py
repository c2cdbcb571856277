"""Figure rendering for the benchmark commands.

Each experiment gets one PNG next to its CSV; the CSV stays the primary
(deterministic) artifact and the figures are a quick visual check of the
same rows.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .experiments import ExperimentResult

__all__ = ["render"]


def _rows(result: ExperimentResult, table: str = ""):
    header, rows = result.tables[table]
    cols = {name: i for i, name in enumerate(header)}
    return cols, rows


def _by_run(result: ExperimentResult, value_col: str, table: str = ""):
    cols, rows = _rows(result, table)
    out: dict[str, tuple[list, list]] = {}
    for row in rows:
        ks, vs = out.setdefault(row[cols["run_id"]], ([], []))
        ks.append(row[cols["k"]])
        vs.append(row[cols[value_col]])
    return out


def _plot_estimator_sweep(result: ExperimentResult, ax) -> None:
    cols, rows = _rows(result)
    deltas = [r[cols["delta"]] for r in rows]
    for name, label in (("err_fd", "forward"), ("err_cd", "central"), ("err_cs", "complex step")):
        errs = [r[cols[name]] for r in rows]
        pts = [(d, e) for d, e in zip(deltas, errs) if e is not None and not math.isnan(e) and e > 0]
        if pts:
            ax.loglog(*zip(*pts), label=label)
    ax.set_xlabel("step size")
    ax.set_ylabel("absolute error")
    ax.invert_xaxis()
    ax.legend()


def _plot_imlift_surface(result: ExperimentResult, ax) -> None:
    cols, rows = _rows(result)
    powers = sorted({r[cols["p"]] for r in rows}, reverse=True)
    y_show = 1e-8
    for p in powers:
        xs = [r[cols["x"]] for r in rows if r[cols["p"]] == p and r[cols["y"]] == y_show]
        vs = [r[cols["imlift"]] for r in rows if r[cols["p"]] == p and r[cols["y"]] == y_show]
        ax.plot(xs, vs, label=f"p={p}")
    ax.set_xlabel("x")
    ax.set_ylabel("lifted derivative estimate")
    ax.set_yscale("symlog")
    ax.legend()


def _plot_median_subopt(result: ExperimentResult, ax) -> None:
    ks = result.summary["checkpoints"]
    for arm, med in result.summary["median_subopt"].items():
        ax.loglog(ks, np.maximum(med, 1e-300), label=arm)
    ax.set_xlabel("iterations")
    ax.set_ylabel("median suboptimality")
    ax.legend()


def _plot_runs(result: ExperimentResult, ax, value_col: str, *, table: str = "",
               logy: bool = True, floor: float = 1e-300) -> None:
    for run_id, (ks, vs) in _by_run(result, value_col, table).items():
        clean = [(k, v) for k, v in zip(ks, vs) if v is not None]
        if not clean:
            continue
        ks2, vs2 = zip(*clean)
        if logy:
            vs2 = np.maximum(vs2, floor)
        ax.plot(ks2, vs2, alpha=0.6, label=run_id)
    ax.set_xscale("log")
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel("iterations")
    ax.set_ylabel(value_col)
    if len(_by_run(result, value_col, table)) <= 10:
        ax.legend(fontsize=7)


def render(result: ExperimentResult, path: str) -> None:
    """Render the figure for one experiment result to `path`."""
    name = result.config.experiment
    if name in ("pde", "ddp_demo"):
        fig, axes = plt.subplots(1, 2, figsize=(9.6, 3.6))
    else:
        fig, ax = plt.subplots(figsize=(5.2, 3.9))
    if name == "estimator_sweep":
        _plot_estimator_sweep(result, ax)
    elif name == "imlift_surface":
        _plot_imlift_surface(result, ax)
    elif name == "sc_quadratic":
        _plot_median_subopt(result, ax)
    elif name == "tau_demo":
        _plot_runs(result, ax, "subopt")
    elif name == "nonconvex":
        _plot_runs(result, ax, "subopt")
    elif name == "pde":
        _plot_runs(result, axes[0], "subopt")
        _plot_runs(result, axes[1], "r_k", table="radius", logy=False)
        axes[1].set_ylabel("disk radius")
    elif name == "ddp_demo":
        _plot_runs(result, axes[0], "subopt")
        for run_id, (zs, taus) in _by_run(result, "tau_z", table="pursuit").items():
            axes[1].plot(zs, taus, alpha=0.4)
        axes[1].set_xlabel("pursuit iteration")
        axes[1].set_ylabel("tau estimate")
        axes[1].set_yscale("log")
    fig.suptitle(name)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
