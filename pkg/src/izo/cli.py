"""Command-line harness for the benchmark experiments.

Every command writes a self-describing CSV (config echoed in a ``#``
preamble), a ``.summary.json`` with per-run query totals, and a PNG figure
rendered from the same rows (``--no-plot`` skips it).  Runs are
deterministic in ``--seed``: identical configurations produce
byte-identical CSVs.

Exit codes: 0 success, 1 configuration error, 2 numerical abort
(non-finite iterate).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .algorithms import NonFiniteIterateError
from .experiments import (
    EXPERIMENTS,
    ConfigError,
    ExperimentConfig,
    default_config,
    run_experiment,
    write_csv,
    write_summary,
)
from .schedules import ScheduleError

__all__ = ["main", "build_parser"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="izo",
        description="Zeroth-order optimization benchmarks with the complex-step estimator",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in sorted(EXPERIMENTS):
        cmd = sub.add_parser(name, help=f"run the {name} experiment")
        cmd.add_argument("--config", metavar="FILE", help="key=value or JSON config file")
        cmd.add_argument("--function", metavar="NAME", help="builtin objective name")
        cmd.add_argument("--n", type=int, help="problem dimension")
        cmd.add_argument("--K", type=int, dest="total", help="iteration horizon")
        cmd.add_argument("--repeats", type=int, help="number of seeded repeats")
        cmd.add_argument("--seed", type=int, help="master seed (required)")
        cmd.add_argument("--delta", type=float, help="smoothing scale")
        cmd.add_argument("--sigma-xi", type=float, dest="sigma_xi", help="oracle noise variance bound")
        cmd.add_argument("--schedule", metavar="NAME", help="schedule regime name")
        cmd.add_argument(
            "--set", dest="feasible", metavar="SPEC", help="feasible set: ball:R | box:LO,HI | none"
        )
        cmd.add_argument("--out", metavar="PATH", help="output CSV path")
        cmd.add_argument("--no-plot", action="store_true", help="skip the PNG figure")
    return parser


def _load_config(command: str, args: argparse.Namespace) -> ExperimentConfig:
    cfg = default_config(command)
    if args.config:
        try:
            text = Path(args.config).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from None
        file_cfg = ExperimentConfig.from_text(text)
        if file_cfg.experiment and file_cfg.experiment != command:
            raise ConfigError(
                f"config file is for {file_cfg.experiment!r} but the command is {command!r}"
            )
        merged = cfg.to_dict()
        for key, value in file_cfg.to_dict().items():
            if key == "experiment":
                continue
            if value not in (None, "", 0, {}):
                merged[key] = value
        merged["experiment"] = command
        cfg = ExperimentConfig.from_dict(merged)
    # flags override file values
    for attr in ("function", "n", "total", "repeats", "seed", "delta", "sigma_xi", "feasible", "out"):
        value = getattr(args, attr, None)
        if value is not None:
            setattr(cfg, attr, value)
    if args.schedule is not None:
        cfg.schedule = args.schedule
    if cfg.seed is None:
        raise ConfigError("--seed is required (reproducibility is part of the contract)")
    if not cfg.out:
        cfg.out = f"{command}.csv"
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args.command, args)
        result = run_experiment(cfg)
    except (ConfigError, ScheduleError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except NonFiniteIterateError as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return 2

    out = Path(cfg.out)
    header, rows = result.tables[""]
    write_csv(out, cfg, header, rows)
    written = [str(out)]
    for name, (hdr, tbl) in result.tables.items():
        if name == "":
            continue
        side = out.with_name(f"{out.stem}_{name}.csv")
        write_csv(side, cfg, hdr, tbl)
        written.append(str(side))
    summary_path = out.with_suffix(".summary.json")
    write_summary(summary_path, result.summary)
    written.append(str(summary_path))
    if not args.no_plot:
        from .plotting import render  # deferred: matplotlib import is slow

        png = out.with_suffix(".png")
        render(result, png)
        written.append(str(png))
    for path in written:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
