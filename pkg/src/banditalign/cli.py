"""Command-line entry point.

Subcommands:

  run     execute an experiment described by a flat key=value config file
  verify  run the oracle suites and emit a JSON report (exit 1 on failure)
  slope   fit a log-log slope to an aggregate CSV over a time window
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .harness import (
    load_config,
    loglog_slope,
    read_aggregate_csv,
    run_experiment,
    run_verification,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="banditalign",
        description="Alignment-bandit simulation harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run an experiment from a config file")
    run_p.add_argument("--config", required=True, type=Path)
    run_p.add_argument("--output-dir", type=Path, default=None, help="override the config's output_dir")
    run_p.add_argument("--threads", type=int, default=1, help="parallel episode workers")

    verify_p = sub.add_parser("verify", help="run the oracle suites")
    verify_p.add_argument(
        "--quick", action="store_true", help="reduced grids for a fast smoke check"
    )

    slope_p = sub.add_parser("slope", help="log-log slope of an aggregate CSV")
    slope_p.add_argument("--input", required=True, type=Path)
    slope_p.add_argument("--tmin", required=True, type=int)
    slope_p.add_argument("--tmax", required=True, type=int)
    slope_p.add_argument("--agent", default=None, help="restrict to one agent_id")
    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    if args.output_dir is not None:
        cfg = replace(cfg, output_dir=args.output_dir)
    curves = run_experiment(cfg, threads=args.threads)
    for agent_id, curve in curves.items():
        print(
            f"{agent_id}: final mean cumulative regret "
            f"{curve.mean_cum_regret[-1]:.2f} +/- {curve.stderr[-1]:.2f} "
            f"({curve.n_seeds} seeds)"
        )
    print(f"wrote traces and aggregate.csv to {cfg.output_dir}")
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    if args.quick:
        report = run_verification(
            solver_instances=25, mi_grid_max=8, bounds_grid_max=32, ts_seeds=2, ts_horizon=2000
        )
    else:
        report = run_verification()
    print(json.dumps(report.to_dict(), indent=2))
    return 0 if report.passed else 1


def _cmd_slope(args: argparse.Namespace) -> int:
    try:
        curves = read_aggregate_csv(args.input)
        if args.agent is not None:
            if args.agent not in curves:
                raise ValueError(f"agent {args.agent!r} not in {sorted(curves)}")
            curves = {args.agent: curves[args.agent]}
        for agent_id in sorted(curves):
            slope = loglog_slope(curves[agent_id], args.tmin, args.tmax)
            print(f"{agent_id}\t{slope:.6f}")
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "verify":
        return _cmd_verify(args)
    if args.command == "slope":
        return _cmd_slope(args)
    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
