"""Command-line chart rendering from aggregate CSVs."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .charts import STYLES, SchemaError, parse_reference, plot_regret


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="banditalign-plots",
        description="Render regret charts from a banditalign aggregate CSV",
    )
    parser.add_argument("--input", required=True, type=Path, help="aggregate CSV path")
    parser.add_argument("--style", choices=STYLES, default="linear")
    parser.add_argument("--output", required=True, type=Path, help="image path (.svg/.pdf/.png)")
    parser.add_argument(
        "--ref",
        action="append",
        default=[],
        metavar="EXPR",
        help="dotted reference curve 'c*t^p' (repeatable), e.g. '2*t' or '16*t^0.5'",
    )
    parser.add_argument(
        "--agents",
        default=None,
        help="comma-separated agent_id filter; default is every agent in the CSV",
    )
    parser.add_argument("--title", default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        refs = tuple(parse_reference(expr) for expr in args.ref)
        agents = tuple(args.agents.split(",")) if args.agents else None
        output = plot_regret(
            args.input, args.style, args.output, refs=refs, agents=agents, title=args.title
        )
    except (SchemaError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
