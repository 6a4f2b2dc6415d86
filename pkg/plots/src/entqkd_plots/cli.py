"""Command line: render one metric from a sweep CSV to PNG + SVG.

Exit codes: 0 success, 2 schema/argument error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import sys

from .reader import METRICS, SchemaError
from .render import PlotRequest, render

SCHEMA_ERROR = "PLOT-SCHEMA-ERROR"
IO_ERROR = "PLOT-IO-ERROR"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entqkd-plot",
        description="Plot sweep metrics per zeta curve from a CSV.")
    parser.add_argument("--csv", required=True, metavar="PATH")
    parser.add_argument("--metric", required=True, choices=METRICS)
    parser.add_argument("--out", required=True, metavar="PATH",
                        help="output base path; .png and .svg are written")
    parser.add_argument("--mu-min", type=float, default=None, metavar="F")
    parser.add_argument("--mu-max", type=float, default=None, metavar="F")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        request = PlotRequest(csv_path=args.csv, metric=args.metric,
                              out_path=args.out, mu_min=args.mu_min,
                              mu_max=args.mu_max)
        series = render(request)
    except SchemaError as exc:
        print(f"{SCHEMA_ERROR}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"{IO_ERROR}: {exc}", file=sys.stderr)
        return 3
    print(f"plotted {len(series)} curves for {args.metric} to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
