"""Batch figure generation from solver outputs.

    plot fields <snapshot> -o figure.png [--fields rho s] [--oracle table]
    plot bic <bic-table> -o figure.png
    plot cost <cost-report> -o figure.png
"""

import argparse
import sys

from .render import render_bic, render_cost, render_fields
from .tables import TableFormatError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plot",
                                     description="render figures from gmmshock output files")
    sub = parser.add_subparsers(dest="command", required=True)

    fields = sub.add_parser("fields", help="field/sensor panels from a snapshot")
    fields.add_argument("input")
    fields.add_argument("-o", "--output", required=True)
    fields.add_argument("--fields", nargs="+", default=["rho", "s"],
                        help="snapshot columns to draw (default: rho s)")
    fields.add_argument("--vmin", type=float, default=None)
    fields.add_argument("--vmax", type=float, default=None)
    fields.add_argument("--oracle", default=None,
                        help="exact-solution table to overlay on 1D snapshots")

    bic = sub.add_parser("bic", help="BIC elbow curve from an analysis table")
    bic.add_argument("input")
    bic.add_argument("-o", "--output", required=True)

    cost = sub.add_parser("cost", help="sensor-cost bars from a timing report")
    cost.add_argument("input")
    cost.add_argument("-o", "--output", required=True)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "fields":
            color_range = None
            if args.vmin is not None and args.vmax is not None:
                color_range = (args.vmin, args.vmax)
            out = render_fields(args.input, args.output, fields=tuple(args.fields),
                                color_range=color_range, oracle_path=args.oracle)
        elif args.command == "bic":
            out = render_bic(args.input, args.output)
        else:
            out = render_cost(args.input, args.output)
    except (TableFormatError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
