"""Command line entry point.

Exit codes follow the simulator's convention: 0 success, 1 for a run
that completed with a degraded result (no data rows), 2 for anything
wrong with the inputs themselves.
"""

import argparse
import sys
from typing import Optional, Sequence

from .figures import FIGURES, FigureSpec, render
from .records import SchemaError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figrender",
        description="Render figures from exported sweep records.")
    sub = parser.add_subparsers(dest="command", required=True)
    r = sub.add_parser("render", help="render one figure from one CSV")
    r.add_argument("--figure", required=True, choices=FIGURES)
    r.add_argument("--in", dest="csv_in", required=True,
                   help="input records CSV")
    r.add_argument("--out", dest="image_out", required=True,
                   help="output image path (.svg for reproducible bytes)")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        if code is None:
            return 0
        return code if isinstance(code, int) else 2

    try:
        spec = FigureSpec(args.figure, args.csv_in, args.image_out)
        n_rows = render(spec)
    except SchemaError as exc:
        print(f"schema mismatch: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"cannot read or write: {exc}", file=sys.stderr)
        return 2

    if n_rows == 0:
        print(f"warning: {args.csv_in} has no data rows; "
              f"wrote axes-only figure to {args.image_out}", file=sys.stderr)
        return 1
    print(f"wrote {args.image_out} from {n_rows} rows")
    return 0


if __name__ == "__main__":
    sys.exit(main())
