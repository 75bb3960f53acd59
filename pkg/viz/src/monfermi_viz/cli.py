"""Script entry point: monfermi-viz --kind KIND --input FILE [--boundary FILE]
[--profiles FILE] --out IMAGE"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .figures import FIGURE_KINDS, FigureSpec, SchemaError, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="monfermi-viz", description=__doc__)
    parser.add_argument("--kind", choices=FIGURE_KINDS, required=True)
    parser.add_argument("--input", required=True, help="ceff_table/summary CSV or collapse_fit JSON")
    parser.add_argument("--boundary", help="boundary_fit.json for the heatmap overlay")
    parser.add_argument("--profiles", help="entropy_profile.csv for the crossing inset")
    parser.add_argument("--out", required=True, help="output image (.png or .svg)")
    parser.add_argument("--title", help="optional figure title")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = FigureSpec(
            kind=args.kind,
            input=Path(args.input),
            out=Path(args.out),
            boundary=Path(args.boundary) if args.boundary else None,
            profiles=Path(args.profiles) if args.profiles else None,
            title=args.title,
        )
        path = render(spec)
    except SchemaError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
