"""Command line for figure regeneration: `shockplots figN --input DIR --out PATH`."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .io import MissingInputError
from .render import FIGURES, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shockplots",
        description="Regenerate figures from shocklayer CSV/JSON run artifacts.",
    )
    parser.add_argument(
        "figure",
        choices=sorted(FIGURES) + ["all"],
        help="figure to render, or 'all'",
    )
    parser.add_argument("--input", type=Path, required=True, help="run-artifact directory")
    parser.add_argument(
        "--out", type=Path, required=True,
        help="output image path (or directory when rendering 'all')",
    )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    targets = sorted(FIGURES) if args.figure == "all" else [args.figure]
    status = 0
    for figure_id in targets:
        out = args.out / f"{figure_id}.png" if args.figure == "all" else args.out
        try:
            path = render(figure_id, args.input, out)
            print(f"{figure_id}: wrote {path}")
        except MissingInputError as err:
            print(f"{figure_id}: missing input\n{err}", file=sys.stderr)
            status = 1
    return status


if __name__ == "__main__":
    sys.exit(main())
