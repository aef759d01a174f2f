"""Command line: figures <csv> <spec-name> <out>."""

import argparse
import sys

from .loader import SchemaError
from .plots import build_spec, render

SPEC_NAMES = ("fig2", "fig3", "fig4")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figures",
        description="Render a sweep CSV into one of the standard figures",
    )
    parser.add_argument("csv", help="sweep CSV produced by ris-doppler-ce run")
    parser.add_argument(
        "spec_name",
        choices=SPEC_NAMES,
        help="fig2: error and rate ratio vs power; fig3: error and rate vs "
        "tap power ratio; fig4: rate and pilot count vs sub-surfaces",
    )
    parser.add_argument("out", help="output image path (png, pdf, or svg)")
    return parser


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        spec = build_spec(args.spec_name, args.out)
        out = render(args.csv, spec)
    except (SchemaError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {out}")
    return 0


def entrypoint() -> None:
    raise SystemExit(cli_main())
