"""Command-line wrapper: one conversion per invocation, JSON report on stdout."""

from __future__ import annotations

import argparse
import json
import sys

from planetoid_converter.convert import DATASET_NAMES, ConversionError, convert


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="planetoid-convert",
        description="Convert an upstream Planetoid bundle to a portable "
                    "dataset directory.")
    parser.add_argument("--in", dest="input_dir", required=True,
                        help="directory holding the ind.<name>.* files")
    parser.add_argument("--name", required=True, choices=DATASET_NAMES)
    parser.add_argument("--out", dest="output_dir", required=True)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        report = convert(args.input_dir, args.name, args.output_dir)
    except ConversionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
