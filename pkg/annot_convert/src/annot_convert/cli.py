"""annot-convert command line.

    annot-convert --dataset kinetics-gebd --in ann.pkl --out ann.json
    annot-convert validate ann.json

Exit codes: 0 clean, 1 conversion/validation failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import pickle
import sys
from pathlib import Path

from .convert import DATASETS, ConversionError, convert_file
from .validate import validate_file


def _convert_main(argv: list[str]) -> int:
    ap = argparse.ArgumentParser(prog="annot-convert",
                                 description="Convert dataset annotation pickles "
                                             "to canonical boundary JSON")
    ap.add_argument("--dataset", choices=DATASETS, required=True)
    ap.add_argument("--in", dest="input", required=True, help="input pickle")
    ap.add_argument("--out", required=True, help="output JSON path")
    args = ap.parse_args(argv)
    try:
        result = convert_file(Path(args.input), args.dataset, Path(args.out))
    except (ConversionError, pickle.UnpicklingError, OSError, EOFError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    for w in result.warnings:
        print(f"warning: {w}", file=sys.stderr)
    print(f"wrote {args.out}: {len(result.videos)} videos"
          + (f", skipped {len(result.skipped)}" if result.skipped else ""))
    return 0


def _validate_main(argv: list[str]) -> int:
    ap = argparse.ArgumentParser(prog="annot-convert validate",
                                 description="Validate canonical boundary JSON")
    ap.add_argument("json_path")
    args = ap.parse_args(argv)
    problems = validate_file(Path(args.json_path))
    for p in problems:
        print(f"violation: {p}", file=sys.stderr)
    if problems:
        print(f"{args.json_path}: {len(problems)} violation(s)")
        return 1
    print(f"{args.json_path}: ok")
    return 0


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0] == "validate":
        return _validate_main(argv[1:])
    return _convert_main(argv)


if __name__ == "__main__":
    sys.exit(main())
