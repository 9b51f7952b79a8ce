"""Command-line front end: render one figure from emitted CSVs.

Usage: plot --experiment <id> --in <dir> --out <dir>
Exit codes: 0 success (including degenerate all-infeasible inputs),
1 missing or ill-formed input, 2 unexpected runtime error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from .render import RENDERERS
from .schemas import FIGURE_IDS, SchemaError, gather


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plot",
        description="Render experiment CSV artifacts into figures with "
                    "JSON sidecar summaries.",
    )
    parser.add_argument("--experiment", required=True, choices=FIGURE_IDS)
    parser.add_argument("--in", dest="in_dir", required=True,
                        help="directory holding the experiment's CSVs")
    parser.add_argument("--out", required=True, help="output directory")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        inputs = gather(args.experiment, Path(args.in_dir))
    except SchemaError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 1
    try:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        written = RENDERERS[args.experiment](inputs, out_dir)
    except Exception as exc:  # noqa: BLE001  (CLI boundary: report, exit 2)
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2
    for name in written:
        print(f"wrote {name}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
