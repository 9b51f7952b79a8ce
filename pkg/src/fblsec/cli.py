"""Command-line front end for the experiment driver.

Subcommands:
    run       execute one experiment and write CSV artifacts
    validate  check a configuration without running anything
    theorems  shorthand for the brute-force claim-check experiment

Exit codes: 0 success, 1 configuration error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from .experiments import (
    EXPERIMENT_IDS,
    ConfigError,
    config_from,
    parse_set_pair,
    run,
    validate,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fblsec",
        description="Two-packet superposed-link experiments: joint key-length "
                    "and power design in the short-packet regime.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one experiment")
    run_p.add_argument("--experiment", required=True, choices=EXPERIMENT_IDS)
    run_p.add_argument("--config", help="JSON file with key/value overrides")
    run_p.add_argument("--out", required=True, help="output directory")
    run_p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="single override, repeatable; wins over --config")

    val_p = sub.add_parser("validate", help="check a configuration, run nothing")
    val_p.add_argument("--config", required=True)
    val_p.add_argument("--experiment", choices=EXPERIMENT_IDS,
                       help="experiment context; defaults to the config file's "
                            "'experiment' key when present")

    thm_p = sub.add_parser("theorems", help="run the brute-force claim checks")
    thm_p.add_argument("--out", required=True, help="output directory")
    thm_p.add_argument("--config", help="JSON file with key/value overrides")
    thm_p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE")
    return parser


def _load_config_file(path: Optional[str]) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    return data


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        file_params = _load_config_file(getattr(args, "config", None))
        sets = dict(parse_set_pair(pair) for pair in getattr(args, "set", []))
        if args.command == "validate":
            experiment = args.experiment or file_params.get("experiment")
            config = config_from(experiment, file_params, {}, None)
            problems = validate(config)
            if problems:
                for line in problems:
                    print(line, file=sys.stderr)
                return 1
            print("ok")
            return 0
        experiment = "theorems" if args.command == "theorems" else args.experiment
        config = config_from(experiment, file_params, sets, args.out)
        problems = validate(config)
        if problems:
            for line in problems:
                print(line, file=sys.stderr)
            return 1
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    try:
        manifest = run(config)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001  (CLI boundary: report, exit 2)
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2
    for name, rows in manifest.files:
        print(f"wrote {name} ({rows} rows)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
