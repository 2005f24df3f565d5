"""Command-line entry point.

One subcommand per experiment pipeline; each accepts an optional JSON
config (``--config``) overridable with ``--seed``, ``--shots`` and
``--out``.  Exit codes: 0 success, 2 config/validation error, 3 runtime
failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import ConfigError, ExperimentConfig, default_config
from .pipelines import run

_SUBCOMMANDS = {
    "reset-sweep": "reset error landscape over swap/hold durations",
    "leakage-growth": "leakage growth curves and rate-equation fits",
    "inject": "detection-event fractions around an injected leakage event",
    "pij": "pair-correlation matrices with and without reset",
    "decode": "matching decode of one configuration",
    "lambda-scan": "error suppression vs size and rounds",
    "postselect": "remove anomalous stretches from a logical-error stream",
}

_KIND_BY_COMMAND = {name: name for name in _SUBCOMMANDS}
_KIND_BY_COMMAND["inject"] = "injection"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="leakqec",
        description="leakage-aware bit-flip code simulation and analysis",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in _SUBCOMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", type=Path, help="JSON experiment config")
        p.add_argument("--seed", type=int, help="override the master seed")
        p.add_argument(
            "--shots",
            type=int,
            help="override shots per bitstring group",
        )
        p.add_argument(
            "--out", type=Path, default=Path("out"), help="output directory"
        )
        if name == "postselect":
            p.add_argument(
                "--input", type=Path, help="CSV of time-ordered logical errors"
            )
    return parser


def _load_config(args: argparse.Namespace) -> ExperimentConfig:
    kind = _KIND_BY_COMMAND[args.command]
    if args.config is not None:
        cfg = ExperimentConfig.from_json(args.config)
        if cfg.kind != kind:
            raise ConfigError(
                f"config kind {cfg.kind!r} does not match subcommand {kind!r}"
            )
        doc = dict(cfg.raw)
    else:
        doc = dict(default_config(kind).raw)
    if args.seed is not None:
        doc["seed"] = args.seed
    if args.shots is not None:
        shots = dict(doc.get("shots", {}))
        shots["repeats"] = args.shots
        doc["shots"] = shots
    if args.command == "postselect" and args.input is not None:
        doc["input"] = str(args.input)
    return ExperimentConfig.from_dict(doc)


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        files = run(cfg, args.out)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    for path in files:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
