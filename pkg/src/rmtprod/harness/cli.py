"""Command line interface: ``rmtprod <subcommand> --config cfg.json [overrides]``.

Exit codes: 0 when every verdict passes, 1 when any fails, 2 on configuration
or runtime errors.
"""
from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .config import EXPERIMENTS, ExperimentConfig
from .report import render, write_report
from .runners import run

U64_MAX = 2 ** 64 - 1


def _u64(text: str) -> int:
    value = int(text)
    if not 0 <= value <= U64_MAX:
        raise argparse.ArgumentTypeError(f"seed must lie in [0, 2**64), got {text}")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 2:
        raise argparse.ArgumentTypeError(f"need at least 2 samples, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rmtprod", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run a {name} experiment")
        p.add_argument("--config", required=True, help="JSON experiment configuration")
        p.add_argument("--seed", type=_u64, help="override the config seed")
        p.add_argument("--samples", type=_positive, help="override the sample budget")
        p.add_argument("--out", help="output path (stdout when omitted)")
        p.add_argument("--format", choices=("csv", "json"), help="output format")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = ExperimentConfig.load(args.config, args.command)
        cfg = cfg.with_overrides(seed=args.seed, samples=args.samples, output=args.out,
                                 format=args.format)
        report = run(cfg)
        if cfg.output:
            write_report(report, cfg.output, cfg.format)
        else:
            sys.stdout.write(render(report, cfg.format))
    except Exception as exc:  # every failure before a verdict is a configuration or runtime error
        print(f"rmtprod: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    for line in report.summary_lines():
        print(line, file=sys.stderr)
    return 0 if report.passed else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
