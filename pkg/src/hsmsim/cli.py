"""Command-line entry point.

    simulate --scenario <file> --out <dir>
    simulate --suite all --out <dir> [--check] [--jobs N]
    simulate --list
    simulate ... --set topology.wan_rtt_s=0.002

Exit codes: 0 success, 1 expectation-check failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import sys

from .engine import ConfigError
from .runner import run_suite
from .scenario import CANNED, load_scenario, load_suite


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simulate",
        description="Run storage/network transfer scenarios and emit result CSVs.",
    )
    what = parser.add_mutually_exclusive_group(required=True)
    what.add_argument("--scenario", metavar="FILE", action="append",
                      help="scenario config file (repeatable)")
    what.add_argument("--suite", metavar="NAME", choices=["all"],
                      help="run a canned suite ('all')")
    what.add_argument("--list", action="store_true", help="list canned scenarios")
    parser.add_argument("--out", metavar="DIR", default="results",
                        help="output directory for CSVs (default: results)")
    parser.add_argument("--check", action="store_true",
                        help="verify scenario expectations; exit 1 on violation")
    parser.add_argument("--set", metavar="SECTION.KEY=VALUE", action="append",
                        default=[], dest="overrides",
                        help="override a scenario setting (repeatable)")
    parser.add_argument("--jobs", type=int, default=1, metavar="N",
                        help="run up to N scenarios in parallel (default 1)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.list:
            for name in CANNED:
                print(name)
            return 0
        if args.suite:
            scenarios = load_suite()
        else:
            scenarios = [load_scenario(p) for p in args.scenario]
        for item in args.overrides:
            dotted, sep, value = item.partition("=")
            if not sep:
                raise ConfigError(f"--set {item!r}: expected section.key=value")
            for sc in scenarios:
                sc.override(dotted, value)
        files, violations = run_suite(scenarios, args.out,
                                      check=args.check, jobs=args.jobs)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if not files:
        print("warning: empty suite, nothing to run", file=sys.stderr)
        return 0
    for f in files:
        print(f)
    if violations:
        for v in violations:
            print(f"CHECK FAILED: {v}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
