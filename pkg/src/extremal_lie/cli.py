"""Command-line driver: ``extremal-lie --type A2 --field 2 --suites all``."""
from __future__ import annotations

import argparse
import sys

from .geometry import DEFAULT_POINT_CAP
from .report import SUITES, ConfigError, RunConfig, dumps, run, summary


def build_parser():
    p = argparse.ArgumentParser(prog="extremal-lie",
                                description="Verify Chevalley algebras, their extremal elements and geometries.")
    p.add_argument("--type", required=True, help="diagram: A<n>, D<n>, E6, E7 or E8")
    p.add_argument("--field", required=True, help="a prime p or Q")
    p.add_argument("--suites", default="all", help=f"'all' or a comma list of: {', '.join(SUITES)}")
    p.add_argument("--point-cap", type=int, default=DEFAULT_POINT_CAP, help="largest geometry to enumerate")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the JSON report here")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        config = RunConfig.parse(args.type, args.field, args.suites, args.point_cap, args.seed, args.out)
    except ConfigError as e:
        print(f"invalid configuration: {e}", file=sys.stderr)
        return 2
    report = run(config)
    if config.out:
        with open(config.out, "w") as fh:
            fh.write(dumps(report))
    print(summary(report))
    return 0 if report["status"] == "pass" else 1


if __name__ == "__main__":
    sys.exit(main())
