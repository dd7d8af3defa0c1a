"""Command-line entry point: ``duranfem study ...`` and ``duranfem verify SUITE``."""

from __future__ import annotations

import argparse
import logging
import sys

from .study import StudyConfig, emit, read_config, run_study
from .verification import SUITES, run_suite


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(",") if v.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="duranfem", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    study = sub.add_parser("study", help="run an H sweep and print a convergence table")
    study.add_argument("--config", help="flat key=value file; flags override its keys")
    study.add_argument("--problem")
    study.add_argument("--variant", choices=["standard", "coarse"])
    study.add_argument("--degree", type=int)
    study.add_argument("--epsilon", type=float)
    study.add_argument("--H", dest="H_list", type=_floats, help="comma-separated, decreasing")
    study.add_argument("--reference-degree", dest="reference_degree", type=int)
    study.add_argument("--reference-H", dest="reference_H", type=float)
    study.add_argument("--quad-points", dest="quad_points", type=int)
    study.add_argument("--theta", dest="omission_theta", type=float)
    study.add_argument("--rate-by", dest="rate_by", choices=["cells", "H"])
    study.add_argument("--format", choices=["csv", "text"], default="text")
    study.add_argument("--output", help="write the table here instead of stdout")

    verify = sub.add_parser("verify", help="run an invariant suite")
    verify.add_argument("suite", help=f"one of {', '.join([*SUITES, 'all'])}")
    return parser


def _study(args) -> int:
    kwargs = read_config(args.config) if args.config else {}
    for key in ("problem", "variant", "degree", "epsilon", "H_list", "reference_degree",
                "reference_H", "quad_points", "omission_theta", "rate_by"):
        value = getattr(args, key)
        if value is not None:
            kwargs[key] = value
    output = args.output or kwargs.pop("output", None)
    kwargs.pop("output", None)
    table = run_study(StudyConfig(**kwargs))
    text = emit(table, args.format, output)
    if output is None:
        sys.stdout.write(text)
    return 0


def _verify(args) -> int:
    checks = run_suite(args.suite)
    for check in checks:
        print(check.line())
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return 1 if failed else 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _study(args) if args.command == "study" else _verify(args)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
