"""Command-line front end.

One subcommand per experiment; every run takes a scenario file, with flags
overriding the seed, the Cauchy tolerance, the horizon, and the output
format.  Exit codes: 0 success, 1 precondition/inapplicable, 2 violation
detected, 3 parse/config error.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import replace

from . import scenario as sc
from .errors import ScenarioError

_SUBCOMMANDS = {
    "integrate": "integrate",
    "welldef": "welldef",
    "vitali": "vitali",
    "riesz-fischer": "riesz_fischer",
    "inequalities": "inequalities",
    "ui-report": "ui_report",
    "density": "density",
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bochner",
        description="Integration experiments on finite measure spaces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, experiment in _SUBCOMMANDS.items():
        p = sub.add_parser(name, help=f"run the {experiment} experiment")
        p.set_defaults(experiment=experiment)
        p.add_argument("--scenario", required=True, help="scenario file (JSON)")
        p.add_argument("--seed", type=int, default=None, help="override the seed")
        p.add_argument("--tolerance", type=float, default=None,
                       help="override the Cauchy tolerance")
        p.add_argument("--horizon", type=int, default=None,
                       help="override the truncation horizon")
        p.add_argument("--format", choices=("csv", "records"), default=None,
                       help="override the output format")
        p.add_argument("--out", default=None,
                       help="output path (default standard output)")
        p.add_argument("--quiet", action="store_true",
                       help="suppress timing output on stderr")
    return parser


def _apply_overrides(spec: sc.ScenarioSpec, args) -> sc.ScenarioSpec:
    if args.seed is not None:
        if args.seed < 0:
            raise ScenarioError("seed must be nonnegative", field="--seed")
        spec = replace(spec, seed=args.seed)
    if args.tolerance is not None:
        if args.tolerance <= 0:
            raise ScenarioError("tolerance must be positive", field="--tolerance")
        spec = replace(spec, tolerances=replace(spec.tolerances,
                                                cauchy_tol=args.tolerance))
    if args.horizon is not None:
        if args.horizon < 2:
            raise ScenarioError("horizon must be at least 2", field="--horizon")
        spec = replace(spec, tolerances=replace(spec.tolerances,
                                                horizon=args.horizon))
    if args.format is not None:
        spec = replace(spec, out_format=args.format)
    return spec


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        with open(args.scenario, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"bochner: cannot read scenario: {exc}", file=sys.stderr)
        return 3
    try:
        spec = sc.parse_scenario(text, experiment=args.experiment)
        spec = _apply_overrides(spec, args)
    except ScenarioError as exc:
        print(f"bochner: scenario error: {exc}", file=sys.stderr)
        return 3

    start = time.perf_counter()
    records = sc.run_campaign(spec)
    elapsed = time.perf_counter() - start
    output = sc.render_report(records, spec.out_format)

    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(output)
        except OSError as exc:
            print(f"bochner: cannot write {args.out}: {exc}", file=sys.stderr)
            return 3
    else:
        sys.stdout.write(output)
    if not args.quiet:
        print(f"bochner: {spec.experiment}: {len(records)} record(s) in "
              f"{elapsed:.3f}s", file=sys.stderr)
    return sc.exit_code(records)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
