"""Command-line front end.

Verbs:
    run <scenario-file>                  integrate a scenario file
    catalog list                         show the authored entries
    catalog run <name> [--backward] [--horizon T]
    verify                               run the acceptance suite

Global flags --rel-tol, --abs-tol, --blowup-threshold and --out apply where
meaningful.  Exit codes: 0 success, 1 verdict contradicts expectations,
2 load/validation error, 3 integrator failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import fields

from .catalog import catalog_entries, get_entry
from .flow import IntegratorOptions
from .scenario import Scenario, ScenarioError, load_scenario, run_scenario
from .verify import verify_all


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bracketflow",
        description="Homogeneous Ricci flow as an ODE on Lie-algebra structure constants.",
    )
    parser.add_argument("--rel-tol", type=float, default=None, help="integrator relative tolerance")
    parser.add_argument("--abs-tol", type=float, default=None, help="integrator absolute tolerance")
    parser.add_argument(
        "--blowup-threshold", type=float, default=None, help="bracket-norm threshold for the singularity verdict"
    )
    parser.add_argument("--out", default=".", help="output directory for CSV and report files")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="integrate a scenario file")
    p_run.add_argument("scenario", help="path to the scenario file")

    p_cat = sub.add_parser("catalog", help="inspect or run authored initial data")
    cat_sub = p_cat.add_subparsers(dest="catalog_command", required=True)
    cat_sub.add_parser("list", help="list catalog entries")
    p_cat_run = cat_sub.add_parser("run", help="integrate a catalog entry")
    p_cat_run.add_argument("name")
    p_cat_run.add_argument("--backward", action="store_true", help="integrate backward in time")
    p_cat_run.add_argument("--horizon", type=float, default=None, help="time horizon (default per entry)")

    sub.add_parser("verify", help="run the full acceptance suite")
    return parser


def _base_options(args) -> IntegratorOptions:
    merged = {f.name: getattr(IntegratorOptions(), f.name) for f in fields(IntegratorOptions)}
    if args.rel_tol is not None:
        merged["rel_tol"] = args.rel_tol
    if args.abs_tol is not None:
        merged["abs_tol"] = args.abs_tol
    if args.blowup_threshold is not None:
        merged["blowup_threshold"] = args.blowup_threshold
    return IntegratorOptions(**merged)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    opts = _base_options(args)

    if args.command == "run":
        try:
            scenario = load_scenario(args.scenario)
        except ScenarioError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        code, written = run_scenario(scenario, args.out, opts)
        for path in written:
            print(path)
        return code

    if args.command == "catalog":
        if args.catalog_command == "list":
            for entry in catalog_entries():
                dims = entry.bracket.dims
                fwd, bwd = entry.expected["forward"][0], entry.expected["backward"][0]
                print(
                    f"{entry.name:<20} q={dims.q} n={dims.n}  R0={entry.r0:<8g} "
                    f"forward={fwd:<9} backward={bwd:<9} cover={entry.universal_cover_note}"
                )
            return 0
        try:
            entry = get_entry(args.name)
        except KeyError as exc:
            print(f"error: {exc.args[0]}", file=sys.stderr)
            return 2
        direction = "backward" if args.backward else "forward"
        horizon = args.horizon if args.horizon is not None else entry.default_horizon[direction]
        expected_kind, expected_time = entry.expected[direction]
        scenario = Scenario(
            name=entry.name,
            catalog_name=entry.name,
            directions=(direction,),
            horizon=horizon,
            h2_note=entry.h2_note,
            expect={direction: expected_kind},
        )
        if expected_time is not None:
            if direction == "forward":
                scenario.expect_omega = expected_time
            else:
                scenario.expect_alpha = expected_time
        code, written = run_scenario(scenario, args.out, opts)
        for path in written:
            print(path)
        return code

    if args.command == "verify":
        return verify_all(opts)

    return 2


if __name__ == "__main__":
    sys.exit(main())
