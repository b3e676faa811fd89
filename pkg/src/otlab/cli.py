"""Command-line front end.

Subcommands: solve (certify a transport instance file), construct (build
towers and levels, emit plot-ready artifacts), gap (truncated-cost gap
report), verify (re-check saved construction artifacts).  Data goes to
stdout or files; progress notes go to stderr only.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from . import circle, duals, gap, serialize, tau
from .finite_ot import (
    NoFinitePlan,
    InfeasibleMarginals,
    check_complementary_slackness,
    is_cyclically_monotone,
    load_instance,
    solve_dual,
    solve_primal,
)
from .rational import format_rational

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3
EXIT_CONSTRUCTION = 4


def _progress(msg: str):
    print(msg, file=sys.stderr)


def cmd_solve(args) -> int:
    try:
        cost, marg = load_instance(args.instance)
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as e:
        _progress(f"cannot parse instance: {e}")
        return EXIT_USAGE
    try:
        plan = solve_primal(cost, marg)
        pair = solve_dual(cost, marg)
    except (NoFinitePlan, InfeasibleMarginals) as e:
        _progress(f"infeasible: {e}")
        return EXIT_INFEASIBLE
    slack = check_complementary_slackness(plan, pair, cost)
    mono, witness = is_cyclically_monotone(sorted(plan.support()), cost)
    report = {
        "primal": format_rational(plan.value),
        "dual": format_rational(pair.value),
        "slackness": {
            "passed": slack.passed,
            "support_violations": list(slack.support_violations),
            "feasibility_violations": list(slack.feasibility_violations),
        },
        "monotonicity": {"passed": mono, "witness": witness},
    }
    text = serialize.dumps(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    ok = plan.value == pair.value and slack.passed and mono
    return EXIT_OK if ok else EXIT_FAIL


def _build_tower_args(args) -> circle.ModulusTower:
    return circle.build_tower_mode(
        args.m1, args.depth, args.mode, search_cap=args.search_cap
    )


def cmd_construct(args) -> int:
    if args.m1 < 5 or args.m1 % 2 == 0 or not circle.is_probable_prime(args.m1):
        _progress(f"--m1 {args.m1} is not an odd prime >= 5")
        return EXIT_USAGE
    levels_wanted = args.levels or args.depth
    if levels_wanted > args.depth:
        _progress("--levels cannot exceed --depth")
        return EXIT_USAGE
    try:
        tower = _build_tower_args(args)
        _progress(f"tower primes: {tower.primes} ({tower.mode})")
        levels = tau.build_levels(tower, levels_wanted)
    except (circle.SearchCapExceeded, tau.GrowthTooSmall) as e:
        _progress(f"construction failed: {e}")
        return EXIT_CONSTRUCTION

    outdir = args.outdir
    os.makedirs(outdir, exist_ok=True)
    with open(os.path.join(outdir, "tower.json"), "w", encoding="utf-8") as fh:
        fh.write(serialize.dumps(serialize.tower_to_dict(tower)) + "\n")

    ledgers = []
    diag_lines = []
    diags = duals.singular_buildup(levels, tower)
    for level, diag in zip(levels, diags):
        n = level.level
        with open(
            os.path.join(outdir, f"tau_level_{n}.json"), "w", encoding="utf-8"
        ) as fh:
            fh.write(serialize.dumps(serialize.tau_level_to_dict(level, tower)) + "\n")
        with open(
            os.path.join(outdir, f"quasi_cost_level_{n}.csv"), "w", encoding="utf-8"
        ) as fh:
            fh.write(tau.quasi_cost(level, tower).to_csv())
        ledgers.append(serialize.ledger_to_dict(tau.singular_ledger(level, tower)))
        pair = duals.corrected_pair(level, tower)
        diag_lines.append(
            serialize.diagnostic_to_dict(
                diag, duals.dual_value(pair), pair.correction_norm
            )
        )
    with open(os.path.join(outdir, "singular_ledger.json"), "w", encoding="utf-8") as fh:
        fh.write(serialize.dumps(ledgers) + "\n")
    with open(os.path.join(outdir, "diagnostics.jsonl"), "w", encoding="utf-8") as fh:
        for line in diag_lines:
            fh.write(json.dumps(line, sort_keys=True) + "\n")
    _progress(f"wrote artifacts for levels 1..{levels_wanted} to {outdir}")
    return EXIT_OK


def cmd_gap(args) -> int:
    if args.m1 < 5 or args.m1 % 2 == 0 or not circle.is_probable_prime(args.m1):
        _progress(f"--m1 {args.m1} is not an odd prime >= 5")
        return EXIT_USAGE
    if args.M > args.jmax:
        _progress("--M cannot exceed --jmax (one limit map per built row)")
        return EXIT_USAGE
    try:
        tower = circle.build_tower_mode(
            args.m1, args.jmax, args.mode, search_cap=args.search_cap
        )
        _progress(f"tower primes: {tower.primes} ({tower.mode})")
        family = gap.build_gap_family(tower, args.jmax)
        report = gap.gap_demonstration(family, args.M, args.jmax)
    except (circle.SearchCapExceeded, tau.GrowthTooSmall) as e:
        _progress(f"construction failed: {e}")
        return EXIT_CONSTRUCTION
    text = serialize.dumps(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    ok = report["primal"] == "1/1" and report["dual"] == "1/1"
    return EXIT_OK if ok else EXIT_FAIL


def cmd_verify(args) -> int:
    """Rebuild the construction from the saved tower and compare the
    saved tau vectors and index sets cell by cell, then re-run the level
    invariant checks."""
    outdir = args.artifacts
    try:
        with open(os.path.join(outdir, "tower.json"), "r", encoding="utf-8") as fh:
            tw = json.load(fh)
    except OSError as e:
        _progress(f"cannot read artifacts: {e}")
        return EXIT_USAGE
    primes = tw["primes"]
    floors = primes[1:]  # rebuild with each saved prime as its own floor
    tower = circle.build_tower(primes[0], len(primes), growth_floor=floors or None)
    if list(tower.primes) != primes:
        _progress(f"tower mismatch: rebuilt {tower.primes} vs saved {primes}")
        return EXIT_FAIL

    n = 1
    levels = []
    failures = []
    while os.path.exists(os.path.join(outdir, f"tau_level_{n}.json")):
        with open(
            os.path.join(outdir, f"tau_level_{n}.json"), "r", encoding="utf-8"
        ) as fh:
            saved = json.load(fh)
        level = (
            tau.build_tau_level1(tower)
            if n == 1
            else tau.extend_tau(levels[-1], tower)
        )
        levels.append(level)
        if serialize.rle_decode(saved["tau_rle"]).tolist() != level.tau.tolist():
            failures.append(f"level {n}: tau differs from a fresh build")
        if (
            serialize.rle_decode(saved["good_rle"]).astype(bool).tolist()
            != level.good_mask.tolist()
        ):
            failures.append(f"level {n}: good set differs")
        report = tau.verify_level(level, tower)
        if not report.hard_invariants_ok:
            failures.append(f"level {n}: invariant check failed: {report}")
        n += 1
    if n == 1:
        _progress("no tau_level_*.json artifacts found")
        return EXIT_USAGE
    for f in failures:
        _progress(f)
    print(serialize.dumps({"levels_checked": n - 1, "failures": failures}))
    return EXIT_OK if not failures else EXIT_FAIL


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="otlab",
        description="exact transport duality lab: solvers and circle constructions",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve and certify a transport instance file")
    p.add_argument("instance")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("construct", help="build tower levels and emit artifacts")
    p.add_argument("--m1", type=int, required=True)
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--mode", choices=["relaxed", "paper_compliant"], default="relaxed")
    p.add_argument("--levels", type=int, default=None)
    p.add_argument("--outdir", default="otlab-artifacts")
    p.add_argument("--search-cap", type=int, default=None)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("gap", help="truncated-cost duality report")
    p.add_argument("--m1", type=int, required=True)
    p.add_argument("--jmax", type=int, required=True)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--mode", choices=["relaxed", "paper_compliant"], default="relaxed")
    p.add_argument("--out", default=None)
    p.add_argument("--search-cap", type=int, default=None)
    p.set_defaults(func=cmd_gap)

    p = sub.add_parser("verify", help="re-check saved construction artifacts")
    p.add_argument("artifacts")
    p.set_defaults(func=cmd_verify)

    args = ap.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
