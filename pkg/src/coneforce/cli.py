"""Command-line entry point.

Exit status: 0 on success, 1 when a check fails, 2 for unusable input
(bad config, oversized bounds), 3 when a search gives up (stuck R-ii,
exhausted budget).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import facts
from .enumeration import (
    BudgetError,
    ContractError,
    EnumerationStages,
    StrongEnumeration,
    compressible_bound,
    complexity,
    extract_enum,
    extract_path,
    incompressible_level,
    kraft_sum,
)
from .forcing.engine import Engine, EngineError
from .forcing.scenario import ScenarioError, build_q, bundled, bundled_names, load_machine, load_scenario
from .forcing.trace import dumps, ri_budget_violations, verify_records
from .functionals import TableError
from .strings import strings_of_length
from .trees import paths


def _read_json(path: str) -> dict:
    return json.loads(Path(path).read_text())


def _parse_set(items: list[str]) -> dict:
    out: dict[str, dict] = {}
    for item in items:
        try:
            key, value = item.split("=", 1)
            suite, param = key.split(".", 1)
            out.setdefault(suite, {})[param] = int(value)
        except ValueError:
            raise SystemExit(f"--set expects suite.param=INT, got {item!r}")
    return out


def cmd_verify_facts(args) -> int:
    overrides = _parse_set(args.set or [])
    try:
        reports = facts.run_suites(args.bounds, only=args.suite, **overrides)
    except facts.BoundsError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 2
    for rep in reports:
        print(rep.line())
        for fail in rep.failures[:3]:
            print("  counterexample:", json.dumps(fail, sort_keys=True))
    return 0 if all(r.passed for r in reports) else 1


def _scenario(args):
    sc = load_scenario(args.config) if args.config else bundled(args.scenario)
    return sc.with_overrides(
        depth=args.depth, steps=args.steps, seed=args.seed, ri_loop=args.budget_ri, height_bound=args.height_bound
    )


def cmd_sim(args) -> int:
    sc = _scenario(args)
    engine = Engine(sc)
    code = 0
    try:
        engine.run()
    except EngineError as exc:
        print(f"failed at {exc}", file=sys.stderr)
        code = 3
    text = dumps(engine.records)
    if args.out:
        Path(args.out).write_text(text)
    problems = verify_records(engine.records) + ri_budget_violations(engine.records)
    states = [r for r in engine.records if r["op"] == "state"]
    print(f"scenario {sc.name}: {len(states) - 1} steps, {len(engine.records)} records")
    for rec in states[1:]:
        print(f"  step {rec['step']}: k={len(rec['stems'])}, paths={len(rec['tree'])}, "
              f"R-i repeats={rec['ri_loops']} (bound {rec['ri_bound']}), P successes={rec['p_succeeded']}")
    report = next((r for r in engine.records if r["op"] == "report"), None)
    if report:
        print(f"  deepest non-fading branch ({report['side']}): {report['branch']}, prefix {report['g_prefix']!r}")
    if problems:
        for p in problems:
            print("  invariant:", p)
        code = code or 1
    else:
        print("  invariants: all verified")
    return code


def cmd_extract_enum(args) -> int:
    raw = _read_json(args.config)
    e = EnumerationStages(tuple(tuple(frozenset(w) for w in st) for st in raw["stages"]), raw.get("closed", True))
    kprime = int(raw["kprime"])
    levels = [int(n) for n in raw["levels"]]
    q = build_q(raw["Q"]) if "Q" in raw else None
    ok = True
    try:
        for n in levels:
            got = extract_enum(e, kprime, n, raw.get("budget"))
            line = f"level {n}: {sorted(got)}"
            if q is not None:
                valid = len(got) <= kprime and bool(got & {p[:n] for p in paths(q)})
                ok &= valid
                line += " valid" if valid else " INVALID"
            print(line)
    except BudgetError as exc:
        print(f"budget: {exc}", file=sys.stderr)
        return 3
    return 0 if ok else 1


def _enumeration(raw: dict) -> StrongEnumeration:
    vals = {int(n): frozenset(v) for n, v in raw["values"].items()}
    return StrongEnumeration(int(raw["bound"]), vals, int(raw["lo"]), int(raw["hi"]), int(raw.get("width", 1)))


def cmd_extract_path(args) -> int:
    raw = _read_json(args.config)
    tree = build_q(raw["tree"])
    h = _enumeration(raw["enumeration"])
    try:
        path, reductions = extract_path(tree, h)
    except ContractError as exc:
        print(f"contract: {exc}", file=sys.stderr)
        return 2
    member = path in tree.nodes and len(path) == tree.depth
    print(f"path {path!r} after {reductions} reductions; {'node of depth %d' % tree.depth if member else 'NOT a full-depth node'}")
    return 0 if member else 1


def cmd_machine(args) -> int:
    raw = _read_json(args.config)
    u = load_machine(raw.get("machine", raw))
    ok = kraft_sum(u) <= 1
    print(f"Kraft sum {kraft_sum(u)} ({'ok' if ok else 'exceeds 1'})")
    for n in range(args.n + 1) if args.all else [args.n]:
        low = sorted(s for s in strings_of_length(n) if complexity(u, s) < n - args.c)
        level = sorted(incompressible_level(u, args.c, n))
        within = len(low) <= compressible_bound(n, args.c)
        ok &= within
        print(f"n={n} c={args.c}: {len(level)} incompressible, {len(low)} compressible "
              f"(bound {compressible_bound(n, args.c)}{'' if within else ', VIOLATED'})")
        if args.list:
            print("  ", " ".join(s or '""' for s in level) if level else "(none)")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="coneforce", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-facts", help="run the exhaustive fact suites")
    p.add_argument("--bounds", choices=sorted(facts.PRESETS), default="default")
    p.add_argument("--suite", action="append", choices=sorted(facts.SUITES))
    p.add_argument("--set", action="append", metavar="SUITE.PARAM=INT", help="override one suite parameter")
    p.add_argument("--seed", type=int, default=0, help="accepted for uniformity; the suites are exhaustive")
    p.set_defaults(func=cmd_verify_facts)

    p = sub.add_parser("sim", help="run the step loop on a scenario and write a trace")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--config", help="scenario JSON file")
    src.add_argument("--scenario", default="step1", help=f"bundled scenario ({', '.join(bundled_names())})")
    p.add_argument("--depth", type=int)
    p.add_argument("--steps", type=int)
    p.add_argument("--budget-ri", type=int, help="R-i repetitions allowed per step")
    p.add_argument("--height-bound", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="trace output path (JSON lines)")
    p.set_defaults(func=cmd_sim)

    p = sub.add_parser("extract-enum", help="extract a bounded enumeration from staged families")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_extract_enum)

    p = sub.add_parser("extract-path", help="reduce an enumeration of a homogeneous tree to a path")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_extract_path)

    p = sub.add_parser("machine", help="incompressible levels of a toy prefix-free machine")
    p.add_argument("--config", required=True)
    p.add_argument("--c", type=int, default=1)
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--all", action="store_true", help="report every level up to n")
    p.add_argument("--list", action="store_true", help="print the incompressible strings")
    p.set_defaults(func=cmd_machine)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, TableError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
