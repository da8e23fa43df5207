"""Line-delimited trace files and their independent re-verification."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Sequence

from .conditions import eventually_periodic
from .engine import construction_report, state_from_snapshot, step_verdicts


def dumps(records: Iterable[dict]) -> str:
    return "".join(json.dumps(r, sort_keys=True, separators=(",", ":")) + "\n" for r in records)


def write_trace(records: Iterable[dict], path: str | Path) -> None:
    Path(path).write_text(dumps(records))


def read_trace(path: str | Path) -> list[dict]:
    return [json.loads(line) for line in Path(path).read_text().splitlines() if line.strip()]


def verify_records(records: Sequence[dict]) -> list[str]:
    """Recompute every state record's verdicts from its snapshot and the previous one.

    Returns a list of problems: invariant failures, and any disagreement
    between recorded and recomputed verdicts.
    """
    problems = []
    header = next((r for r in records if r["op"] == "header"), None)
    if header is None:
        return ["trace has no header"]
    a = eventually_periodic(header["A"]["pattern"], header["A"]["prefix"])
    d = header["depth"]
    prev = None
    for rec in records:
        if rec["op"] != "state":
            continue
        cur = state_from_snapshot(rec, d)
        verdicts = step_verdicts(cur, prev, rec["tag"], a)
        if verdicts != rec["verdicts"]:
            problems.append(f"step {rec['step']}: recorded verdicts differ from recomputed ones")
        for name, fails in verdicts.items():
            problems.extend(f"step {rec['step']} {name}: {msg}" for msg in fails)
        prev = cur
    report = next((r for r in records if r["op"] == "report"), None)
    if report is not None:
        again = {"op": "report", **construction_report(records, a)}
        if again != report:
            problems.append("construction report does not match the recorded states")
    return problems


def ri_budget_violations(records: Sequence[dict]) -> list[str]:
    """Steps whose R-i loop did not stop strictly before the table-derived bound."""
    out = []
    for rec in records:
        if rec["op"] == "state" and rec["step"] > 0 and not rec["ri_loops"] < rec["ri_bound"]:
            out.append(f"step {rec['step']}: {rec['ri_loops']} R-i repetitions, bound {rec['ri_bound']}")
    return out
