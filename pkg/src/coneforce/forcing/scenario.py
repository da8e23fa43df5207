"""Scenario configuration: the set being split, the target tree, functional tables, budgets."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Any, Callable, Mapping

from ..enumeration import ToyPrefixMachine, complexity
from ..functionals import BIG, TableError, ToyFunctional, never_halting
from ..strings import strings_up_to
from ..trees import FinTree, full_tree, level_choice_tree, prune
from .conditions import eventually_periodic


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class Budgets:
    ri_search: int = 20000        # stem candidates per R-i call
    ri_loop: int | None = None    # R-i repetitions per step; None means the table-derived bound
    height_bound: int = 5
    max_generators: int = 2
    rii_combos: int = 20000
    path_cap: int = 4
    splits_per_path: int = 2
    compress: bool = True


@dataclass(frozen=True)
class Scenario:
    name: str
    depth: int
    steps: int
    a_pattern: str
    a_prefix: str
    q: FinTree
    tables: Mapping[int, Mapping[int, ToyFunctional]]
    schedule: tuple[int, ...]
    budgets: Budgets = field(default_factory=Budgets)
    seed: int = 0
    q_spec: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.depth < 2:
            raise ScenarioError("depth must be at least 2")
        if self.steps < 0:
            raise ScenarioError("steps must be nonnegative")
        if len(self.schedule) < self.steps:
            raise ScenarioError(f"schedule has {len(self.schedule)} tags for {self.steps} steps")
        b = self.budgets
        positive = [b.ri_search, b.height_bound, b.max_generators, b.rii_combos, b.path_cap, b.splits_per_path]
        if any(x <= 0 for x in positive) or (b.ri_loop is not None and b.ri_loop <= 0):
            raise ScenarioError("budgets must be positive")
        if self.q.is_empty():
            raise ScenarioError("target tree is empty")

    @property
    def a(self) -> Callable[[int], bool]:
        return eventually_periodic(self.a_pattern, self.a_prefix)

    def functional(self, tag: int, e: int) -> ToyFunctional:
        f = self.tables.get(tag, {}).get(e)
        return never_halting(e) if f is None else f

    def halting_entries(self, tag: int) -> int:
        return sum(f.halting_entries for f in self.tables.get(tag, {}).values())

    def with_overrides(self, **kw) -> "Scenario":
        """Copy with top-level fields or budget fields replaced (``None`` values ignored)."""
        kw = {k: v for k, v in kw.items() if v is not None}
        budget_keys = {k: kw.pop(k) for k in list(kw) if k in Budgets.__dataclass_fields__}
        steps = kw.get("steps", self.steps)
        if len(self.schedule) < steps and "schedule" not in kw:
            # extend a short schedule by cycling through it
            base = self.schedule or (0,)
            kw["schedule"] = tuple(base[i % len(base)] for i in range(steps))
        return replace(self, budgets=replace(self.budgets, **budget_keys), **kw)


def _load_output(raw) -> Any:
    if raw == "BIG":
        return BIG
    if not isinstance(raw, list):
        raise TableError(f"output must be a list of strings or 'BIG', got {raw!r}")
    return frozenset(raw)


def load_table(raw: Mapping[str, Any], e: int) -> ToyFunctional:
    """A table ``{"entries": [[prefix, input, output], ...]}``; the size bound is ``e``."""
    entries = {}
    for row in raw.get("entries", []):
        if len(row) != 3:
            raise TableError(f"table row {row!r} must be [prefix, input, output]")
        prefix, n, out = row
        key = (str(prefix), int(n))
        if key in entries:
            raise TableError(f"duplicate entry for prefix {prefix!r} input {n}")
        entries[key] = _load_output(out)
    return ToyFunctional(e, entries)


def dump_table(f: ToyFunctional) -> dict:
    rows = []
    for (p, n), out in sorted(f.entries.items()):
        rows.append([p, n, "BIG" if out is BIG else sorted(out)])
    return {"entries": rows}


def load_machine(raw: Mapping[str, str]) -> ToyPrefixMachine:
    return ToyPrefixMachine(dict(raw))


def incompressible_tree(u: ToyPrefixMachine, c: int, depth: int) -> FinTree:
    """Strings all of whose prefixes are ``c``-incompressible, pruned to ``depth``."""
    nodes = [s for s in strings_up_to(depth) if all(complexity(u, s[:m]) >= m - c for m in range(len(s) + 1))]
    return prune(nodes, depth)


def build_q(spec: Mapping[str, Any]) -> FinTree:
    kind = spec.get("kind", "full")
    if kind == "full":
        return full_tree(int(spec["depth"]))
    if kind == "explicit":
        return prune(spec["nodes"], int(spec["depth"]))
    if kind == "level_choice":
        return level_choice_tree(spec["choices"], int(spec.get("width", 1)))
    if kind == "incompressible":
        return incompressible_tree(load_machine(spec["machine"]), int(spec["c"]), int(spec["depth"]))
    raise ScenarioError(f"unknown tree kind {kind!r}")


def scenario_from_dict(raw: Mapping[str, Any]) -> Scenario:
    try:
        tables: dict[int, dict[int, ToyFunctional]] = {}
        for tag, per_index in raw.get("functionals", {}).items():
            tables[int(tag)] = {int(e): load_table(t, int(e)) for e, t in per_index.items()}
        steps = int(raw.get("steps", 3))
        schedule = tuple(int(t) for t in raw.get("schedule", range(steps)))
        a = raw.get("A", {})
        q_spec = raw.get("Q", {"kind": "full", "depth": 6})
        return Scenario(
            name=str(raw.get("name", "unnamed")),
            depth=int(raw.get("depth", 12)),
            steps=steps,
            a_pattern=str(a.get("pattern", "10")),
            a_prefix=str(a.get("prefix", "")),
            q=build_q(q_spec),
            tables=tables,
            schedule=schedule,
            budgets=Budgets(**raw.get("budgets", {})),
            seed=int(raw.get("seed", 0)),
            q_spec=dict(q_spec),
        )
    except (KeyError, TypeError) as exc:
        raise ScenarioError(f"malformed scenario: {exc}") from exc


def scenario_to_dict(sc: Scenario) -> dict:
    b = sc.budgets
    return {
        "name": sc.name,
        "depth": sc.depth,
        "steps": sc.steps,
        "A": {"pattern": sc.a_pattern, "prefix": sc.a_prefix},
        "Q": dict(sc.q_spec),
        "functionals": {
            str(tag): {str(e): dump_table(f) for e, f in sorted(per.items())}
            for tag, per in sorted(sc.tables.items())
        },
        "schedule": list(sc.schedule),
        "budgets": {k: getattr(b, k) for k in Budgets.__dataclass_fields__},
        "seed": sc.seed,
    }


def load_scenario(path: str | Path) -> Scenario:
    return scenario_from_dict(json.loads(Path(path).read_text()))


def bundled_names() -> list[str]:
    root = resources.files("coneforce.scenarios")
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def bundled(name: str) -> Scenario:
    root = resources.files("coneforce.scenarios")
    target = root / f"{name}.json"
    if not target.is_file():
        raise ScenarioError(f"no bundled scenario {name!r}; have {bundled_names()}")
    return scenario_from_dict(json.loads(target.read_text()))
