"""The step loop: R-i repetitions, one R-ii split, then P-Operations on the new parts.

Part indices are 0-based in code and 1-based in trace records.
Everything is deterministic.  Every operation application appends one
record to ``Engine.records``; a ``state`` record closes each step and
carries the per-step invariant verdicts (see :mod:`.trace`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, islice, product
from typing import Callable, Sequence

from ..combinatorics import is_disperse, minimal_disperse_subsets
from ..functionals import ToyFunctional, abandons_on_set, output_size
from ..strings import ClopenSet, bits, mask_to_set, set_to_mask, strings_of_length
from .conditions import (
    SIDES,
    ForcingCondition,
    PartitionTree,
    check_fac7,
    condition_violations,
    cond_extends,
    fading,
)
from .scenario import Scenario


class EngineError(RuntimeError):
    """A stuck R-ii search or an exceeded R-i loop budget, with context."""

    def __init__(self, message: str, step: int, op: str):
        super().__init__(f"step {step}, {op}: {message}")
        self.step = step
        self.op = op


@dataclass
class State:
    cond: ForcingCondition
    # progress[i][tag] = (e_l, e_r); tags not listed are at (1, 1)
    progress: list[dict[int, tuple[int, int]]]
    parents: list[int]
    sides: list[str | None]
    step: int = 0

    @property
    def k(self) -> int:
        return self.cond.k

    def counters(self, i: int, tag: int) -> tuple[int, int]:
        return self.progress[i].get(tag, (1, 1))

    def copy(self) -> "State":
        c = ForcingCondition(list(self.cond.stems), self.cond.tree, self.cond.deficit)
        return State(c, [dict(p) for p in self.progress], list(self.parents), list(self.sides), self.step)


def initial_state(d: int) -> State:
    cond = ForcingCondition([("", "")], PartitionTree.full(d), frozenset())
    return State(cond, [{}], [0], [None], 0)


def _low_mask(n: int) -> int:
    return (1 << n) - 1


def _update_deficit(cond: ForcingCondition) -> frozenset[int]:
    t = cond.tree
    full = _low_mask(t.d)
    missing = 0
    for idx in range(len(t.paths)):
        missing |= full & ~t.union(idx)
    return cond.deficit | mask_to_set(missing)


def _apply_horizon(cond: ForcingCondition, i: int) -> ForcingCondition:
    """Drop elements below part ``i``'s stem horizon; grow the deficit to match."""
    cut = ~_low_mask(cond.horizon(i))
    paths = [tuple(m & cut if j == i else m for j, m in enumerate(p)) for p in cond.tree.paths]
    out = ForcingCondition(cond.stems, PartitionTree(cond.tree.k, cond.tree.d, tuple(paths)), cond.deficit)
    out.deficit = _update_deficit(out)
    return out


def _set_stem(stems: Sequence[tuple[str, str]], i: int, side: str, rho: str) -> list[tuple[str, str]]:
    out = list(stems)
    l, r = out[i]
    out[i] = (rho, r) if side == "l" else (l, rho)
    return out


@dataclass
class Outcome:
    kind: str
    state: State
    info: dict = field(default_factory=dict)


class Engine:
    def __init__(self, scenario: Scenario):
        self.sc = scenario
        self.d = scenario.depth
        self.a = scenario.a
        self.amask = set_to_mask(x for x in range(self.d) if self.a(x))
        self.records: list[dict] = []
        self._split_cache: dict = {}
        self._disperse_cache: dict = {}

    # -- helpers --------------------------------------------------------

    def side_mask(self, side: str) -> int:
        return self.amask if side == "l" else _low_mask(self.d) & ~self.amask

    def _emit(self, rec: dict) -> None:
        self.records.append(rec)

    def _bad_output(self, f: ToyFunctional, rho: str, e: int) -> int | None:
        """An input ``n <= d`` on which ``rho`` yields a too-big output or one missing the target tree."""
        for n in f.inputs:
            if n > self.d:
                continue
            out = f.evaluate(rho, n)
            if out is None:
                continue
            if output_size(out) > e or not any(self.sc.q.meets(s) for s in out):
                return n
        return None

    # -- P-Operation ----------------------------------------------------

    def p_operation(self, state: State, i: int, side: str) -> Outcome:
        """Extend part ``i``'s stem on ``side`` by the least element of the side's colour."""
        cond = state.cond
        stem = cond.stems[i][SIDES.index(side)]
        sm = self.side_mask(side)
        avail = 0
        for p in cond.tree.paths:
            avail |= p[i] & sm
        before = {"stem_before": stem}
        if not avail:
            return Outcome("failed", state, before)
        x = (avail & -avail).bit_length() - 1
        rho = stem + "0" * (x - len(stem)) + "1"
        tree = cond.tree.restrict(lambda p: (p[i] >> x) & 1)
        new = ForcingCondition(_set_stem(cond.stems, i, side, rho), tree, cond.deficit)
        out = state.copy()
        out.cond = _apply_horizon(new, i)
        return Outcome("succeeded", out, {**before, "stem_after": rho, "element": x})

    # -- R-i-Operation --------------------------------------------------

    def _ri_candidates(self, stem: str, use: int, union: int, sm: int):
        top = min(self.d, max(use, len(stem) + 1))
        for length in range(len(stem) + 1, top + 1):
            options = []
            for y in range(len(stem), length):
                options.append("01" if (union >> y) & 1 and (sm >> y) & 1 else "0")
            for tail in product(*options):
                yield stem + "".join(tail)

    def r_i_operation(self, state: State, tag: int, budget: int) -> Outcome:
        cond = state.cond
        spent = 0
        for i in range(cond.k):
            union = 0
            for p in cond.tree.paths:
                union |= p[i]
            for s_idx, side in enumerate(SIDES):
                e = state.counters(i, tag)[s_idx]
                f = self.sc.functional(tag, e)
                if not f.entries:
                    continue
                stem = cond.stems[i][s_idx]
                for rho in self._ri_candidates(stem, f.use, union, self.side_mask(side)):
                    spent += 1
                    if spent > budget:
                        return Outcome("no_case_i", state, {"budget_exhausted": True, "candidates": budget})
                    n = self._bad_output(f, rho, e)
                    if n is None:
                        continue
                    fresh = set_to_mask(bits(rho)) & ~set_to_mask(bits(stem))
                    witnesses = [p for p in cond.tree.paths if fresh & ~p[i] == 0]
                    if not witnesses:
                        continue
                    tree = PartitionTree(cond.k, cond.tree.d, tuple(witnesses))
                    new = ForcingCondition(_set_stem(cond.stems, i, side, rho), tree, cond.deficit)
                    out = state.copy()
                    out.cond = _apply_horizon(new, i)
                    el, er = state.counters(i, tag)
                    out.progress[i][tag] = (el + 1, er) if side == "l" else (el, er + 1)
                    return Outcome(
                        "case_i",
                        out,
                        {"part": i + 1, "side": side, "stem_before": stem, "stem_after": rho,
                         "input": n, "index": e, "candidates": spent},
                    )
        return Outcome("no_case_i", state, {"budget_exhausted": False, "candidates": spent})

    # -- T_V and the R-ii-Operation --------------------------------------

    def _part_splits(self, state: State, tag: int, i: int, mask: int, v: ClopenSet) -> list[tuple[int, int]]:
        """Leading covering splits of one part on which neither side abandons ``v``.

        Only elements below the larger use can matter; the rest go to both
        sides.  Window elements try both, then left, then right.
        """
        el, er = state.counters(i, tag)
        fl, fr = self.sc.functional(tag, el), self.sc.functional(tag, er)
        rl, rr = state.cond.stems[i]
        use = max(fl.use, fr.use)
        window = [x for x in range(min(use, self.d)) if (mask >> x) & 1]
        wmask = set_to_mask(window)
        key = (tag, el, er, rl, rr, wmask, v)
        if key not in self._split_cache:
            found = []
            for assignment in product("blr", repeat=len(window)):
                left = frozenset(x for x, s in zip(window, assignment) if s != "r")
                right = frozenset(x for x, s in zip(window, assignment) if s != "l")
                if abandons_on_set(fl, rl, v, left, self.d) or abandons_on_set(fr, rr, v, right, self.d):
                    continue
                found.append((set_to_mask(left), set_to_mask(right)))
                if len(found) == self.sc.budgets.splits_per_path:
                    break
            self._split_cache[key] = found
        rest = mask & ~wmask
        return [(l | rest, r | rest) for l, r in self._split_cache[key]]

    def t_v(self, state: State, tag: int, v: ClopenSet) -> list[tuple[int, ...]]:
        """Non-abandoning splittings of the tree's paths, a few per path; paths without one drop out."""
        out = []
        cap = self.sc.budgets.splits_per_path
        for p in state.cond.tree.paths:
            options = [self._part_splits(state, tag, i, mask, v) for i, mask in enumerate(p)]
            for choice in islice(product(*options), cap):
                out.append(tuple(m for pair in choice for m in pair))
        return out

    def _pool(self, state: State, tag: int, h: int, admissible: dict) -> list[ClopenSet]:
        level = sorted(strings_of_length(h))
        pool = []
        for size in range(1, min(self.sc.budgets.max_generators, len(level)) + 1):
            for gens in combinations(level, size):
                v = ClopenSet(frozenset(gens))
                if v not in admissible:
                    admissible[v] = bool(self.t_v(state, tag, v))
                if admissible[v]:
                    pool.append(v)
        return pool

    def find_disperse(self, state: State, tag: int, kprime: int) -> tuple[list[ClopenSet], int] | None:
        """First ``kprime``-disperse sequence of admissible clopen sets, by (count, height, lex)."""
        b = self.sc.budgets
        admissible: dict[ClopenSet, bool] = {}
        pools: dict[int, list[ClopenSet]] = {}
        # every family of nonempty subsets of at most kprime points is coverable
        heights = [h for h in range(1, b.height_bound + 1) if 2 ** h > kprime]
        tried = 0
        count = kprime + 1
        while True:
            feasible = False
            for h in heights:
                if h not in pools:
                    pools[h] = self._pool(state, tag, h, admissible)
                pool = pools[h]
                if len(pool) < count:
                    continue
                feasible = True
                for combo in combinations(pool, count):
                    tried += 1
                    if tried > b.rii_combos:
                        return None
                    if is_disperse(list(combo), kprime):
                        return list(combo), tried
            if not feasible:
                return None
            count += 1

    def _families(self, vs: Sequence[ClopenSet], e: int) -> list[frozenset[int]]:
        key = (tuple(vs), e)
        if key not in self._disperse_cache:
            self._disperse_cache[key] = minimal_disperse_subsets(list(vs), e)
        return self._disperse_cache[key]

    def r_ii_operation(self, state: State, tag: int) -> Outcome:
        cond = state.cond
        kprime = sum(sum(state.counters(i, tag)) for i in range(cond.k))
        found = self.find_disperse(state, tag, kprime)
        if found is None:
            return Outcome("stuck", state, {"kprime": kprime})
        vs, tried = found
        tvs = [self.t_v(state, tag, v) for v in vs]
        comps: list[tuple[int, str, frozenset[int]]] = []  # (parent, side, member)
        for c in range(2 * cond.k):
            parent, side = divmod(c, 2)
            e = state.counters(parent, tag)[side]
            for member in self._families(vs, e):
                comps.append((parent, SIDES[side], member))
        new_paths = []
        for combo in islice(product(*tvs), self.sc.budgets.path_cap):
            row = []
            for parent, side, member in comps:
                c = 2 * parent + SIDES.index(side)
                acc = _low_mask(self.d)
                for p in member:
                    acc &= combo[p][c]
                row.append(acc)
            new_paths.append(tuple(row))
        out = state.copy()
        stems, progress = [], []
        for parent, side, _ in comps:
            stems.append(cond.stems[parent])
            prog = dict(state.progress[parent])
            el, er = state.counters(parent, tag)
            prog[tag] = (el + 1, er) if side == "l" else (el, er + 1)
            progress.append(prog)
        out.cond = ForcingCondition(stems, PartitionTree(len(comps), self.d, tuple(new_paths)), cond.deficit)
        out.progress = progress
        out.parents = [parent for parent, _, _ in comps]
        out.sides = [side for _, side, _ in comps]
        info = {
            "kprime": kprime,
            "sequence": [v.sorted() for v in vs],
            "combos_tried": tried,
            "families": [[side, parent + 1, sorted(m + 1 for m in member)] for parent, side, member in comps],
        }
        return Outcome("case_ii", out, info)

    def compress(self, state: State) -> tuple[State, list[int]]:
        """Drop parts empty on every path and repeats of an earlier part with the same parent and side."""
        cond = state.cond
        paths = cond.tree.paths
        seen: set = set()
        keep = []
        for i in range(cond.k):
            column = tuple(p[i] for p in paths)
            if not any(column):
                continue
            key = (state.parents[i], state.sides[i], cond.stems[i], column)
            if key in seen:
                continue
            seen.add(key)
            keep.append(i)
        out = state.copy()
        tree = PartitionTree(len(keep), self.d, tuple(tuple(p[i] for i in keep) for p in paths))
        out.cond = ForcingCondition([cond.stems[i] for i in keep], tree, cond.deficit)
        out.progress = [dict(state.progress[i]) for i in keep]
        out.parents = [state.parents[i] for i in keep]
        out.sides = [state.sides[i] for i in keep]
        return out, keep

    # -- the step loop --------------------------------------------------

    def ri_bound(self, tag: int, k: int) -> int:
        return (self.sc.halting_entries(tag) + 1) * 2 * k

    def step(self, state: State, s: int) -> State:
        if s > self.sc.steps or s < 1:
            return state
        tag = self.sc.schedule[s - 1]
        b = self.sc.budgets
        start = state
        cur = state.copy()
        cur.parents = list(range(cur.k))
        cur.sides = [None] * cur.k
        loops = 0
        bound = self.ri_bound(tag, cur.k)
        limit = bound if b.ri_loop is None else b.ri_loop
        while True:
            res = self.r_i_operation(cur, tag, b.ri_search)
            self._emit({"op": "r_i", "step": s, "tag": tag, "outcome": res.kind, **res.info,
                        **self._shape(res.state)})
            if res.kind != "case_i":
                break
            cur = res.state
            loops += 1
            if loops >= limit:
                raise EngineError(f"R-i repeated {loops} times, budget {limit}", s, "r_i")
        res = self.r_ii_operation(cur, tag)
        self._emit({"op": "r_ii", "step": s, "tag": tag, "outcome": res.kind, **res.info, **self._shape(res.state)})
        if res.kind == "stuck":
            raise EngineError(
                f"no admissible {res.info['kprime']}-disperse sequence up to height {b.height_bound}", s, "r_ii"
            )
        crossed = res.state
        if b.compress:
            cur, kept = self.compress(crossed)
            self._emit({"op": "compress", "step": s, "kept": [i + 1 for i in kept], "dropped": crossed.k - len(kept),
                        **self._shape(cur)})
        else:
            cur = crossed
        mixed = check_fac7(cur.cond.tree, self.a)
        succeeded = 0
        for i in range(cur.k):
            side = cur.sides[i]
            res = self.p_operation(cur, i, side)
            self._emit({"op": "p", "step": s, "part": i + 1, "side": side, "outcome": res.kind, **res.info,
                        **self._shape(res.state)})
            if res.kind == "succeeded":
                cur = res.state
                succeeded += 1
        cur.step = s
        self._emit(self.state_record(cur, s, tag, start, {"ri_loops": loops, "ri_bound": bound,
                                                           "p_succeeded": succeeded,
                                                           "mixed_part": [mixed[0] + 1, mixed[1] + 1] if mixed else None}))
        return cur

    def run(self) -> State:
        state = initial_state(self.d)
        self._emit(self.header())
        self._emit(self.state_record(state, 0, None, None, {}))
        for s in range(1, self.sc.steps + 1):
            state = self.step(state, s)
        self._emit({"op": "report", **construction_report(self.records, self.a)})
        return state

    # -- records ----------------------------------------------------------

    def header(self) -> dict:
        return {
            "op": "header",
            "scenario": self.sc.name,
            "depth": self.d,
            "steps": self.sc.steps,
            "A": {"pattern": self.sc.a_pattern, "prefix": self.sc.a_prefix},
            "schedule": list(self.sc.schedule[: self.sc.steps]),
            "seed": self.sc.seed,
        }

    @staticmethod
    def _shape(state: State) -> dict:
        return {"k": state.k, "paths": len(state.cond.tree.paths), "nodes": node_count(state.cond.tree)}

    def state_record(self, state: State, s: int, tag: int | None, prev: State | None, extra: dict) -> dict:
        rec = {"op": "state", "step": s, "tag": tag, **snapshot(state), **extra}
        rec["verdicts"] = step_verdicts(state, prev, tag, self.a)
        return rec


def node_count(t: PartitionTree) -> int:
    """Nodes of the interleaved binary tree, without materialising it."""
    if not t.paths:
        return 0
    strings = sorted(
        "".join("".join("1" if (m >> j) & 1 else "0" for m in p) for j in range(t.d)) for p in t.paths
    )
    total, prev = 1, ""
    for s in strings:
        common = 0
        for a, b in zip(prev, s):
            if a != b:
                break
            common += 1
        total += len(s) - common
        prev = s
    return total


def snapshot(state: State) -> dict:
    return {
        "stems": [list(p) for p in state.cond.stems],
        "tree": [list(p) for p in state.cond.tree.paths],
        "deficit": sorted(state.cond.deficit),
        "progress": [{str(t): list(v) for t, v in sorted(p.items())} for p in state.progress],
        "parents": [p + 1 for p in state.parents],
        "sides": list(state.sides),
    }


def state_from_snapshot(rec: dict, d: int) -> State:
    stems = [tuple(p) for p in rec["stems"]]
    tree = PartitionTree(len(stems), d, tuple(tuple(p) for p in rec["tree"]))
    cond = ForcingCondition(stems, tree, frozenset(rec["deficit"]))
    progress = [{int(t): tuple(v) for t, v in p.items()} for p in rec["progress"]]
    return State(cond, progress, [p - 1 for p in rec["parents"]], list(rec["sides"]), rec["step"])


def step_verdicts(state: State, prev: State | None, tag: int | None, a: Callable[[int], bool]) -> dict:
    """The four per-step invariants, each as a list of failure messages (empty means pass)."""
    out = {"conditions": condition_violations(state.cond, a), "chain": [], "progress": [], "fading": []}
    if prev is None:
        return out
    if not cond_extends(state.cond, prev.cond, state.parents):
        out["chain"].append("new condition does not extend the old one along the part map")
    tags = set()
    for p in state.progress + prev.progress:
        tags.update(p)
    if tag is not None:
        tags.add(tag)
    for i, parent in enumerate(state.parents):
        for t in sorted(tags):
            new, old = state.counters(i, t), prev.counters(parent, t)
            if new[0] < old[0] or new[1] < old[1]:
                out["progress"].append(f"part {i} tag {t}: {old} -> {new} decreases")
        if tag is not None and sum(state.counters(i, tag)) <= sum(prev.counters(parent, tag)):
            out["progress"].append(f"part {i} did not step forward on tag {tag}")
        for side in SIDES:
            if fading(prev.cond, a, parent, side) and not fading(state.cond, a, i, side):
                out["fading"].append(f"part {i} revives side {side} of faded part {parent}")
    return out


def construction_report(records: Sequence[dict], a: Callable[[int], bool]) -> dict:
    """Deepest branch of the construction tree that never fades on one fixed side."""
    header = next(r for r in records if r["op"] == "header")
    d = header["depth"]
    states = [state_from_snapshot(r, d) for r in records if r["op"] == "state"]
    best = {"side": None, "branch": [], "g_prefix": ""}
    for side in SIDES:
        # depth[s][i]: longest non-fading chain ending at part i of level s
        chains: list[list[list[int] | None]] = []
        for s, st in enumerate(states):
            level = []
            for i in range(st.k):
                if fading(st.cond, a, i, side):
                    level.append(None)
                elif s == 0:
                    level.append([i])
                else:
                    prev = chains[s - 1][st.parents[i]]
                    level.append(None if prev is None else prev + [i])
            chains.append(level)
        for s in range(len(states) - 1, -1, -1):
            alive = [c for c in chains[s] if c is not None]
            if alive:
                branch = alive[0]
                if len(branch) > len(best["branch"]):
                    last = states[len(branch) - 1]
                    stem = last.cond.stems[branch[-1]][SIDES.index(side)]
                    best = {"side": side, "branch": [i + 1 for i in branch], "g_prefix": stem}
                break
    return best
