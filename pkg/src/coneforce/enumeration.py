"""Strong enumerations, extraction from staged families, and toy machines."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Iterable, Mapping, Sequence

from .strings import check_string, is_prefix, strings_of_length
from .trees import FinTree, is_homogeneous, symbol_level


class ContractError(ValueError):
    pass


class BudgetError(RuntimeError):
    pass


@dataclass(frozen=True)
class StrongEnumeration:
    """Finite sets of strings indexed by a contiguous range of levels.

    With block width ``w`` the value at level ``n`` holds strings of
    ``n * w`` bits.
    """

    bound: int
    values: Mapping[int, frozenset[str]]
    lo: int
    hi: int
    width: int = 1

    def __post_init__(self):
        vals = {n: frozenset(check_string(s) for s in d) for n, d in dict(self.values).items()}
        missing = [n for n in range(self.lo, self.hi + 1) if n not in vals]
        if missing:
            raise ValueError(f"no value at levels {missing}")
        object.__setattr__(self, "values", vals)

    @property
    def range(self) -> range:
        return range(self.lo, self.hi + 1)

    def __getitem__(self, n: int) -> frozenset[str]:
        return self.values[n]

    def is_well_formed(self) -> bool:
        return all(
            len(self.values[n]) <= self.bound and all(len(s) == n * self.width for s in self.values[n])
            for n in self.range
        )


def check_strong_enum(h: StrongEnumeration, q: FinTree, krange: Iterable[int] | None = None) -> bool:
    """Every level in ``krange`` has at most ``bound`` strings, one of them in ``q``."""
    levels = list(h.range if krange is None else krange)
    for n in levels:
        if n not in h.values:
            raise ValueError(f"level {n} outside the enumeration's range")
        if not 0 <= n <= q.symbol_depth:
            raise ValueError(f"level {n} outside the tree's depth")
    for n in levels:
        d = h.values[n]
        if len(d) > h.bound or not (d & symbol_level(q, n)):
            return False
    return True


def first_failure(h: StrongEnumeration, q: FinTree) -> int | None:
    for n in h.range:
        if not check_strong_enum(h, q, [n]):
            return n
    return None


@dataclass(frozen=True)
class EnumerationStages:
    """Stages of a growing family of equal-length string sets.

    With ``closed`` set (the default) each stage lists maximal members and
    the family is their downward closure (nonempty subsets only); otherwise
    each stage is listed explicitly.
    """

    stages: tuple[tuple[frozenset[str], ...], ...]
    closed: bool = True

    def __post_init__(self):
        st = tuple(tuple(frozenset(check_string(s) for s in w) for w in stage) for stage in self.stages)
        for stage in st:
            for w in stage:
                if len({len(s) for s in w}) > 1:
                    raise ValueError(f"mixed lengths in {sorted(w)}")
        object.__setattr__(self, "stages", st)

    def __len__(self) -> int:
        return len(self.stages)

    def contains(self, t: int, w: frozenset[str]) -> bool:
        if not w:
            return True
        if self.closed:
            return any(w <= g for g in self.stages[t])
        return w in self.stages[t]

    def is_monotone(self) -> bool:
        return all(
            all(self.contains(t + 1, w) for w in self.stages[t]) for t in range(len(self.stages) - 1)
        )

    def remaining(self, t: int, n: int) -> list[frozenset[str]]:
        """Nonempty sets of length-``n`` strings not yet enumerated at stage ``t``.

        Explicit enumeration of all ``2 ** 2 ** n`` candidates: small ``n`` only.
        """
        level = sorted(strings_of_length(n))
        out = []
        for r in range(1, len(level) + 1):
            for c in combinations(level, r):
                w = frozenset(c)
                if not self.contains(t, w):
                    out.append(w)
        return out


def _hits_everything(e: EnumerationStages, t: int, n: int, hit: Sequence[str], level: Sequence[str]) -> bool:
    rest = frozenset(level) - set(hit)
    if e.closed:
        # every remaining set meets ``hit`` iff the complement of ``hit`` is enumerated
        return e.contains(t, rest)
    return all(set(w) & set(hit) for w in e.remaining(t, n))


def _part_intersection(e: EnumerationStages, t: int, level: Sequence[str], hit: Sequence[str], j: int):
    """Common strings of the sets first hit by ``hit[j]``; None when no set is."""
    earlier = set(hit[:j])
    if e.closed:
        if e.contains(t, frozenset(level) - earlier):
            return None
        common = {hit[j]}
        for r in level:
            if r in earlier or r == hit[j]:
                continue
            if e.contains(t, frozenset(level) - earlier - {r}):
                common.add(r)
        return common
    members = [w for w in e.remaining(t, len(hit[j])) if hit[j] in w and not (w & earlier)]
    if not members:
        return None
    return set.intersection(*(set(w) for w in members))


def extract_enum(e: EnumerationStages, kprime: int, n: int, budget: int | None = None) -> frozenset[str]:
    """Up to ``kprime`` strings of length ``n``, found at the first stage that allows it.

    At each stage the remaining sets are grouped by the first member of a
    hitting set of at most ``kprime`` strings (hitting sets are tried by
    size, then lexicographically); the leftmost common string of each
    group is returned.
    """
    level = sorted(strings_of_length(n))
    stop = len(e) if budget is None else min(budget, len(e))
    for t in range(stop):
        hit = _first_hit(e, t, n, kprime, level)
        if hit is None:
            continue
        out = set()
        for j in range(len(hit)):
            common = _part_intersection(e, t, level, hit, j)
            if common is not None:
                out.add(min(common))
        return frozenset(out)
    raise BudgetError(f"no {kprime}-grouping of level {n} within {stop} stages")


def _first_hit(e: EnumerationStages, t: int, n: int, kprime: int, level: Sequence[str]):
    """The first hitting set of at most ``kprime`` strings, by size then lexicographically."""
    if e.closed:
        # a hitting set works iff it contains the complement of some generator;
        # the smallest such complements are exactly the first candidates
        full = frozenset(level)
        if e.contains(t, full):
            return ()
        # the empty set always counts as enumerated, so the whole level is a candidate
        comps = {tuple(sorted(full - g)) for g in (*e.stages[t], frozenset()) if g <= full}
        comps = [c for c in comps if len(c) <= kprime]
        if not comps:
            return None
        size = min(len(c) for c in comps)
        return min(c for c in comps if len(c) == size)
    for size in range(0, kprime + 1):
        for hit in combinations(level, size):
            if _hits_everything(e, t, n, hit, level):
                return hit
    return None


def extract_enum_bruteforce(e: EnumerationStages, kprime: int, n: int) -> frozenset[str] | None:
    """Reference search over explicit assignments of the remaining sets to parts."""
    for t in range(len(e)):
        ws = e.remaining(t, n)
        for assignment in product(range(kprime), repeat=len(ws)):
            parts: list[list[frozenset[str]]] = [[] for _ in range(kprime)]
            for w, p in zip(ws, assignment):
                parts[p].append(w)
            commons = [set.intersection(*(set(w) for w in part)) for part in parts if part]
            if all(commons):
                return frozenset(min(c) for c in commons)
    return None


def enumeration_from_stages(e: EnumerationStages, kprime: int, levels: Iterable[int], budget: int | None = None):
    levels = list(levels)
    vals = {n: extract_enum(e, kprime, n, budget) for n in levels}
    return StrongEnumeration(kprime, vals, min(levels), max(levels))


def reduce_enum_homogeneous(t: FinTree, h: StrongEnumeration) -> str | StrongEnumeration:
    """One round of the homogeneous-tree reduction.

    If the top level of ``h`` holds an off-tree string ``s``, returns the
    enumeration with bound one less whose level ``n`` value is the set of
    length-``n`` prefixes of the other top-level strings.  Otherwise reads
    a path symbol by symbol from the strings above the last level holding
    an off-tree string.
    """
    if not is_homogeneous(t) or not t.is_pruned():
        raise ContractError("tree must be pruned and homogeneous")
    if h.width != t.width:
        raise ContractError("enumeration and tree use different block widths")
    if not check_strong_enum(h, t):
        raise ContractError("not a strong enumeration of the tree's levels")
    w = h.width
    off = [n for n in h.range if any(s not in t.nodes for s in h[n])]
    last_off = off[-1] if off else h.lo - 1
    if last_off == h.hi:
        top = sorted(h[h.hi])
        sigma = next(s for s in top if s not in t.nodes)
        keep = [s for s in top if s != sigma]
        vals = {n: frozenset(s[: n * w] for s in keep) for n in h.range}
        return StrongEnumeration(h.bound - 1, vals, h.lo, h.hi, w)
    symbols: list[str] = []
    for m in range(last_off + 1, h.hi + 1):
        for s in sorted(h[m]):
            while len(symbols) < m and len(symbols) * w < len(s):
                c = len(symbols)
                symbols.append(s[c * w:(c + 1) * w])
    return "".join(symbols)


def extract_path(t: FinTree, h: StrongEnumeration) -> tuple[str, int]:
    """Iterate the reduction until a path appears; returns it with the number of reductions."""
    reductions = 0
    current: str | StrongEnumeration = h
    while isinstance(current, StrongEnumeration):
        nxt = reduce_enum_homogeneous(t, current)
        if isinstance(nxt, StrongEnumeration):
            reductions += 1
        current = nxt
    return current, reductions


@dataclass(frozen=True)
class ToyPrefixMachine:
    programs: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        progs = {check_string(p): check_string(o) for p, o in dict(self.programs).items()}
        keys = sorted(progs)
        for a, b in combinations(keys, 2):
            if is_prefix(a, b) or is_prefix(b, a):
                raise ValueError(f"programs {a!r} and {b!r} are comparable")
        object.__setattr__(self, "programs", progs)

    def __hash__(self):
        return hash(frozenset(self.programs.items()))


def complexity(u: ToyPrefixMachine, s: str) -> float:
    """Length of the shortest program printing ``s``; ``inf`` if none does."""
    return min((len(p) for p, o in u.programs.items() if o == s), default=math.inf)


def incompressible_level(u: ToyPrefixMachine, c: int, n: int) -> frozenset[str]:
    return frozenset(s for s in strings_of_length(n) if complexity(u, s) >= n - c)


def kraft_sum(u: ToyPrefixMachine) -> Fraction:
    return sum((Fraction(1, 2 ** len(p)) for p in u.programs), Fraction(0))


def compressible_bound(n: int, c: int) -> int:
    """At most this many length-``n`` strings have complexity below ``n - c``."""
    return 2 ** int(n - c) - 1 if n > c else 0
