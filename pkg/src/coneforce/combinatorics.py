"""Ordered partitions, disperse sequences, supporters and the Cross operation.

Partitions here are *ordered* and parts may overlap or be empty.  Both the
disperse and the supporter predicates are monotone under shrinking parts,
so exhaustive searches only range over the ``u ** n`` disjoint assignments.
Indices of clopen sets and of supporter members are 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product
from typing import Iterable, Sequence

import numpy as np

from .strings import ClopenSet, intersect_all


@dataclass(frozen=True)
class OrderedPartition:
    ground: frozenset[int]
    parts: tuple[frozenset[int], ...]

    def __post_init__(self):
        object.__setattr__(self, "ground", frozenset(self.ground))
        object.__setattr__(self, "parts", tuple(frozenset(p) for p in self.parts))

    @property
    def u(self) -> int:
        return len(self.parts)

    def covers(self) -> bool:
        return frozenset().union(*self.parts) >= self.ground if self.parts else not self.ground

    def is_valid(self) -> bool:
        """Parts lie inside the ground set and cover it."""
        return all(p <= self.ground for p in self.parts) and self.covers()


def _canonical_family(family: Iterable[Iterable[int]]) -> tuple[frozenset[int], ...]:
    fam = {frozenset(k) for k in family}
    return tuple(sorted(fam, key=lambda k: tuple(sorted(k))))


@dataclass(frozen=True)
class Supporter:
    """A tuple of families of subsets of ``{0, ..., n-1}``."""

    n: int
    families: tuple[tuple[frozenset[int], ...], ...]

    def __post_init__(self):
        fams = tuple(_canonical_family(f) for f in self.families)
        for fam in fams:
            for k in fam:
                if not all(0 <= x < self.n for x in k):
                    raise ValueError(f"member {sorted(k)} not inside 0..{self.n - 1}")
        object.__setattr__(self, "families", fams)

    @property
    def u(self) -> int:
        return len(self.families)

    @property
    def size(self) -> int:
        return sum(len(f) for f in self.families)


def assignments(n: int, u: int) -> Iterable[tuple[int, ...]]:
    """All maps ``{0..n-1} -> {0..u-1}``, in lexicographic order."""
    return product(range(u), repeat=n)


def partition_of(assignment: Sequence[int], u: int) -> list[frozenset[int]]:
    parts: list[set[int]] = [set() for _ in range(u)]
    for idx, part in enumerate(assignment):
        parts[part].add(idx)
    return [frozenset(p) for p in parts]


def _coverable(vs: Sequence[ClopenSet], indices: Sequence[int], u: int) -> bool:
    """Can ``indices`` be split into at most ``u`` groups with nonempty intersections?"""
    groups: list[ClopenSet] = []

    def place(pos: int) -> bool:
        if pos == len(indices):
            return True
        v = vs[indices[pos]]
        for g_idx, g in enumerate(groups):
            meet = g.intersect(v)
            if not meet.is_empty():
                groups[g_idx] = meet
                if place(pos + 1):
                    return True
                groups[g_idx] = g
        if len(groups) < u and not v.is_empty():
            groups.append(v)
            if place(pos + 1):
                return True
            groups.pop()
        return False

    return place(0)


def is_disperse(vs: Sequence[ClopenSet], u: int, indices: Iterable[int] | None = None) -> bool:
    """True iff every ordered ``u``-partition of the indices has a part with empty intersection.

    Implemented as a backtracking search for a grouping into at most ``u``
    classes with nonempty intersections; :func:`is_disperse_bruteforce` is
    the assignment-enumerating reference.
    """
    idx = list(range(len(vs))) if indices is None else sorted(indices)
    return not _coverable(vs, idx, u)


def is_disperse_bruteforce(vs: Sequence[ClopenSet], u: int) -> bool:
    for assignment in assignments(len(vs), u):
        parts = partition_of(assignment, u)
        if all(not intersect_all(vs[j] for j in part).is_empty() for part in parts):
            return False
    return True


@lru_cache(maxsize=None)
def _assignment_masks(n: int, u: int) -> np.ndarray:
    """Array of shape (u**n, u): the part bitmasks of every assignment."""
    if n == 0:
        return np.zeros((1, u), dtype=np.int64)
    grid = np.array(list(assignments(n, u)), dtype=np.int64)
    masks = np.zeros((grid.shape[0], u), dtype=np.int64)
    for idx in range(n):
        for part in range(u):
            masks[:, part] |= np.where(grid[:, idx] == part, 1 << idx, 0)
    return masks


def _down_lookup(family: Sequence[frozenset[int]], n: int) -> np.ndarray:
    """``out[m]`` is True iff some member of the family is contained in mask ``m``."""
    out = np.zeros(1 << n, dtype=bool)
    for k in family:
        km = sum(1 << x for x in k)
        out[(np.arange(1 << n) & km) == km] = True
    return out


def supporter_counterexample(k: Supporter, u: int, n: int) -> tuple[frozenset[int], ...] | None:
    """The first disjoint ``u``-partition of ``{0..n-1}`` that no member fits, if any."""
    if k.u != u:
        raise ValueError(f"supporter has {k.u} families, expected {u}")
    if u == 0:
        return ()
    masks = _assignment_masks(n, u)
    ok = np.zeros(masks.shape[0], dtype=bool)
    for i, fam in enumerate(k.families):
        ok |= _down_lookup(fam, n)[masks[:, i]]
    bad = np.flatnonzero(~ok)
    if bad.size == 0:
        return None
    row = masks[bad[0]]
    return tuple(frozenset(j for j in range(n) if (int(m) >> j) & 1) for m in row)


def is_supporter(k: Supporter, u: int, n: int) -> bool:
    """Brute force over all ``u ** n`` disjoint ordered partitions."""
    return supporter_counterexample(k, u, n) is None


def supporter_from_disperse(vs: Sequence[ClopenSet], e: Sequence[int]) -> Supporter:
    """For each ``e_i``, the family of index sets whose subsequence is ``e_i``-disperse."""
    kprime = sum(e)
    if not is_disperse(vs, kprime):
        raise ValueError(f"sequence is not {kprime}-disperse")
    n = len(vs)
    cache: dict[tuple[frozenset[int], int], bool] = {}

    def disperse(subset: frozenset[int], ei: int) -> bool:
        key = (subset, ei)
        if key not in cache:
            cache[key] = is_disperse(vs, ei, subset)
        return cache[key]

    subsets = [frozenset(c) for r in range(n + 1) for c in combinations(range(n), r)]
    families = [[s for s in subsets if disperse(s, ei)] for ei in e]
    return Supporter(n, tuple(tuple(f) for f in families))


def minimal_disperse_subsets(vs: Sequence[ClopenSet], e: int) -> list[frozenset[int]]:
    """The inclusion-minimal index sets whose subsequence is ``e``-disperse."""
    n = len(vs)
    found: list[frozenset[int]] = []
    found_set: set[frozenset[int]] = set()
    for r in range(n + 1):
        fresh = False
        for combo in combinations(range(n), r):
            s = frozenset(combo)
            if any(f <= s for f in found_set if len(f) < r):
                continue
            fresh = True
            if is_disperse(vs, e, s):
                found.append(s)
                found_set.add(s)
        if not fresh:
            break
    return sorted(found, key=lambda k: tuple(sorted(k)))


def cross_partitions(xs: Sequence[OrderedPartition], k: Supporter) -> OrderedPartition:
    """Intersect same-index parts along every supporter member.

    Output parts are ordered by family index, then by the sorted member.
    The intersection over an empty member is the whole ground set.
    """
    if len(xs) != k.n:
        raise ValueError(f"expected {k.n} partitions, got {len(xs)}")
    if not xs:
        raise ValueError("cross needs at least one partition")
    ground = xs[0].ground
    for x in xs:
        if x.ground != ground:
            raise ValueError("partitions have different ground sets")
        if x.u != k.u:
            raise ValueError(f"partition has {x.u} parts, supporter has {k.u} families")
    parts = []
    for i, fam in enumerate(k.families):
        for member in fam:
            y = set(ground)
            for p in member:
                y &= xs[p].parts[i]
            parts.append(frozenset(y))
    return OrderedPartition(ground, tuple(parts))

