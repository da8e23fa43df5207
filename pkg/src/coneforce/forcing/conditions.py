"""Mathias conditions, partition trees held as path sets, and tree forcing conditions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from ..strings import bits, char_string, is_prefix, mask_to_set, set_to_mask
from ..trees import FinTree, from_paths

SIDES = ("l", "r")


@dataclass(frozen=True)
class MathiasCondition:
    stem: str
    reservoir: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "reservoir", frozenset(self.reservoir))


def mathias_extends(c2: MathiasCondition, c1: MathiasCondition) -> bool:
    """``c2`` extends ``c1``: a strictly longer stem inside ``c1``'s allowed elements."""
    return (
        is_prefix(c1.stem, c2.stem)
        and len(c2.stem) > len(c1.stem)
        and (c2.reservoir | bits(c2.stem)) <= (c1.reservoir | bits(c1.stem))
    )


def satisfies(g: str, c: MathiasCondition) -> bool:
    return is_prefix(c.stem, g) and len(g) > len(c.stem) and bits(g) <= bits(c.stem) | c.reservoir


@dataclass(frozen=True)
class PartitionTree:
    """A finite set of paths, each an ordered ``k``-tuple of parts of ``{0..d-1}``.

    Parts are bitmasks.  The binary tree it stands for interleaves the
    characteristic strings of the parts; see :meth:`to_fintree`.
    """

    k: int
    d: int
    paths: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        ps = tuple(sorted({tuple(p) for p in self.paths}))
        for p in ps:
            if len(p) != self.k:
                raise ValueError(f"path has {len(p)} parts, expected {self.k}")
            if any(m >> self.d for m in p):
                raise ValueError("part reaches beyond the ground set")
        object.__setattr__(self, "paths", ps)

    @classmethod
    def full(cls, d: int) -> "PartitionTree":
        return cls(1, d, (((1 << d) - 1,),))

    def is_empty(self) -> bool:
        return not self.paths

    def part(self, path: int, i: int) -> frozenset[int]:
        return mask_to_set(self.paths[path][i])

    def union(self, path: int) -> int:
        acc = 0
        for m in self.paths[path]:
            acc |= m
        return acc

    def restrict(self, keep: Callable[[tuple[int, ...]], bool]) -> "PartitionTree":
        return PartitionTree(self.k, self.d, tuple(p for p in self.paths if keep(p)))

    def to_fintree(self) -> FinTree:
        strings = []
        for p in self.paths:
            comps = [char_string(mask_to_set(m), self.d) for m in p]
            strings.append("".join("".join(c[j] for c in comps) for j in range(self.d)))
        return from_paths(strings, self.k * self.d)

    def node_count(self) -> int:
        return len(self.to_fintree()) if self.paths else 0


@dataclass
class ForcingCondition:
    """Stem pairs, one per part, with the partition tree supplying reservoirs."""

    stems: list[tuple[str, str]]
    tree: PartitionTree
    deficit: frozenset[int] = field(default_factory=frozenset)

    @property
    def k(self) -> int:
        return self.tree.k

    def horizon(self, i: int) -> int:
        return max(len(self.stems[i][0]), len(self.stems[i][1]))

    def mathias(self, path: int, i: int, side: str) -> MathiasCondition:
        stem = self.stems[i][SIDES.index(side)]
        return MathiasCondition(stem, self.tree.part(path, i))


def in_side(a: Callable[[int], bool], side: str, x: int) -> bool:
    return a(x) if side == "l" else not a(x)


def condition_violations(c: ForcingCondition, a: Callable[[int], bool]) -> list[str]:
    """Which of the four condition clauses fail, plus non-emptiness."""
    out = []
    t = c.tree
    if t.is_empty():
        out.append("tree empty")
    if len(c.stems) != t.k:
        out.append("(1) stem count differs from part count")
    elif any(max(len(l), len(r)) > t.d for l, r in c.stems):
        out.append("(1) stem longer than ground")
    ground = ((1 << t.d) - 1) & ~set_to_mask(c.deficit)
    if any((t.union(p) & ground) != ground for p in range(len(t.paths))):
        out.append("(2) parts do not cover ground minus deficit")
    if len(c.stems) == t.k:
        for i in range(t.k):
            below = (1 << c.horizon(i)) - 1
            if any(path[i] & below for path in t.paths):
                out.append(f"(3) part {i} meets its stem horizon")
                break
    for l, r in c.stems:
        if not all(a(x) for x in bits(l)) or any(a(x) for x in bits(r)):
            out.append("(4) stem bits on the wrong side")
            break
    return out


def cond_extends(c2: ForcingCondition, c1: ForcingCondition, p: Sequence[int]) -> bool:
    """``c2`` extends ``c1`` along the part map ``p`` (stems compared reflexively)."""
    if len(p) != c2.k or any(not 0 <= q < c1.k for q in p):
        return False
    for i, q in enumerate(p):
        for side in (0, 1):
            if not is_prefix(c1.stems[q][side], c2.stems[i][side]):
                return False
    for x2 in c2.tree.paths:
        for i, q in enumerate(p):
            for side in (0, 1):
                new = set_to_mask(bits(c2.stems[i][side])) | x2[i]
                old_stem = set_to_mask(bits(c1.stems[q][side]))
                if not any(new & ~(old_stem | x1[q]) == 0 for x1 in c1.tree.paths):
                    return False
    return True


def fading(c: ForcingCondition, a: Callable[[int], bool], i: int, side: str) -> bool:
    """No path puts an element of the side's colour into part ``i``."""
    side_mask = set_to_mask(x for x in range(c.tree.d) if in_side(a, side, x))
    return all(path[i] & side_mask == 0 for path in c.tree.paths)


def check_fac7(t: PartitionTree, a: Callable[[int], bool]) -> tuple[int, int] | None:
    """A part and path whose part meets both ``A`` and its complement, if any."""
    amask = set_to_mask(x for x in range(t.d) if a(x))
    cmask = ((1 << t.d) - 1) & ~amask
    for i in range(t.k):
        for idx, path in enumerate(t.paths):
            if path[i] & amask and path[i] & cmask:
                return i, idx
    return None


def eventually_periodic(pattern: str, prefix: str = "") -> Callable[[int], bool]:
    """Membership predicate: ``prefix`` then ``pattern`` repeated forever."""
    if not pattern:
        raise ValueError("empty pattern")

    def member(x: int) -> bool:
        if x < len(prefix):
            return prefix[x] == "1"
        return pattern[(x - len(prefix)) % len(pattern)] == "1"

    return member
