"""Finite pruned subtrees of the full binary tree of a fixed depth.

A tree may carry a block ``width``: a finitely branching tree over the
alphabet ``{0, ..., 2**width - 1}`` is stored as a binary tree in which each
symbol occupies ``width`` consecutive bits.  Symbol-level notions
(homogeneity, levels of a symbol tree) are read at block boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Sequence

from .strings import check_string, overwrite, project, strings_up_to


def _prefix_closed(nodes: frozenset[str]) -> bool:
    return all(n[:-1] in nodes for n in nodes if n)


@dataclass(frozen=True)
class FinTree:
    depth: int
    nodes: frozenset[str] = field(default_factory=frozenset)
    width: int = 1

    def __post_init__(self):
        nodes = frozenset(self.nodes)
        for n in nodes:
            check_string(n)
            if len(n) > self.depth:
                raise ValueError(f"node {n!r} deeper than {self.depth}")
        if not _prefix_closed(nodes):
            raise ValueError("node set is not prefix-closed")
        object.__setattr__(self, "nodes", nodes)

    def __contains__(self, s: str) -> bool:
        return s in self.nodes

    def __len__(self) -> int:
        return len(self.nodes)

    def is_empty(self) -> bool:
        return not self.nodes

    def is_pruned(self) -> bool:
        return prune(self.nodes, self.depth).nodes == self.nodes

    def meets(self, s: str) -> bool:
        """True iff the cylinder of ``s`` contains a path of this tree."""
        if len(s) <= self.depth:
            return s in self.nodes
        return s[: self.depth] in self.nodes

    @property
    def symbol_depth(self) -> int:
        return self.depth // self.width


def prune(raw: Iterable[str], d: int, width: int = 1) -> FinTree:
    """Largest subset of ``raw`` in which every node extends to length ``d``."""
    nodes = frozenset(raw)
    if not _prefix_closed(nodes):
        raise ValueError("node set is not prefix-closed")
    alive = {n for n in nodes if len(n) == d}
    for length in range(d - 1, -1, -1):
        alive |= {n for n in nodes if len(n) == length and (n + "0" in alive or n + "1" in alive)}
    return FinTree(d, frozenset(n for n in alive if len(n) <= d), width)


def full_tree(d: int) -> FinTree:
    return FinTree(d, frozenset(strings_up_to(d)))


def from_paths(paths: Iterable[str], d: int, width: int = 1) -> FinTree:
    nodes = set()
    for p in paths:
        if len(p) != d:
            raise ValueError(f"path {p!r} is not of length {d}")
        nodes.update(p[:m] for m in range(d + 1))
    return FinTree(d, frozenset(nodes), width)


def level(t: FinTree, n: int) -> frozenset[str]:
    if not 0 <= n <= t.depth:
        raise ValueError(f"level {n} outside 0..{t.depth}")
    return frozenset(s for s in t.nodes if len(s) == n)


def symbol_level(t: FinTree, n: int) -> frozenset[str]:
    return level(t, n * t.width)


def paths(t: FinTree) -> list[str]:
    return sorted(s for s in t.nodes if len(s) == t.depth)


def is_homogeneous(t: FinTree) -> bool:
    """Membership beyond a block boundary is independent of the prefix up to it.

    Equivalent to: for all equal-length nodes ``a``, ``b`` (length a multiple
    of the width) and every string ``r`` at least that long,
    ``overwrite(r, a)`` is a node iff ``overwrite(r, b)`` is.
    """
    for length in range(0, t.depth + 1, t.width):
        tails: dict[str, set[str]] = {}
        for s in t.nodes:
            if len(s) >= length:
                tails.setdefault(s[:length], set()).add(s[length:])
        groups = iter(tails.values())
        first = next(groups, None)
        if any(g != first for g in groups):
            return False
    return True


def is_homogeneous_bruteforce(t: FinTree) -> bool:
    """Direct quantification over all strings; exponential in the depth."""
    for length in range(0, t.depth + 1, t.width):
        lev = sorted(level(t, length))
        for rho in strings_up_to(t.depth):
            if len(rho) < length:
                continue
            verdicts = {overwrite(rho, a) in t.nodes for a in lev}
            if len(verdicts) > 1:
                return False
    return True


def level_choice_tree(choices: Sequence[Iterable[int]], width: int = 1) -> FinTree:
    """The homogeneous tree whose ``n``-th symbol ranges over ``choices[n]``."""
    blocks = []
    for allowed in choices:
        allowed = sorted(set(allowed))
        if not allowed:
            raise ValueError("every level needs at least one symbol")
        if any(not 0 <= a < 2 ** width for a in allowed):
            raise ValueError(f"symbol outside 0..{2 ** width - 1}")
        blocks.append([format(a, f"0{width}b") for a in allowed])
    full_paths = ("".join(p) for p in product(*blocks))
    return from_paths(full_paths, len(choices) * width, width)


def level_choices(t: FinTree) -> list[frozenset[int]]:
    """Per-symbol-position sets of symbols occurring in the tree's paths."""
    w = t.width
    out = []
    for n in range(t.symbol_depth):
        out.append(frozenset(int(p[n * w:(n + 1) * w], 2) for p in paths(t)))
    return out


def decode_parts(x: str, k: int) -> list[frozenset[int]]:
    """The parts coded by an interleaved string, as sets of 0-based elements."""
    return [frozenset(j for j, c in enumerate(project(x, k, i)) if c == "1") for i in range(1, k + 1)]


def is_partition_tree(t: FinTree, k: int, w: Iterable[int]) -> bool:
    """Every path's decoded parts cover ``w`` below the horizon ``depth // k``."""
    horizon = t.depth // k
    target = {x for x in w if x < horizon}
    for x in paths(t):
        covered = frozenset().union(*decode_parts(x, k))
        if not target <= covered:
            return False
    return True
