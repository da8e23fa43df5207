"""Finite binary strings and clopen subsets of Cantor space.

Binary strings are plain ``str`` objects over the characters ``"0"`` and
``"1"``.  Positions are 0-based: ``bits(rho)`` is the set of positions
holding a 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Iterator


def check_string(s: str) -> str:
    if any(c not in "01" for c in s):
        raise ValueError(f"not a binary string: {s!r}")
    return s


def is_prefix(a: str, b: str) -> bool:
    return len(a) <= len(b) and b.startswith(a)


def is_compatible(a: str, b: str) -> bool:
    """True iff one string is a prefix of the other."""
    return is_prefix(a, b) or is_prefix(b, a)


def overwrite(z: str, s: str) -> str:
    """``z`` with its first ``len(s)`` bits replaced by ``s``."""
    if len(z) < len(s):
        raise ValueError(f"cannot overwrite length {len(z)} string with length {len(s)}")
    return s + z[len(s):]


def project(x: str, n: int, i: int) -> str:
    """The ``i``-th (1-based) component of an ``n``-fold interleaving."""
    if not 1 <= i <= n:
        raise IndexError(f"component {i} out of range 1..{n}")
    return x[i - 1::n]


def interleave(parts: Iterable[str]) -> str:
    parts = list(parts)
    if not parts:
        return ""
    length = max(len(p) for p in parts)
    out = []
    for j in range(length):
        for p in parts:
            if j < len(p):
                out.append(p[j])
    return "".join(out)


def bits(s: str) -> frozenset[int]:
    return frozenset(i for i, c in enumerate(s) if c == "1")


def char_string(members: Iterable[int], length: int) -> str:
    members = set(members)
    return "".join("1" if i in members else "0" for i in range(length))


def mask_to_set(mask: int) -> frozenset[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return frozenset(out)


def set_to_mask(members: Iterable[int]) -> int:
    m = 0
    for x in members:
        m |= 1 << x
    return m


def strings_of_length(n: int) -> Iterator[str]:
    for t in product("01", repeat=n):
        yield "".join(t)


def strings_up_to(n: int) -> Iterator[str]:
    for m in range(n + 1):
        yield from strings_of_length(m)


@dataclass(frozen=True)
class ClopenSet:
    """A clopen set given by a finite antichain of generating strings."""

    generators: frozenset[str]

    def __post_init__(self):
        gens = frozenset(self.generators)
        for g in gens:
            check_string(g)
        for a in gens:
            for b in gens:
                if a != b and is_prefix(a, b):
                    raise ValueError(f"generators {a!r} and {b!r} are comparable")
        object.__setattr__(self, "generators", gens)

    @classmethod
    def of(cls, *gens: str) -> "ClopenSet":
        return cls(frozenset(gens))

    @classmethod
    def full(cls) -> "ClopenSet":
        return cls(frozenset([""]))

    @classmethod
    def empty(cls) -> "ClopenSet":
        return cls(frozenset())

    @property
    def height(self) -> int:
        return max((len(g) for g in self.generators), default=0)

    def is_empty(self) -> bool:
        return not self.generators

    def meets_string(self, s: str) -> bool:
        """True iff the cylinder of ``s`` meets this set."""
        return any(is_compatible(g, s) for g in self.generators)

    def meets(self, other: "ClopenSet") -> bool:
        return any(is_compatible(a, b) for a in self.generators for b in other.generators)

    def intersect(self, other: "ClopenSet") -> "ClopenSet":
        # the longer of each compatible pair; the result is again an antichain
        out = set()
        for a in self.generators:
            for b in other.generators:
                if is_prefix(a, b):
                    out.add(b)
                elif is_prefix(b, a):
                    out.add(a)
        return ClopenSet(frozenset(out))

    def leaves(self, depth: int) -> frozenset[str]:
        """The depth-``depth`` strings whose cylinders lie inside this set."""
        if depth < self.height:
            raise ValueError("depth below height")
        out = set()
        for g in self.generators:
            for tail in strings_of_length(depth - len(g)):
                out.add(g + tail)
        return frozenset(out)

    def sorted(self) -> list[str]:
        return sorted(self.generators, key=lambda g: (len(g), g))

    def __repr__(self) -> str:
        return "ClopenSet{" + ",".join(g or "ε" for g in self.sorted()) + "}"


def intersect_all(vs: Iterable[ClopenSet]) -> ClopenSet:
    """Intersection of a family; the empty family gives the whole space."""
    acc = ClopenSet.full()
    for v in vs:
        acc = acc.intersect(v)
        if acc.is_empty():
            break
    return acc


def set_meets(strings: Iterable[str], v: ClopenSet) -> bool:
    """True iff the clopen set generated by ``strings`` meets ``v``."""
    return any(v.meets_string(s) for s in strings)


def antichains(height: int) -> list[ClopenSet]:
    """Every clopen set with generators of length at most ``height``.

    Distinct antichains may denote the same subset of Cantor space
    (``{0}`` and ``{00, 01}``); both are listed.
    """

    def below(prefix: str, h: int) -> list[frozenset[str]]:
        # antichains inside the cylinder of prefix, generators of length <= h
        if len(prefix) == h:
            return [frozenset(), frozenset([prefix])]
        out = [frozenset([prefix])]
        for left in below(prefix + "0", h):
            for right in below(prefix + "1", h):
                out.append(left | right)
        return out

    sets = [ClopenSet(a) for a in below("", height)]
    return sorted(sets, key=lambda v: (len(v.generators), v.height, v.sorted()))
