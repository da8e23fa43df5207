"""Table-driven oracle functionals with bounded use, and abandonment.

A :class:`ToyFunctional` maps ``(oracle prefix, input)`` to a finite set of
strings.  Any ``(oracle, input)`` not covered by an entry diverges.  The
``bound`` field is the enumeration-size cutoff: an output with more strings
than ``bound`` is a size violation.  Outputs may also be the marker
:data:`BIG`, an output too large to list, which violates every bound.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Iterable, Mapping, Sequence, Union

from .strings import ClopenSet, check_string, char_string, is_prefix, overwrite, set_meets
from .trees import FinTree, decode_parts, from_paths, paths


class TableError(ValueError):
    pass


class _Big:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "BIG"

    def __reduce__(self):
        return (_Big, ())


BIG = _Big()

Output = Union[frozenset, _Big]


def output_size(d: Output) -> float:
    return float("inf") if d is BIG else len(d)


def output_meets(d: Output, v: ClopenSet) -> bool:
    return d is not BIG and set_meets(d, v)


@dataclass(frozen=True)
class ToyFunctional:
    bound: int
    entries: Mapping[tuple[str, int], Output] = field(default_factory=dict)

    def __post_init__(self):
        clean: dict[tuple[str, int], Output] = {}
        for (p, n), out in dict(self.entries).items():
            check_string(p)
            if n < 0:
                raise TableError(f"negative input {n}")
            if out is not BIG:
                out = frozenset(check_string(s) for s in out)
            clean[(p, n)] = out
        for (p, n), out in clean.items():
            for (q, m), other in clean.items():
                if m == n and p != q and is_prefix(p, q) and other != out:
                    raise TableError(f"inconsistent entries at input {n}: prefixes {p!r} and {q!r}")
        object.__setattr__(self, "entries", clean)

    @property
    def use(self) -> int:
        return max((len(p) for p, _ in self.entries), default=0)

    @property
    def inputs(self) -> list[int]:
        return sorted({n for _, n in self.entries})

    @property
    def halting_entries(self) -> int:
        return len(self.entries)

    def evaluate(self, oracle: str, n: int) -> Output | None:
        for m in range(min(len(oracle), self.use) + 1):
            out = self.entries.get((oracle[:m], n))
            if out is not None:
                return out
        return None

    def __hash__(self):
        return hash((self.bound, frozenset(self.entries.items())))


def never_halting(bound: int = 1) -> ToyFunctional:
    return ToyFunctional(bound, {})


@dataclass(frozen=True)
class FunctionalPair:
    left: ToyFunctional
    right: ToyFunctional


def evaluate(f: ToyFunctional, oracle: str, n: int) -> Output | None:
    """The output on ``(oracle, n)``, or ``None`` when it diverges."""
    return f.evaluate(oracle, n)


def is_bad(d: Output, v: ClopenSet, bound: int) -> bool:
    return output_size(d) > bound or not output_meets(d, v)


def abandon_witness(
    f: ToyFunctional, rho: str, v: ClopenSet, y: Iterable[int], horizon: int
) -> tuple[frozenset[int], int] | None:
    """A pair ``(Z, n)`` with ``Z`` inside ``y`` witnessing abandonment, or None.

    The oracle is the characteristic string of ``Z`` with ``rho`` written
    over its first bits.  Only positions in ``[len(rho), use)`` can change
    an output, so ``Z`` ranges over subsets of ``y`` in that window.
    """
    y = frozenset(y)
    if any(not 0 <= x < horizon for x in y):
        raise ValueError(f"set {sorted(y)} not inside 0..{horizon - 1}")
    length = max(horizon, len(rho), f.use)
    window = sorted(x for x in y if len(rho) <= x < f.use)
    inputs = [n for n in f.inputs if n <= horizon]
    for r in range(len(window) + 1):
        for z in combinations(window, r):
            oracle = overwrite(char_string(z, length), rho)
            for n in inputs:
                d = f.evaluate(oracle, n)
                if d is not None and is_bad(d, v, f.bound):
                    return frozenset(z), n
    return None


def abandons_on_set(f: ToyFunctional, rho: str, v: ClopenSet, y: Iterable[int], horizon: int) -> bool:
    return abandon_witness(f, rho, v, y, horizon) is not None


def pair_abandons(
    p: FunctionalPair, rho_l: str, rho_r: str, v: ClopenSet, x1: Iterable[int], x2: Iterable[int], horizon: int
) -> bool:
    """The pair abandons ``v`` on ``x1 (+) x2``: either side does."""
    return abandons_on_set(p.left, rho_l, v, x1, horizon) or abandons_on_set(p.right, rho_r, v, x2, horizon)


def pair_nonabandon_witness(
    p: FunctionalPair, rho_l: str, rho_r: str, v: ClopenSet, x: Iterable[int], horizon: int
) -> tuple[frozenset[int], frozenset[int]] | None:
    """A covering split of ``x`` on which neither side abandons ``v``.

    The first disjoint split (lexicographic in the side assignment, left
    first) that works is then grown greedily: a side that received elements
    takes every further element of ``x`` it can hold without abandoning,
    left side first.  An empty side stays empty.  ``None`` means the pair
    abandons ``v`` on ``x``.
    """
    xs = sorted(set(x))
    for assignment in product((0, 1), repeat=len(xs)):
        x1 = frozenset(e for e, s in zip(xs, assignment) if s == 0)
        x2 = frozenset(e for e, s in zip(xs, assignment) if s == 1)
        if not pair_abandons(p, rho_l, rho_r, v, x1, x2, horizon):
            return _grow(p.left, rho_l, v, x1, xs, horizon), _grow(p.right, rho_r, v, x2, xs, horizon)
    return None


def _grow(f: ToyFunctional, rho: str, v: ClopenSet, side: frozenset[int], xs: Sequence[int], horizon: int):
    if not side:
        return side
    for e in xs:
        if e not in side and not abandons_on_set(f, rho, v, side | {e}, horizon):
            side = side | {e}
    return side


def _splits(part: frozenset[int]) -> Iterable[tuple[frozenset[int], frozenset[int]]]:
    # covering splits: each element goes left, right or both
    xs = sorted(part)
    for assignment in product((0, 1, 2), repeat=len(xs)):
        left = frozenset(e for e, s in zip(xs, assignment) if s != 1)
        right = frozenset(e for e, s in zip(xs, assignment) if s != 0)
        yield left, right


def build_T_V(
    t: FinTree, psis: Sequence[FunctionalPair], rhos: Sequence[tuple[str, str]], v: ClopenSet
) -> FinTree:
    """The tree of ``2k``-interleaved splittings of ``t``'s paths that abandon nothing.

    ``t`` is a ``k``-partition tree whose depth is ``k`` times the element
    horizon.  Exhaustive over every covering split of every part, so only
    usable on small trees.
    """
    k = len(psis)
    if len(rhos) != k or k == 0:
        raise ValueError("need one functional pair and one stem pair per part")
    if t.depth % k:
        raise ValueError(f"depth {t.depth} is not a multiple of {k}")
    horizon = t.depth // k
    out_paths = []
    for x in paths(t):
        parts = decode_parts(x, k)
        options = []
        for i, part in enumerate(parts):
            good = [
                (left, right)
                for left, right in _splits(part)
                if not pair_abandons(psis[i], rhos[i][0], rhos[i][1], v, left, right, horizon)
            ]
            options.append(good)
        for choice in product(*options):
            comps = []
            for left, right in choice:
                comps.append(char_string(left, horizon))
                comps.append(char_string(right, horizon))
            out_paths.append(_interleave_equal(comps))
    return from_paths(set(out_paths), 2 * t.depth)


def _interleave_equal(comps: Sequence[str]) -> str:
    return "".join("".join(c[j] for c in comps) for j in range(len(comps[0]))) if comps else ""
