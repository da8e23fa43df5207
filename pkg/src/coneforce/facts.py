"""Exhaustive verification suites for the combinatorial and abandonment facts.

Each suite returns a :class:`Report`.  Failures carry a small replayable
counterexample.  The search spaces are reduced by exact equivalences so
that "every sequence" or "every table" at the stated scale is covered:

* Disperse and supporter questions depend only on which index sets have
  a common point.  A sequence of clopen sets of height at most ``h`` is
  determined, up to that, by the set of index columns of the ``2**h``
  leaves, so the suites range over antichains of columns.
* Whether a use-bounded table abandons a fixed clopen set depends only
  on the set of length-``use`` oracle strings on which some input yields
  a bad output, so the abandonment suites range over those sets.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import combinations, combinations_with_replacement, product
from typing import Callable, Iterable, Sequence

from .combinatorics import (
    OrderedPartition,
    Supporter,
    cross_partitions,
    is_disperse,
    is_supporter,
    supporter_counterexample,
    supporter_from_disperse,
)
from .functionals import BIG, ToyFunctional, abandon_witness
from .strings import ClopenSet, antichains, bits, is_prefix, strings_of_length, strings_up_to


@dataclass
class Report:
    suite: str
    cases: int = 0
    failures: list[dict] = field(default_factory=list)
    wall: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures

    def fail(self, **counterexample) -> None:
        self.failures.append(counterexample)

    def line(self) -> str:
        verdict = "PASS" if self.passed else f"FAIL ({len(self.failures)} failures)"
        return f"{self.suite}: {verdict}, {self.cases} cases, {self.wall:.2f}s"


class BoundsError(ValueError):
    pass


# -- nerve classes ----------------------------------------------------------


def column_antichains(n: int, max_members: int) -> Iterable[tuple[int, ...]]:
    """Antichains of subsets of ``{0..n-1}`` (as bitmasks) with at most ``max_members`` members."""
    masks = list(range(1 << n))

    def incomparable(a: int, b: int) -> bool:
        return a & b != a and a & b != b

    def grow(chosen: list[int], start: int):
        yield tuple(chosen)
        if len(chosen) == max_members:
            return
        for idx in range(start, len(masks)):
            m = masks[idx]
            if all(incomparable(m, c) for c in chosen):
                chosen.append(m)
                yield from grow(chosen, idx + 1)
                chosen.pop()

    yield from grow([], 0)


def realize(columns: Sequence[int], n: int, height: int) -> list[ClopenSet]:
    """Clopen sets over the leaves of ``height`` whose leaf columns are ``columns`` (others empty)."""
    leaves = sorted(strings_of_length(height))
    if len(columns) > len(leaves):
        raise ValueError("more columns than leaves")
    return [
        ClopenSet(frozenset(leaves[t] for t, col in enumerate(columns) if (col >> j) & 1))
        for j in range(n)
    ]


def compositions(total_max: int) -> list[tuple[int, ...]]:
    """Positive integer vectors with sum at most ``total_max``."""
    out = []

    def rec(prefix: list[int], left: int):
        if prefix:
            out.append(tuple(prefix))
        for x in range(1, left + 1):
            rec(prefix + [x], left - x)

    rec([], total_max)
    return out


# -- suites -------------------------------------------------------------------


def suite_supporter(
    n_max: int = 5,
    height: int = 3,
    esum: int = 4,
    supporter_fn: Callable[[Sequence[ClopenSet], Sequence[int]], Supporter] = supporter_from_disperse,
) -> Report:
    """Disperse sequences yield supporters, over every intersection pattern."""
    rep = Report("supporter-from-disperse")
    t0 = time.perf_counter()
    vectors = compositions(esum)
    for n in range(1, n_max + 1):
        for cols in column_antichains(n, 2 ** height):
            vs = realize(cols, n, height)
            for e in vectors:
                if not is_disperse(vs, sum(e)):
                    continue
                rep.cases += 1
                k = supporter_fn(vs, e)
                bad = supporter_counterexample(k, len(e), n)
                if bad is not None:
                    rep.fail(sets=[v.sorted() for v in vs], e=list(e), partition=[sorted(p) for p in bad])
    rep.wall = time.perf_counter() - t0
    return rep


def _families_of(n: int) -> list[tuple[frozenset[int], ...]]:
    return [tuple(frozenset(j for j in range(n) if (m >> j) & 1) for m in a) for a in column_antichains(n, 1 << n)]


def suite_cross(w_max: int = 6, u_max: int = 3, n_max: int = 3) -> Report:
    """Cross along a supporter covers the ground set.

    Supporters range over tuples of antichains (a family covers exactly
    what its minimal members cover).  Coverage is decided element by
    element, so every profile of part memberships is placed in some ground
    set of at most ``w_max`` elements.
    """
    rep = Report("cross-coverage")
    t0 = time.perf_counter()
    for n in range(1, n_max + 1):
        fams = _families_of(n)
        for u in range(1, u_max + 1):
            nonempty = [s for s in range(1, 1 << u)]
            profiles = list(product(nonempty, repeat=n))
            chunks = [profiles[i:i + w_max] for i in range(0, len(profiles), w_max)]
            for families in product(fams, repeat=u):
                k = Supporter(n, families)
                if not is_supporter(k, u, n):
                    continue
                for chunk in chunks:
                    rep.cases += 1
                    ground = frozenset(range(len(chunk)))
                    xs = [
                        OrderedPartition(
                            ground,
                            tuple(frozenset(w for w, prof in enumerate(chunk) if (prof[p] >> i) & 1) for i in range(u)),
                        )
                        for p in range(n)
                    ]
                    out = cross_partitions(xs, k)
                    if not out.covers():
                        rep.fail(
                            families=[[sorted(m) for m in f] for f in families],
                            partitions=[[sorted(part) for part in x.parts] for x in xs],
                        )
    rep.wall = time.perf_counter() - t0
    return rep


def _bad_table(bad: Iterable[str]) -> ToyFunctional:
    # size violation on each listed oracle string: bad for every clopen set
    return ToyFunctional(1, {(s, 0): BIG for s in bad})


def suite_monotone(d: int = 5, use: int = 3) -> Report:
    """Abandonment is monotone in the set and stable under permitted stem extensions."""
    rep = Report("abandonment-monotone-and-stable")
    t0 = time.perf_counter()
    v = ClopenSet.full()
    level = sorted(strings_of_length(use))
    subsets = [frozenset(c) for r in range(d + 1) for c in combinations(range(d), r)]
    rhos = sorted(strings_up_to(use), key=lambda s: (len(s), s))
    for r in range(len(level) + 1):
        for bad in combinations(level, r):
            f = _bad_table(bad)
            ab = {(rho, y): abandon_witness(f, rho, v, y, d) is not None for rho in rhos for y in subsets}
            for rho in rhos:
                for y in subsets:
                    for x in subsets:
                        if x < y:
                            rep.cases += 1
                            if ab[(rho, x)] and not ab[(rho, y)]:
                                rep.fail(fact="monotone", bad=list(bad), rho=rho, smaller=sorted(x), larger=sorted(y))
                    if ab[(rho, y)]:
                        continue
                    for sigma in rhos:
                        if len(sigma) > len(rho) and is_prefix(rho, sigma) and bits(sigma) - bits(rho) <= y:
                            rep.cases += 1
                            if ab[(sigma, y)]:
                                rep.fail(fact="extension", bad=list(bad), rho=rho, sigma=sigma, set=sorted(y))
    rep.wall = time.perf_counter() - t0
    return rep


def _family_classes(m_max: int, height: int) -> list[tuple[ClopenSet, ...]]:
    sets = antichains(height)
    seen = set()
    out = []
    leaves = sorted(strings_of_length(height))
    for m in range(1, m_max + 1):
        for fam in combinations_with_replacement(sets, m):
            # intersection pattern with the leaves, up to reordering of the family
            sig = tuple(sorted(tuple(v.meets_string(x) for x in leaves) for v in fam))
            if sig in seen:
                continue
            seen.add(sig)
            out.append(fam)
    return out


def suite_blocking(m_max: int = 4, height: int = 2, e_max: int = 2, d: int = 5, use: int = 3) -> Report:
    """No set inside a non-abandoning region yields a valid bounded enumeration value.

    A table entry fires on oracles extending a prefix ``p`` with output
    ``D``.  For each disperse family the premise (nothing abandoned on one
    region, or each member on its own region) comes from the library's
    abandonment search, and the conclusion asks whether the common region
    reaches the entry with a value that is small, long and meets every
    member.  Outputs range over sets of at most ``e_max + 1`` strings of
    length ``height`` or ``height + 1``.
    """
    rep = Report("disperse-blocking")
    t0 = time.perf_counter()
    pool = sorted(strings_of_length(height)) + sorted(strings_of_length(height + 1))
    outputs = [frozenset(c) for r in range(e_max + 2) for c in combinations(pool, r)]
    prefixes = sorted({"", "1", "01", "101"[:use]}, key=lambda s: (len(s), s))
    full = frozenset(range(d))
    families = _family_classes(m_max, height)
    disperse = {e: [fam for fam in families if is_disperse(list(fam), e)] for e in range(1, e_max + 1)}
    for p in prefixes:
        need = bits(p)
        regions = [full, full - need, need]
        for e in range(1, e_max + 1):
            for out in outputs:
                f = ToyFunctional(e, {(p, 0): out})
                abandoned: dict = {}
                for fam in disperse[e]:
                    tall = max(v.height for v in fam)
                    valid = (
                        len(out) <= e
                        and all(len(s) > tall for s in out)
                        and all(any(v.meets_string(s) for s in out) for v in fam)
                    )
                    n_choices = len(regions) + len(regions) ** len(fam)
                    rep.cases += n_choices
                    if not valid:
                        continue  # the conclusion holds outright for every region choice
                    for v in fam:
                        for r in regions:
                            if (v, r) not in abandoned:
                                abandoned[(v, r)] = abandon_witness(f, "", v, r, d) is not None
                    for region in regions:
                        if need <= region and not any(abandoned[(v, region)] for v in fam):
                            rep.fail(fact="single-region", family=[v.sorted() for v in fam], e=e,
                                     prefix=p, output=sorted(out), region=sorted(region))
                    for choice in product(regions, repeat=len(fam)):
                        common = frozenset.intersection(*choice)
                        if need <= common and not any(abandoned[(v, r)] for v, r in zip(fam, choice)):
                            rep.fail(fact="per-member-regions", family=[v.sorted() for v in fam], e=e,
                                     prefix=p, output=sorted(out), regions=[sorted(r) for r in choice])
    rep.wall = time.perf_counter() - t0
    return rep


# -- presets ----------------------------------------------------------------------

PRESETS = {
    "tiny": {
        "supporter": {"n_max": 3, "height": 2, "esum": 3},
        "cross": {"w_max": 3, "u_max": 2, "n_max": 2},
        "monotone": {"d": 3, "use": 2},
        "blocking": {"m_max": 2, "height": 1, "e_max": 1, "d": 3, "use": 2},
    },
    "default": {
        "supporter": {"n_max": 4, "height": 3, "esum": 4},
        "cross": {"w_max": 6, "u_max": 3, "n_max": 3},
        "monotone": {"d": 4, "use": 3},
        "blocking": {"m_max": 3, "height": 2, "e_max": 2, "d": 5, "use": 3},
    },
    "full": {
        "supporter": {"n_max": 5, "height": 3, "esum": 4},
        "cross": {"w_max": 6, "u_max": 3, "n_max": 3},
        "monotone": {"d": 5, "use": 3},
        "blocking": {"m_max": 4, "height": 2, "e_max": 2, "d": 5, "use": 3},
    },
}

MAXIMA = {
    "supporter": {"n_max": 5, "height": 3, "esum": 4},
    "cross": {"w_max": 6, "u_max": 3, "n_max": 3},
    "monotone": {"d": 5, "use": 3},
    "blocking": {"m_max": 4, "height": 2, "e_max": 2, "d": 5, "use": 3},
}

SUITES = {
    "supporter": suite_supporter,
    "cross": suite_cross,
    "monotone": suite_monotone,
    "blocking": suite_blocking,
}


def estimate(name: str, params: dict) -> float:
    """Rough case count, used to refuse oversized requests."""
    if name == "supporter":
        return 2 ** (2 ** params["n_max"]) * len(compositions(params["esum"]))
    if name == "cross":
        return (2 ** (2 ** params["n_max"])) ** params["u_max"] * (2 ** params["u_max"]) ** params["n_max"]
    if name == "monotone":
        return 2 ** (2 ** params["use"]) * 4 ** params["d"] * 2 ** params["use"]
    return (2 ** (2 ** params["height"])) ** params["m_max"] * 3 ** params["m_max"]


def check_bounds(name: str, params: dict) -> None:
    for key, value in params.items():
        limit = MAXIMA[name].get(key)
        if limit is not None and value > limit:
            raise BoundsError(
                f"{name}: {key}={value} exceeds the maximum {limit} "
                f"(estimated {estimate(name, params):.3g} cases, against {estimate(name, MAXIMA[name]):.3g} at the maximum)"
            )


def run_suites(preset: str | dict = "default", only: Iterable[str] | None = None, **overrides) -> list[Report]:
    """Run suites in name order; ``overrides`` maps suite name to parameter changes."""
    params = PRESETS[preset] if isinstance(preset, str) else preset
    names = sorted(only) if only else sorted(SUITES)
    reports = []
    for name in names:
        p = {**params[name], **overrides.get(name, {})}
        check_bounds(name, p)
        reports.append(SUITES[name](**p))
    return reports
