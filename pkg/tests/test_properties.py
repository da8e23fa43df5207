from itertools import combinations

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from coneforce.combinatorics import (
    OrderedPartition,
    cross_partitions,
    is_disperse,
    is_disperse_bruteforce,
    is_supporter,
    supporter_from_disperse,
)
from coneforce.enumeration import (
    BudgetError,
    EnumerationStages,
    extract_enum,
    ToyPrefixMachine,
    complexity,
    compressible_bound,
    extract_path,
    kraft_sum,
    StrongEnumeration,
)
from coneforce.forcing.conditions import PartitionTree
from coneforce.forcing.engine import node_count
from coneforce.functionals import ToyFunctional, abandons_on_set
from coneforce.strings import ClopenSet, antichains, bits, interleave, overwrite, project, strings_of_length
from coneforce.trees import (
    from_paths,
    is_homogeneous,
    is_homogeneous_bruteforce,
    level_choice_tree,
    paths,
    prune,
    symbol_level,
)

bitstr = st.text(alphabet="01", max_size=8)
CLOPEN2 = antichains(2)
clopen = st.sampled_from(CLOPEN2)


@given(bitstr, bitstr)
def test_overwrite_keeps_length_and_prefix(z, s):
    assume(len(s) <= len(z))
    out = overwrite(z, s)
    assert len(out) == len(z) and out.startswith(s) and out[len(s):] == z[len(s):]


@given(st.integers(1, 4), st.data())
def test_project_inverts_interleave(n, data):
    m = data.draw(st.integers(0, 5))
    parts = [data.draw(st.text(alphabet="01", min_size=m, max_size=m)) for _ in range(n)]
    x = interleave(parts)
    assert [project(x, n, i) for i in range(1, n + 1)] == parts


@given(st.lists(clopen, min_size=1, max_size=4), st.integers(1, 3))
def test_disperse_matches_bruteforce(vs, u):
    assert is_disperse(vs, u) == is_disperse_bruteforce(vs, u)


@st.composite
def disperse_input(draw):
    """A sequence that is ``sum(e)``-disperse: random sets plus ``sum(e) + 1`` disjoint leaves."""
    e = draw(st.sampled_from([(1,), (2,), (3,), (1, 1), (1, 2), (2, 1)]))
    leaves = [ClopenSet.of(s) for s in ("00", "01", "10", "11")[: sum(e) + 1]]
    extra = draw(st.lists(clopen, max_size=2))
    vs = draw(st.permutations(leaves + extra))
    assert is_disperse(vs, sum(e))
    return vs, e


@given(disperse_input())
@settings(max_examples=60)
def test_supporter_from_disperse_is_a_supporter(case):
    vs, e = case
    k = supporter_from_disperse(vs, e)
    assert is_supporter(k, len(e), len(vs))


@given(disperse_input(), st.data())
@settings(max_examples=60)
def test_cross_covers_along_a_supporter(case, data):
    vs, e = case
    k = supporter_from_disperse(vs, e)
    w = frozenset(range(4))
    xs = []
    for _ in vs:
        assignment = data.draw(st.lists(st.integers(0, len(e) - 1), min_size=4, max_size=4))
        xs.append(OrderedPartition(w, tuple(frozenset(j for j in w if assignment[j] == i) for i in range(len(e)))))
    assert cross_partitions(xs, k).covers()


@st.composite
def functionals(draw):
    # one entry per input keeps tables consistent by construction
    rows = draw(st.lists(
        st.tuples(st.text(alphabet="01", max_size=3), st.lists(st.sampled_from(["0", "1", "00", "11"]), max_size=2)),
        max_size=3,
    ))
    entries = {(prefix, n): frozenset(out) for n, (prefix, out) in enumerate(rows)}
    return ToyFunctional(draw(st.integers(1, 2)), entries)


@given(functionals(), clopen, st.sets(st.integers(0, 4)), st.sets(st.integers(0, 4)), st.text(alphabet="01", max_size=2))
def test_abandonment_is_monotone(f, v, y, extra, rho):
    if abandons_on_set(f, rho, v, y, 5):
        assert abandons_on_set(f, rho, v, y | extra, 5)


@given(functionals(), clopen, st.sets(st.integers(0, 4)), st.text(alphabet="01", max_size=2), st.data())
def test_extension_stability(f, v, y, rho, data):
    assume(not abandons_on_set(f, rho, v, y, 5))
    # extend the stem only with ones taken from y
    tail = data.draw(st.text(alphabet="01", max_size=3))
    sigma = rho + tail
    assume(len(sigma) <= 5 and bits(sigma) - bits(rho) <= y)
    assert not abandons_on_set(f, sigma, v, y, 5)


@given(st.sets(st.text(alphabet="01", min_size=3, max_size=3), max_size=8))
def test_homogeneity_matches_bruteforce(leaves):
    t = from_paths(leaves, 3)
    assert is_homogeneous(t) == is_homogeneous_bruteforce(t)


@given(st.sets(st.text(alphabet="01", max_size=4), max_size=20))
def test_prune_is_idempotent(raw):
    closed = {s[:m] for s in raw for m in range(len(s) + 1)}
    t = prune(closed, 4)
    assert t.is_pruned()
    assert prune(t.nodes, 4) == t


@given(st.lists(st.sets(st.integers(0, 1), min_size=1), min_size=1, max_size=5), st.integers(1, 3), st.data())
def test_reduction_lands_on_a_path(choices, k, data):
    t = level_choice_tree(choices)
    d = len(choices)
    vals = {}
    for n in range(d + 1):
        on = sorted(symbol_level(t, n))
        everything = sorted(strings_of_length(n))
        size = data.draw(st.integers(1, k))
        picks = {data.draw(st.sampled_from(on))}
        picks |= set(data.draw(st.lists(st.sampled_from(everything), max_size=size - 1)))
        vals[n] = frozenset(picks)
    h = StrongEnumeration(k, vals, 0, d)
    path, reductions = extract_path(t, h)
    assert reductions <= k - 1
    assert path in paths(t)


@st.composite
def machines(draw):
    progs = {}
    for p in draw(st.lists(st.text(alphabet="01", min_size=1, max_size=5), max_size=8)):
        if all(not (q.startswith(p) or p.startswith(q)) for q in progs):
            progs[p] = draw(st.text(alphabet="01", max_size=5))
    return ToyPrefixMachine(progs)


@given(machines(), st.integers(0, 5), st.integers(0, 3))
def test_incompressibility_counting(u, n, c):
    assert kraft_sum(u) <= 1
    low = [s for s in strings_of_length(n) if complexity(u, s) < n - c]
    assert len(low) <= compressible_bound(n, c)


@given(st.integers(1, 3), st.lists(st.lists(st.integers(0, 7), min_size=3, max_size=3), min_size=1, max_size=4))
def test_node_count_matches_materialised_tree(k, rows):
    t = PartitionTree(k, 3, tuple(tuple(r[:k]) for r in rows))
    assert node_count(t) == len(t.to_fintree().nodes)


@given(st.integers(0, 2), st.integers(1, 3), st.lists(st.lists(st.sets(st.integers(0, 3)), max_size=3), min_size=1, max_size=3))
def test_closed_stages_match_their_explicit_listing(n, kprime, raw):
    level = sorted(strings_of_length(n))
    stages = tuple(tuple(frozenset(level[j] for j in g if j < len(level)) for g in stage) for stage in raw)
    closed = EnumerationStages(stages)
    listed = tuple(
        tuple({frozenset(c) for g in stage for r in range(1, len(g) + 1) for c in combinations(sorted(g), r)})
        for stage in stages
    )
    explicit = EnumerationStages(listed, closed=False)
    try:
        want = extract_enum(explicit, kprime, n)
    except BudgetError:
        with pytest.raises(BudgetError):
            extract_enum(closed, kprime, n)
        return
    assert extract_enum(closed, kprime, n) == want
