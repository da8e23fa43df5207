from itertools import combinations

import pytest

from coneforce.combinatorics import (
    OrderedPartition,
    Supporter,
    cross_partitions,
    is_disperse,
    is_disperse_bruteforce,
    is_supporter,
    minimal_disperse_subsets,
    supporter_counterexample,
    supporter_from_disperse,
)
from coneforce.strings import ClopenSet, antichains

DISJOINT3 = [ClopenSet.of("00"), ClopenSet.of("01"), ClopenSet.of("1")]


def test_disperse_examples():
    assert is_disperse(DISJOINT3, 2)
    assert not is_disperse(DISJOINT3[:2], 2)
    assert not is_disperse([ClopenSet.of("0")], 1)


def test_disperse_with_empty_member():
    # whichever part receives the empty set has empty intersection
    assert is_disperse([ClopenSet.empty()], 1)
    assert is_disperse([ClopenSet.empty()], 3)
    # empty parts intersect to the whole space
    assert not is_disperse([ClopenSet.of("0")], 3)


def test_disperse_matches_bruteforce_small():
    sets = antichains(2)[:12]
    for n in (1, 2, 3):
        for vs in combinations(sets, n):
            for u in (1, 2):
                assert is_disperse(list(vs), u) == is_disperse_bruteforce(list(vs), u)


def test_supporter_examples():
    assert is_supporter(Supporter(3, ([{0}],)), 1, 3)
    pairs = [set(c) for c in combinations(range(3), 2)]
    assert is_supporter(Supporter(3, (pairs, pairs)), 2, 3)
    assert not is_supporter(Supporter(3, ((), ())), 2, 3)


def test_supporter_counterexample_is_a_partition():
    k = Supporter(2, ([{0, 1}], [{0, 1}]))
    ce = supporter_counterexample(k, 2, 2)
    assert ce is not None
    assert set().union(*ce) == {0, 1}
    assert not any(m <= part for fam, part in zip(k.families, ce) for m in fam)


def test_supporter_from_disperse_step_one_recipe():
    k = supporter_from_disperse(DISJOINT3, (1, 1))
    expected = {frozenset(c) for r in (2, 3) for c in combinations(range(3), r)}
    assert set(k.families[0]) == expected
    assert set(k.families[1]) == expected
    assert is_supporter(k, 2, 3)


def test_supporter_from_disperse_single_entry():
    k = supporter_from_disperse(DISJOINT3, (2,))
    assert frozenset({0, 1, 2}) in k.families[0]
    assert is_supporter(k, 1, 3)


def test_supporter_from_disperse_rejects_non_disperse():
    with pytest.raises(ValueError):
        supporter_from_disperse(DISJOINT3[:2], (1, 1))


def test_minimal_families_step_one():
    assert minimal_disperse_subsets(DISJOINT3, 1) == [frozenset({0, 1}), frozenset({0, 2}), frozenset({1, 2})]


def test_cross_identity():
    x = OrderedPartition({0, 1, 2}, ({0}, {1, 2}))
    out = cross_partitions([x], Supporter(1, ([{0}], [{0}])))
    assert out.parts == x.parts


def test_cross_step_one_gives_six_parts():
    w = frozenset(range(4))
    xs = [OrderedPartition(w, ({0, 1}, {2, 3})), OrderedPartition(w, ({0, 2}, {1, 3})), OrderedPartition(w, ({0, 3}, {1, 2}))]
    k = Supporter(3, (minimal_disperse_subsets(DISJOINT3, 1),) * 2)
    out = cross_partitions(xs, k)
    assert out.u == 6
    assert out.covers()
    assert out.parts[0] == {0}


def test_cross_non_supporter_may_fail_to_cover():
    w = {1, 2}
    xs = [OrderedPartition(w, ({1}, {2})), OrderedPartition(w, ({1, 2}, set()))]
    k = Supporter(2, ([{0, 1}], [{0, 1}]))
    out = cross_partitions(xs, k)
    assert out.parts == (frozenset({1}), frozenset())
    assert not out.covers()
    assert not is_supporter(k, 2, 2)


def test_cross_shape_errors():
    x = OrderedPartition({0}, ({0},))
    with pytest.raises(ValueError):
        cross_partitions([x, x], Supporter(1, ([{0}],)))
    with pytest.raises(ValueError):
        cross_partitions([x, OrderedPartition({1}, ({1},))], Supporter(2, ([{0}],)))
