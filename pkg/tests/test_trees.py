import pytest

from coneforce.strings import interleave, strings_up_to
from coneforce.trees import (
    FinTree,
    decode_parts,
    from_paths,
    full_tree,
    is_homogeneous,
    is_homogeneous_bruteforce,
    is_partition_tree,
    level,
    level_choice_tree,
    level_choices,
    paths,
    prune,
)


def test_prune_examples():
    assert prune(strings_up_to(3), 3) == full_tree(3)
    assert prune({"", "0", "1"}, 2).is_empty()
    assert prune({"", "0", "00", "1"}, 2).nodes == {"", "0", "00"}


def test_prune_rejects_open_sets():
    with pytest.raises(ValueError):
        prune({"0"}, 1)


def test_tree_validation():
    with pytest.raises(ValueError):
        FinTree(1, frozenset({"", "00"}))
    with pytest.raises(ValueError):
        FinTree(2, frozenset({"", "01"}))


def test_level_examples():
    assert level(full_tree(3), 2) == {"00", "01", "10", "11"}
    assert level(from_paths(["000"], 3), 2) == {"00"}
    assert level(FinTree(3), 1) == frozenset()


def test_paths_examples():
    assert paths(full_tree(2)) == ["00", "01", "10", "11"]
    assert paths(FinTree(2)) == []
    assert paths(from_paths(["11"], 2)) == ["11"]


def test_homogeneity_examples():
    assert is_homogeneous(full_tree(3))
    assert is_homogeneous(from_paths(["0000"], 4))
    assert not is_homogeneous(prune({"", "0", "1", "00", "11"}, 2))


def test_homogeneity_agrees_with_bruteforce_on_all_depth_two_trees():
    leaves = ["00", "01", "10", "11"]
    for mask in range(16):
        chosen = [s for j, s in enumerate(leaves) if mask >> j & 1]
        t = from_paths(chosen, 2)
        assert is_homogeneous(t) == is_homogeneous_bruteforce(t)


def test_level_choice_trees():
    t = level_choice_tree([[0, 1], [1], [0]])
    assert paths(t) == ["010", "110"]
    assert is_homogeneous(t)
    assert level_choices(t) == [{0, 1}, {1}, {0}]
    wide = level_choice_tree([[0, 3], [2]], width=2)
    assert paths(wide) == ["0010", "1110"]
    assert is_homogeneous(wide)
    with pytest.raises(ValueError):
        level_choice_tree([[]])


def test_decode_parts():
    x = interleave(["101", "011"])
    assert decode_parts(x, 2) == [{0, 2}, {1, 2}]


def test_partition_tree_examples():
    good = from_paths([interleave(p) for p in [("110", "001"), ("100", "011"), ("111", "000")]], 6)
    assert is_partition_tree(good, 2, range(3))
    bad = from_paths([interleave(("100", "001"))], 6)
    assert not is_partition_tree(bad, 2, range(3))
    # k = 1: every path must contain the set below the horizon
    assert is_partition_tree(from_paths(["111", "110"], 3), 1, {0, 1})
    assert not is_partition_tree(from_paths(["111", "110"], 3), 1, {2})
