import math
from fractions import Fraction

import pytest

from coneforce.enumeration import (
    BudgetError,
    ContractError,
    EnumerationStages,
    StrongEnumeration,
    ToyPrefixMachine,
    check_strong_enum,
    complexity,
    compressible_bound,
    enumeration_from_stages,
    extract_enum,
    extract_enum_bruteforce,
    extract_path,
    incompressible_level,
    kraft_sum,
    reduce_enum_homogeneous,
)
from coneforce.strings import strings_of_length
from coneforce.trees import full_tree, level, level_choice_tree, paths, prune


def _enum(bound, vals):
    return StrongEnumeration(bound, {n: frozenset(v) for n, v in enumerate(vals)}, 0, len(vals) - 1)


T = level_choice_tree([[0, 1], [1], [0, 1]])


def test_check_strong_enum_examples():
    leftmost = _enum(1, [[min(level(T, n))] for n in range(4)])
    assert check_strong_enum(leftmost, T)
    crowded = _enum(1, [[""], ["0", "1"], ["01"], ["010"]])
    assert not check_strong_enum(crowded, T)
    missing = _enum(2, [[""], ["0"], ["00"], ["010"]])
    assert not check_strong_enum(missing, T)


def test_enumeration_needs_every_level():
    with pytest.raises(ValueError):
        StrongEnumeration(1, {0: frozenset({""})}, 0, 1)


def test_extract_enum_singleton_intersection():
    n = 2
    rest = frozenset(strings_of_length(n)) - {"00"}
    e = EnumerationStages(((frozenset({"01"}),), (rest,)))
    assert extract_enum(e, 1, n) == {"00"}
    assert extract_enum_bruteforce(e, 1, n) == {"00"}


def test_extract_enum_chain():
    # the unenumerated sets all contain "10": a single group works at stage 0
    e = EnumerationStages(((frozenset({"00", "01", "11"}),),))
    assert extract_enum(e, 1, 2) == {"10"}


def test_extract_enum_budget():
    e = EnumerationStages(((), ()))
    with pytest.raises(BudgetError):
        extract_enum(e, 1, 2)
    with pytest.raises(BudgetError):
        extract_enum(e, 1, 2, budget=1)


def test_extract_enum_explicit_stages_agree_with_closed():
    closed = EnumerationStages(((frozenset({"0"}),),))
    explicit = EnumerationStages(((frozenset({"0"}),),), closed=False)
    assert extract_enum(closed, 1, 1) == extract_enum(explicit, 1, 1) == {"1"}


def test_enumeration_from_stages():
    rest = frozenset({"01", "10", "11"})
    e = EnumerationStages(((rest, frozenset({"1"}), frozenset({"0"})),))
    h = enumeration_from_stages(e, 1, [1, 2])
    assert h[2] == {"00"}


def test_reduce_single_path():
    t = level_choice_tree([[1], [0], [1]])
    h = _enum(1, [["1010"[:n]] for n in range(4)])
    assert reduce_enum_homogeneous(t, h) == "101"


def test_reduce_one_off_tree_string():
    h = _enum(2, [[""], ["0", "1"], ["01", "00"], ["011", "001"]])
    first = reduce_enum_homogeneous(T, h)
    assert isinstance(first, StrongEnumeration)
    assert first.bound == 1
    path, reductions = extract_path(T, h)
    assert reductions == 1
    assert path in paths(T)


def test_reduce_full_tree_always_a_path():
    t = full_tree(3)
    h = _enum(2, [[""], ["1", "0"], ["10", "01"], ["100", "011"]])
    path, reductions = extract_path(t, h)
    assert reductions == 0
    assert path in paths(t)


def test_reduce_contract_errors():
    bumpy = prune({"", "0", "1", "00", "11"}, 2)
    with pytest.raises(ContractError):
        reduce_enum_homogeneous(bumpy, _enum(1, [[""], ["0"], ["00"]]))
    with pytest.raises(ContractError):
        reduce_enum_homogeneous(T, _enum(1, [[""], ["0"], ["00"], ["000"]]))


def test_complexity_examples():
    assert complexity(ToyPrefixMachine(), "0") == math.inf
    u = ToyPrefixMachine({"0": "11"})
    assert complexity(u, "11") == 1
    assert complexity(u, "10") == math.inf
    assert complexity(ToyPrefixMachine({"0": "1", "10": "1"}), "1") == 1


def test_machines_must_be_prefix_free():
    with pytest.raises(ValueError):
        ToyPrefixMachine({"0": "1", "01": "0"})


def test_incompressible_levels():
    assert incompressible_level(ToyPrefixMachine(), 0, 3) == set(strings_of_length(3))
    assert incompressible_level(ToyPrefixMachine({"0": "00"}), 2, 2) == set(strings_of_length(2))
    u = ToyPrefixMachine({"0": "00", "10": "01"})
    # 01 has complexity exactly 2 = n - c, which is still incompressible
    assert incompressible_level(u, 0, 2) == {"01", "10", "11"}
    assert incompressible_level(u, 0, 2) == {s for s in strings_of_length(2) if complexity(u, s) >= 2}


def test_kraft_and_bound():
    assert kraft_sum(ToyPrefixMachine({"0": "", "10": "1"})) == Fraction(3, 4)
    assert compressible_bound(3, 1) == 3
    assert compressible_bound(2, 4) == 0
