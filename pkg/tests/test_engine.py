import pytest

from coneforce.combinatorics import is_disperse
from coneforce.forcing.conditions import PartitionTree, condition_violations
from coneforce.forcing.engine import Engine, EngineError, initial_state, node_count
from coneforce.forcing.scenario import bundled, scenario_from_dict
from coneforce.functionals import abandons_on_set
from coneforce.strings import ClopenSet, bits, set_to_mask
from coneforce.trees import is_partition_tree, paths


def scenario(**kw):
    raw = {"name": "t", "depth": 8, "steps": 2, "A": {"pattern": "10"}, "Q": {"kind": "full", "depth": 4}}
    raw.update(kw)
    return scenario_from_dict(raw)


def test_p_operation_takes_the_least_element_of_the_colour():
    eng = Engine(scenario())
    st = initial_state(8)
    res = eng.p_operation(st, 0, "l")
    assert res.kind == "succeeded"
    assert res.info["element"] == 0
    assert res.state.cond.stems[0] == ("1", "")
    again = eng.p_operation(res.state, 0, "l")
    assert again.info["element"] == 2
    assert again.state.cond.stems[0][0] == "101"
    assert condition_violations(again.state.cond, eng.a) == []


def test_p_operation_fails_when_the_part_has_no_element_of_the_colour():
    eng = Engine(scenario())
    st = initial_state(8)
    odd = set_to_mask({1, 3, 5, 7})
    st.cond.tree = PartitionTree(1, 8, ((odd,),))
    res = eng.p_operation(st, 0, "l")
    assert res.kind == "failed"
    assert res.state is st


def test_p_operation_never_reuses_the_stem():
    eng = Engine(scenario())
    st = eng.p_operation(initial_state(8), 0, "l").state
    # element 0 is now below the horizon, so it cannot be offered again
    assert not any(p[0] & 1 for p in st.cond.tree.paths)
    res = eng.p_operation(st, 0, "l")
    assert bits(res.info["stem_after"]) - bits(res.info["stem_before"]) == {2}


def test_r_i_fires_on_an_oversized_output():
    sc = scenario(functionals={"0": {"1": {"entries": [["1", 1, ["0", "1"]]]}}})
    eng = Engine(sc)
    res = eng.r_i_operation(initial_state(8), 0, 1000)
    assert res.kind == "case_i"
    assert res.info["side"] == "l"
    assert res.info["stem_after"] == "1"
    assert res.state.counters(0, 0) == (2, 1)


def test_r_i_quiet_functionals():
    res = Engine(scenario()).r_i_operation(initial_state(8), 0, 1000)
    assert res.kind == "no_case_i"
    assert not res.info["budget_exhausted"]


def test_r_i_certifies_absence_when_outputs_are_good():
    sc = scenario(functionals={"0": {"1": {"entries": [["1", 1, ["0"]], ["", 2, ["01"]]]}}})
    eng = Engine(sc)
    res = eng.r_i_operation(initial_state(8), 0, 10 ** 6)
    assert res.kind == "no_case_i"
    assert not res.info["budget_exhausted"]


def test_r_i_budget_flag():
    sc = scenario(functionals={"0": {"1": {"entries": [["0001", 1, ["0", "1"]]]}}})
    res = Engine(sc).r_i_operation(initial_state(8), 0, 2)
    assert res.kind == "no_case_i"
    assert res.info["budget_exhausted"]


def test_first_split_of_step_one():
    sc = bundled("step1")
    eng = Engine(sc)
    res = eng.r_ii_operation(initial_state(sc.depth), 0)
    assert res.kind == "case_ii"
    assert res.info["kprime"] == 2
    vs = [ClopenSet(frozenset(g)) for g in res.info["sequence"]]
    assert len(vs) == 3
    assert all(not a.meets(b) for i, a in enumerate(vs) for b in vs[i + 1:])
    assert is_disperse(vs, 2)
    st = res.state
    assert st.k == 6
    assert st.sides == ["l"] * 3 + ["r"] * 3
    ft = st.cond.tree.to_fintree()
    assert is_partition_tree(ft, 6, range(sc.depth))


def test_quiet_functionals_give_full_splitting():
    eng = Engine(bundled("step1"))
    st = initial_state(12)
    tv = eng.t_v(st, 0, ClopenSet.of("0"))
    # no abandonment: the first split puts every element on both sides
    assert tv[0] == ((1 << 12) - 1, (1 << 12) - 1)


def test_t_v_splits_avoid_abandonment():
    sc = scenario(functionals={"0": {"1": {"entries": [["01", 0, ["1"]]]}}})
    eng = Engine(sc)
    v = ClopenSet.of("0")
    f = sc.functional(0, 1)
    for left, right in eng.t_v(initial_state(8), 0, v):
        for side in (left, right):
            members = {x for x in range(8) if side >> x & 1}
            assert not abandons_on_set(f, "", v, members, 8)
            assert 1 not in members


def test_r_ii_stuck_when_every_clopen_set_must_meet_one_cylinder():
    # outputs {0} at every oracle: only sets meeting [0] are admissible, and no such family is disperse
    sc = scenario(
        functionals={"0": {"1": {"entries": [["", 0, ["0"]]]}}},
        budgets={"height_bound": 2, "rii_combos": 5000},
    )
    res = Engine(sc).r_ii_operation(initial_state(8), 0)
    assert res.kind == "stuck"


def test_stuck_propagates_from_step():
    sc = scenario(budgets={"height_bound": 1})
    eng = Engine(sc)
    with pytest.raises(EngineError) as info:
        eng.step(initial_state(8), 1)
    assert info.value.op == "r_ii"


def test_step_out_of_range_is_a_no_op():
    eng = Engine(scenario())
    st = initial_state(8)
    assert eng.step(st, 5) is st
    assert eng.step(st, 0) is st


def test_step_one_end_to_end():
    eng = Engine(bundled("step1"))
    st = eng.step(initial_state(12), 1)
    rec = eng.records[-1]
    assert rec["ri_loops"] == 0
    assert rec["p_succeeded"] >= 1
    assert all(not v for v in rec["verdicts"].values())
    assert st.k == 2


def test_case_i_fires_exactly_once():
    eng = Engine(bundled("case_i_once"))
    eng.run()
    fired = [r for r in eng.records if r["op"] == "r_i" and r["outcome"] == "case_i"]
    assert len(fired) == 1
    assert fired[0]["step"] == 1
    assert fired[0]["stem_after"] == "1"


def test_r_i_loop_budget_is_enforced():
    sc = bundled("case_i_once").with_overrides(ri_loop=1)
    with pytest.raises(EngineError) as info:
        Engine(sc).run()
    assert info.value.op == "r_i"


def test_compress_keeps_a_partition_tree():
    eng = Engine(bundled("step1"))
    res = eng.r_ii_operation(initial_state(12), 0)
    st, kept = eng.compress(res.state)
    assert kept and st.k == len(kept) < res.state.k
    assert is_partition_tree(st.cond.tree.to_fintree(), st.k, range(12))


def test_node_count_matches_materialised_tree():
    t = PartitionTree(2, 3, ((0b101, 0b010), (0b011, 0b100), (0b111, 0)))
    assert node_count(t) == len(t.to_fintree().nodes)
    assert len(paths(t.to_fintree())) == 3
