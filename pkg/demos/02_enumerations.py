"""
From staged families to a path
==============================

A family E of finite sets grows in stages.  As long as the sets never
enumerated into E can be grouped into k' classes, each with a common
member, the leftmost common members form a bounded enumeration.  On a
homogeneous tree such an enumeration can then be reduced to a path.
"""

import numpy as np

from coneforce.enumeration import (
    BudgetError,
    EnumerationStages,
    StrongEnumeration,
    check_strong_enum,
    extract_enum,
    extract_path,
    reduce_enum_homogeneous,
)
from coneforce.trees import level_choice_tree, paths

# level 2: eventually every set avoiding "00" or "11" is enumerated
stages = EnumerationStages((
    (frozenset({"01"}),),
    (frozenset({"01", "10"}), frozenset({"10", "11"})),
    (frozenset({"01", "10", "11"}), frozenset({"00", "01", "10"})),
))
# by the last stage every surviving set holds both 00 and 11, so one class suffices
for kprime in (1, 2):
    print(f"k'={kprime}:", sorted(extract_enum(stages, kprime, 2)))

# with too few stages there is no grouping yet
try:
    extract_enum(stages, 1, 2, budget=2)
except BudgetError as exc:
    print("budget 2:", exc)

# a homogeneous tree over 4 symbols, 2 bits each
t = level_choice_tree([[0, 3], [1], [1, 2]], width=2)
print("paths:", paths(t))

# two strings per level, the second one often off the tree
rng = np.random.default_rng(3)
vals = {}
for n in range(4):
    on = sorted(s for s in t.nodes if len(s) == 2 * n)
    noise = "".join(rng.choice(["0", "1"], size=2 * n))
    vals[n] = frozenset({on[int(rng.integers(len(on)))], noise})
h = StrongEnumeration(2, vals, 0, 3, width=2)
print("enumeration:", {n: sorted(v) for n, v in h.values.items()})
print("valid:", check_strong_enum(h, t))

step = reduce_enum_homogeneous(t, h)
print("one round gives:", step if isinstance(step, str) else f"bound {step.bound}")
path, rounds = extract_path(t, h)
print(f"path {path} after {rounds} reductions; on the tree: {path in paths(t)}")
