"""
The first split
===============

Start from one part holding every element, with trivial functionals.
The first splitting round looks for three pairwise disjoint clopen sets,
which form a 2-disperse sequence, and crosses along them.
"""

from itertools import combinations

from coneforce.combinatorics import is_disperse, minimal_disperse_subsets
from coneforce.forcing.engine import Engine, initial_state
from coneforce.forcing.scenario import bundled
from coneforce.strings import ClopenSet

sc = bundled("step1")
engine = Engine(sc)
state = initial_state(sc.depth)
print("parts before:", state.k)

res = engine.r_ii_operation(state, sc.schedule[0])
vs = [ClopenSet(frozenset(g)) for g in res.info["sequence"]]
print("sequence:", vs)
print("pairwise disjoint:", all(not a.meets(b) for a, b in combinations(vs, 2)))
print("2-disperse:", is_disperse(vs, 2), " 1-disperse:", is_disperse(vs, 1))

# each side of the old part keeps the index sets whose sets already have
# empty intersection, i.e. every pair; three pairs per side
print("minimal 1-disperse index sets:", [sorted(k) for k in minimal_disperse_subsets(vs, 1)])

new = res.state
print("parts after:", new.k, "sides:", "".join(new.sides))

# with nothing to diverge on, every element lands in every part of every path
for row in new.cond.tree.paths[:1]:
    print("first path, part masks:", [format(m, f"0{sc.depth}b")[::-1] for m in row])

# repeated parts are merged before the stems grow
compact, kept = engine.compress(new)
print("after merging repeats:", compact.k, "parts (kept", [i + 1 for i in kept], ")")
