"""
Incompressible strings of a toy machine
=======================================

A prefix-free table of programs.  Strings whose shortest program saves
more than c bits are compressible; there are fewer than 2^(n-c) of them.
"""

import numpy as np

from coneforce.enumeration import ToyPrefixMachine, complexity, compressible_bound, kraft_sum
from coneforce.forcing.scenario import incompressible_tree
from coneforce.strings import strings_of_length
from coneforce.trees import paths

u = ToyPrefixMachine({"0": "000000", "10": "111", "110": "0101", "1110": "00"})
print("Kraft sum:", kraft_sum(u))

# counts[c, n] = number of length-n strings with complexity below n - c
ns, cs = np.arange(7), np.arange(4)
counts = np.array([[sum(complexity(u, s) < n - c for s in strings_of_length(n)) for n in ns] for c in cs])
bounds = np.array([[compressible_bound(n, c) for n in ns] for c in cs])
print("compressible counts (rows c, columns n):")
print(counts)
print("within bound everywhere:", bool((counts <= bounds).all()))

# the tree of strings all of whose prefixes are 1-incompressible
q = incompressible_tree(u, 1, 6)
print("surviving paths at depth 6:", len(paths(q)), "of", 2 ** 6)
print("removed:", sorted(set(strings_of_length(6)) - set(paths(q))))
