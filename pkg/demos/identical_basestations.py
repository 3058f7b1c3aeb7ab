"""Identical basestations: offline optimum, a bad input for round robin, and
how much a single reassignment per arrival buys back.

    python demos/identical_basestations.py
"""

import numpy as np

from onbase import WeightMatrix, make_algorithm, run_online, ts_utility
from onbase.adversaries import AdversaryFamily
from onbase.harness import run_worst_case_family
from onbase.offline import brute_force_optimal, optimal_identical_offline

rng = np.random.default_rng(0)
w = np.round(rng.uniform(0, 10, 7), 2)
m = 3
W = WeightMatrix.identical(w, m)

val, alloc = optimal_identical_offline(w, m)
print("rates:", w.tolist())
print(f"offline optimum {val:.4f}, allocation {alloc.one_based()}")
print(f"brute force     {brute_force_optimal(W)[0]:.4f}")

# a growing geometric prefix followed by zeros
n, m = 20, 4
for beta in (2.0, 10.0, 100.0):
    table = run_worst_case_family(AdversaryFamily("identical-geometric", n, m, beta=beta), "round-robin")
    print(f"round robin, beta={beta:>5}: worst eta {table.max_eta:.5f} at l={table.argmax} (n/m = {n / m})")

# any earlier user may move: the optimum is tracked exactly
order = rng.permutation(7)
alloc, trace = run_online(make_algorithm("reassign-identical"), W, order=order)
print(f"reassign-identical: {ts_utility(alloc, W):.4f} with {len(trace.moves())} moves")

# only the previous arrival may move: padding with zeros defeats it
for m in (2, 3):
    padded = AdversaryFamily("identical-geometric-padded", 29, m, beta=1e6)
    print(f"last-user-reassign on padded input, m={m}: eta {run_worst_case_family(padded, 'last-user-reassign').max_eta:.2f}")
