"""Sample-then-threshold rules: exact selection laws next to simulation, and
the truncated lower bounds as a function of the test fraction.

    python demos/threshold_rules.py
"""

import numpy as np

from onbase.analytics import best_alpha, bound_m_bs, secretary_success_exact, selected_distribution_exact
from onbase.harness import ExperimentConfig, run_average_case

n = 50
for r in (5, 10, 18, 25):
    print(f"single stop, n={n}, r={r:2d}: success {secretary_success_exact(n, r):.4f}")

r, m = 11, 5
table = selected_distribution_exact(n, r, m, dmax=8)
print(f"\nselected count law, n={n}, r={r}, m={m}")
for d, p in enumerate(table.probs):
    print(f"  d={d}: {p:.4f}")

alpha, value = best_alpha(2, 10)
print(f"\nbest test fraction for two basestations: {alpha} (bound {value:.4f})")
for m in (2, 3, 5, 10):
    cut = bound_m_bs(0.22, m, 10).value
    full = bound_m_bs(0.22, m, 1000).value
    print(f"  m={m:2d}: bound with d<=10 {cut:.4f}, without the cut {full:.4f}")

for n in (100, 1000):
    est = run_average_case(ExperimentConfig("k-secretary", n, 10, trials=100, seed=1,
                                            model_params={"identical": True}, params={"alpha": 0.22}))
    print(f"k-secretary, n={n}, m=10: mean rho {est.rho_mean:.3f} +- {est.rho_se:.3f}")
