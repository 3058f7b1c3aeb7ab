"""Arbitrary rates under random arrival order: hide-and-seek, its
reassigning variant and max-weight on the two random models.

    python demos/random_inputs.py
"""

from onbase.harness import ExperimentConfig, run_average_case

n, m, trials = 500, 10, 100
print(f"n={n}, m={m}, {trials} trials; ratios are against the matching upper bound")
print(f"{'model':<12} {'algorithm':<24} {'TS/MWM':>8} {'eta':>8}")
for model in ("iid-uniform", "correlated"):
    for alg in ("hide-and-seek", "hide-and-seek-reassign", "max-weight"):
        est = run_average_case(ExperimentConfig(alg, n, m, trials=trials, seed=3, model=model,
                                                baseline="mwm-upper"))
        print(f"{model:<12} {alg:<24} {est.rho_mean:8.3f} {est.eta_mean:8.3f}")
print(f"\nhide-and-seek guarantee (m-1)/(8m) = {(m - 1) / (8 * m):.4f}")
print(f"reassigning guarantee  (m-1)/(2m) = {(m - 1) / (2 * m):.4f}")
