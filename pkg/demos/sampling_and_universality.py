"""Shot budgets from the concentration bounds, checked by resampling, and a
small universality experiment on the triangle.

    python demos/sampling_and_universality.py
"""
from faircut import build_named, solve_exact
from faircut.analysis import fit_target_distribution, hoeffding_validation, shot_budget, triangle_target
from faircut.graphs import complete_graph

g = build_named("petersen")
b = shot_budget(0.05, 0.05, g.n_edges, p_min=0.8)
print(f"eps=0.05, delta=0.05, |E|={g.n_edges}: Hoeffding T={b.T_hoeffding}, relative Chernoff T={b.T_chernoff}")

witness = solve_exact(g).witness
rate, T = hoeffding_validation(witness, g, 0.05, 0.05, 200, seed=1)
print(f"resampling the optimal witness with T={T}: max-edge error above 0.05 in {rate:.1%} of 200 runs")

# uniform over the six one-vertex cuts of a triangle: every edge cut with probability 2/3
target = triangle_target()
for seed in range(5):
    tv, fit = fit_target_distribution(complete_graph(3), target, 8, seed=seed)
    print(f"seed {seed}: k=8 circuit reaches TV {tv:.2e} ({len(fit.restarts)} start(s))")
