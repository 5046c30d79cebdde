"""Petersen graph: exact fair value, SDP rounding baseline and QAOA depths 1-3.

Reproduces one row of the comparison table. Takes about a minute on one core.

    python demos/petersen_table_row.py
"""
import time

from faircut import build_named, build_spec, grid_optimize_k1_std, solve_exact, solve_sdp, train_multi
from faircut.analysis import approximation_ratio
from faircut.trainer import Objective, TrainConfig

g = build_named("petersen")
print(f"Petersen: {g.n} vertices, {g.n_edges} edges")

exact = solve_exact(g)
print(f"eta_bar = {exact.value:.6f} with a witness on {len(exact.witness)} cuts")

sdp = solve_sdp(g, restarts=8, seed=0)
print(f"SDP objective {sdp.t_star:.6f}, hyperplane rounding value {sdp.hr_value:.6f}")

q1 = grid_optimize_k1_std(g, resolution=400)
print(f"Q_1 (grid) = {q1.best_value:.6f} at gamma, beta = {q1.best_params.round(4)}")

obj, cfg = Objective("lse", 0.05), TrainConfig()
for k in (2, 3):
    t0 = time.perf_counter()
    best, runs = train_multi(build_spec(g, k), g, obj, cfg, seed=k)
    ratio = approximation_ratio(best.best_value, g, exact.value)
    beats = "beats" if best.best_value > sdp.hr_value else "does not beat"
    print(f"Q_{k} = {best.best_value:.6f} (ratio {ratio:.4f}, {beats} rounding) in {time.perf_counter() - t0:.1f}s")
