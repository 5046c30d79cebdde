"""Depth-one QAOA against hyperplane rounding on complete graphs.

On K_n every embedding-based rounding is stuck at arccos(1/(1-n))/pi, while
the depth-one circuit value comes from a closed form. The gap is zero at
n = 3 and positive from n = 4 on.

    python demos/complete_graph_separation.py
"""
from faircut.analysis import kn_separation_sweep
from faircut.rounding import demonstrate_hr_gap

rows = kn_separation_sweep(30, points=20_000)
print(f"{'n':>3} {'eta_bar':>9} {'SDP_HR':>9} {'Q_1':>9} {'gap':>10}")
for r in rows:
    print(f"{r['n']:>3} {r['eta_bar']:9.5f} {r['sdp_hr']:9.5f} {r['q1']:9.5f} {r['separation']:10.2e}")

# the k-subset distribution is optimal and no hyperplane rounding reaches it
rep = demonstrate_hr_gap(6)
print(f"K_6: optimum {rep.optimum:.4f}, best rounding {rep.hr_ceiling:.4f}, gap {rep.gap:.4f}")
