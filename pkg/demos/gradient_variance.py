"""Gradient variance of the smooth and hard minimum objectives at 100 layers.

Small random connected graphs, multi-angle circuits, one parameter
coordinate. Empirical variances are compared to the analytic bounds.

    python demos/gradient_variance.py
"""
from faircut.analysis import variance_study

st = variance_study(sizes=(2, 3, 4, 5), layers=100, n_instances=5, n_points=40, seed=0)
print(f"coordinate: {st.coordinate}")
for row, ok in zip(st.rows(), st.consistent()):
    print(f"n={row['size']}  LSE {row['var_lse']:.4f} (bound {row['bound_lse']:.4f})  "
          f"min {row['var_min']:.4f} (bound {row['bound_min']:.4f})  {'ok' if ok else 'ABOVE BOUND'}")
