"""Sample budgets, empirical fair values and the numerical studies."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import _bits
from .cuts import CutDistribution, total_variation
from .errors import ParameterError
from .exact import solve_exact
from .graphs import Graph, complete_graph
from .qsim import MULTI, _gradient_diag, build_dqaoa_spec, build_spec, gradient_reverse_batch, run_circuit
from .qsim import closed_form_k1_kn_opt, edge_probabilities, marginal_probabilities
from .rounding import kn_fair_value, kn_hr_value
from .trainer import TrainResult, lse_min


def _check_unit(name, x):
    if not 0 < x < 1:
        raise ParameterError(f"{name} must lie in (0, 1), got {x}")


@dataclass(frozen=True)
class ShotBudget:
    eps: float
    delta: float
    n_edges: int
    p_min: float | None
    T_hoeffding: int
    T_chernoff: int | None


def shots_absolute(eps, delta, n_edges):
    """Samples for max-edge absolute error ``eps`` with probability ``1 - delta``.

    ``ceil(log(2|E|/delta) / (2 eps^2))`` from Hoeffding plus a union bound.
    """
    _check_unit("eps", eps)
    _check_unit("delta", delta)
    if n_edges < 1:
        raise ParameterError("need at least one edge")
    return max(1, math.ceil(math.log(2 * n_edges / delta) / (2 * eps * eps)))


def shots_relative(eps, delta, n_edges, p_min):
    """Samples for relative error ``eps`` on every edge (multiplicative Chernoff).

    ``ceil(3 log(2|E|/delta) / (eps^2 p_min))``.
    """
    _check_unit("eps", eps)
    _check_unit("delta", delta)
    if n_edges < 1:
        raise ParameterError("need at least one edge")
    if not 0 < p_min <= 1:
        raise ParameterError(f"p_min must lie in (0, 1], got {p_min}")
    return max(1, math.ceil(3 * math.log(2 * n_edges / delta) / (eps * eps * p_min)))


def shot_budget(eps, delta, n_edges, p_min=None):
    return ShotBudget(
        eps=eps,
        delta=delta,
        n_edges=n_edges,
        p_min=p_min,
        T_hoeffding=shots_absolute(eps, delta, n_edges),
        T_chernoff=None if p_min is None else shots_relative(eps, delta, n_edges, p_min),
    )


def hoeffding_eps(T, delta, n_edges):
    """Absolute error guaranteed by ``T`` samples (inverse of :func:`shots_absolute`)."""
    return math.sqrt(math.log(2 * n_edges / delta) / (2 * T))


def empirical_edge_frequencies(samples, g):
    samples = np.asarray(samples, dtype=np.int64).ravel()
    if samples.size == 0:
        raise ParameterError("need at least one sample")
    return _bits.cut_indicator(samples, g.edge_pairs).mean(axis=1)


def empirical_fair_value(samples, g):
    """Smallest empirical edge-cut frequency over the sampled cuts."""
    return float(empirical_edge_frequencies(samples, g).min())


def approximation_ratio(value, g, eta_bar=None):
    """``value / eta_bar(G)``, solving for ``eta_bar`` when not supplied."""
    eta = solve_exact(g).value if eta_bar is None else eta_bar
    if eta <= 0:
        raise ParameterError("approximation ratio undefined when eta_bar = 0")
    return value / eta


def hoeffding_validation(p, g, eps, delta, repetitions, seed):
    """Fraction of repetitions where ``T = shots_absolute`` samples miss by more than ``eps``."""
    T = shots_absolute(eps, delta, g.n_edges)
    exact = p.edge_probs(g)
    rng = np.random.default_rng(seed)
    misses = 0
    for _ in range(repetitions):
        freq = empirical_edge_frequencies(p.sample(T, rng), g)
        misses += np.abs(freq - exact).max() > eps
    return misses / repetitions, T


# ---------------------------------------------------------------------------
# Gradient variance


def variance_bounds(n_vertices, n_edges):
    """``(d^2 |E|, d^2) / ((d^2 - 4)(d + 2))`` with ``d = 2^|V|``."""
    d = 2.0**n_vertices
    base = d * d / ((d * d - 4) * (d + 2))
    return base * n_edges, base


@dataclass
class VarianceStudy:
    sizes: list
    layers: int
    n_instances: int
    n_param_points: int
    coordinate: str
    empirical_var_lse: list
    empirical_var_min: list
    stderr_lse: list
    stderr_min: list
    bound_lse: list
    bound_min: list
    n_edges: list = field(default_factory=list)

    def consistent(self, n_se=3.0):
        """Per size, whether both estimates sit below their bound within ``n_se`` errors."""
        return [
            bool(vl <= bl + n_se * sl and vm <= bm + n_se * sm)
            for vl, sl, bl, vm, sm, bm in zip(
                self.empirical_var_lse, self.stderr_lse, self.bound_lse,
                self.empirical_var_min, self.stderr_min, self.bound_min,
            )
        ]

    def rows(self):
        keys = ("size", "n_edges", "var_lse", "se_lse", "bound_lse", "var_min", "se_min", "bound_min")
        cols = (self.sizes, self.n_edges, self.empirical_var_lse, self.stderr_lse, self.bound_lse,
                self.empirical_var_min, self.stderr_min, self.bound_min)
        return [dict(zip(keys, vals)) for vals in zip(*cols)]


def _variance_and_se(x):
    """Sample variance and its delta-method standard error."""
    x = np.asarray(x, dtype=np.float64)
    c = x - x.mean()
    var = float(c @ c / (x.size - 1))
    m4 = float(np.mean(c**4))
    se = math.sqrt(max(m4 - var * var, 0.0) / x.size)
    return var, se


def random_connected_graph(n, rng, p=0.5, max_tries=1000):
    if n == 2:
        return complete_graph(2)
    for _ in range(max_tries):
        iu, ju = np.triu_indices(n, 1)
        keep = rng.random(iu.size) < p
        g = Graph(n, tuple(zip(iu[keep].tolist(), ju[keep].tolist())))
        if g.is_connected():
            return g
    raise ParameterError("could not draw a connected graph")


def variance_study(sizes=(2, 3, 4, 5), layers=100, n_instances=20, n_points=100, seed=0, tau=0.05):
    """Variance of one partial derivative across random parameter points.

    Each instance is a random connected graph on ``n`` vertices under a
    ``layers``-deep multi-angle circuit. Parameters are uniform on
    ``[0, 2 pi)``. The derivative is taken along the first gamma slot of the
    middle layer, for the LSE objective and for the hard minimum. The
    reported bound for size ``n`` uses the smallest edge count drawn.
    """
    rng = np.random.default_rng(seed)
    out = {k: [] for k in ("vl", "vm", "sl", "sm", "bl", "bm", "ne")}
    coordinate = f"first gamma slot of layer {layers // 2}"
    for n in sizes:
        gl, gm, edges = [], [], []
        for _ in range(n_instances):
            g = random_connected_graph(n, rng)
            spec = build_spec(g, layers, MULTI)
            slot = spec.first_gamma_slot(layers // 2)
            edges.append(g.n_edges)
            for _ in range(n_points):
                theta = rng.uniform(0.0, 2 * np.pi, spec.n_params)
                p = edge_probabilities(spec, theta)
                _, w_lse = lse_min(p, tau)
                w_min = np.zeros(p.size)
                w_min[int(np.argmin(p))] = 1.0
                # d p_e = -d<ZZ>_e / 2
                d_lse, d_min = -0.5 * gradient_reverse_batch(spec, theta, np.stack([w_lse, w_min]))[:, slot]
                gl.append(d_lse)
                gm.append(d_min)
        vl, sl = _variance_and_se(gl)
        vm, sm = _variance_and_se(gm)
        bl, bm = variance_bounds(n, min(edges))
        for key, val in zip(("vl", "vm", "sl", "sm", "bl", "bm", "ne"), (vl, vm, sl, sm, bl, bm, min(edges))):
            out[key].append(val)
    return VarianceStudy(
        sizes=list(sizes),
        layers=layers,
        n_instances=n_instances,
        n_param_points=n_points,
        coordinate=coordinate,
        empirical_var_lse=out["vl"],
        empirical_var_min=out["vm"],
        stderr_lse=out["sl"],
        stderr_min=out["sm"],
        bound_lse=out["bl"],
        bound_min=out["bm"],
        n_edges=out["ne"],
    )


# ---------------------------------------------------------------------------
# Complete-graph separation


def kn_separation_sweep(n_max, n_min=3, points=100_000):
    """Rows ``(n, eta_bar, sdp_hr, q1)`` for ``K_n``, ``n_min <= n <= n_max``.

    Asserts the depth-one value beats the rounding value for ``n >= 4`` and
    matches it at ``n = 3``.
    """
    if n_max < 4:
        raise ParameterError("sweep needs n_max >= 4")
    rows = []
    for n in range(max(3, n_min), n_max + 1):
        q1, gamma, beta = closed_form_k1_kn_opt(n, points)
        hr = kn_hr_value(n)
        row = {"n": n, "eta_bar": kn_fair_value(n), "sdp_hr": hr, "q1": q1, "separation": q1 - hr,
               "gamma": gamma, "beta": beta}
        if n == 3:
            assert abs(q1 - hr) <= 1e-9, row
        else:
            assert q1 > hr, row
        rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# Distribution fitting


@dataclass
class FitResult:
    tv: float
    params: np.ndarray
    spec: object
    surrogate: float
    restarts: list
    seed: object

    def as_train_result(self):
        return TrainResult(self.params, 1.0 - self.tv, [], self.seed, "fit")


class _ClassMap:
    """Amplitude index to Z2 class of the base bits, ancillas traced out."""

    def __init__(self, spec, target):
        n = spec.base.n
        idx = np.arange(1 << spec.n_qubits, dtype=np.int64)
        canon = _bits.canonical_array(idx & ((1 << n) - 1), n)
        self.masks, self.cls = np.unique(canon, return_inverse=True)
        t = target.classes()
        self.target = np.array([t.get(int(m), 0.0) for m in self.masks])
        self.extra = sum(v for m, v in t.items() if m not in set(self.masks.tolist()))
        self.n = n

    def probs(self, psi):
        return np.bincount(self.cls, weights=np.abs(psi) ** 2, minlength=self.masks.size)

    def tv(self, psi):
        return 0.5 * (np.abs(self.probs(psi) - self.target).sum() + self.extra)


def fit_target_distribution(g, target, k, seed=0, mode=MULTI, restarts=3, maxiter=500, tol=1e-4):
    """Train a ``k``-layer augmented circuit to reproduce ``target``.

    The smooth surrogate ``sum_c (P_c - target_c)^2`` over Z2 classes is
    minimized by L-BFGS with adjoint gradients from up to ``restarts`` random
    starts, stopping once the exact total variation is at most ``tol``. If no
    start gets there, the best one is polished by Powell on the exact TV.

    Returns
    -------
    (tv, FitResult)
    """
    if target.n != g.n:
        raise ParameterError("target and graph sizes differ")
    if not target.is_z2_symmetric():
        raise ParameterError("target distribution must satisfy p(x) = p(-x)")
    if g.n > 6:
        raise ParameterError("exact fitting limited to 6 vertices")
    spec = build_dqaoa_spec(g, k, mode)
    cmap = _ClassMap(spec, target)

    def surrogate(theta):
        psi = run_circuit(spec, theta)
        diff = cmap.probs(psi) - cmap.target
        obs = 2.0 * diff[cmap.cls]
        # value of <obs> is not the surrogate; only its gradient is used
        _, grad = _gradient_diag(spec, theta, obs)
        return float(diff @ diff), grad

    rng = np.random.default_rng(seed)
    tried = []
    best = None
    for _ in range(restarts):
        x0 = rng.uniform(0.0, 2 * np.pi, spec.n_params)
        res = minimize(surrogate, x0, jac=True, method="L-BFGS-B", options={"maxiter": maxiter})
        tv = cmap.tv(run_circuit(spec, res.x))
        tried.append(tv)
        if best is None or tv < best[0]:
            best = (tv, res.x, float(res.fun))
        if tv <= tol:
            break
    tv, x, sur = best
    if tv > tol:
        res = minimize(lambda th: cmap.tv(run_circuit(spec, th)), x, method="Powell",
                       options={"maxiter": 20 * spec.n_params, "xtol": 1e-8, "ftol": 1e-12})
        if res.fun < tv:
            tv, x = float(res.fun), res.x
    return float(tv), FitResult(tv=float(tv), params=x, spec=spec, surrogate=sur, restarts=tried, seed=seed)


def circuit_distribution(spec, params):
    """Distribution of the base bits of a circuit output (ancillas traced out)."""
    psi = run_circuit(spec, params)
    probs = marginal_probabilities(psi, spec.base.n)
    keep = np.flatnonzero(probs > 0)
    return CutDistribution(spec.base.n, zip(keep.tolist(), probs[keep].tolist()))


def triangle_target():
    """Uniform over the six cuts of the triangle that separate one vertex."""
    masks = [0b001, 0b110, 0b010, 0b101, 0b100, 0b011]
    return CutDistribution(3, {m: 1 / 6 for m in masks})


__all__ = [
    "ShotBudget",
    "VarianceStudy",
    "FitResult",
    "approximation_ratio",
    "circuit_distribution",
    "empirical_edge_frequencies",
    "empirical_fair_value",
    "fit_target_distribution",
    "hoeffding_eps",
    "hoeffding_validation",
    "kn_separation_sweep",
    "shot_budget",
    "shots_absolute",
    "shots_relative",
    "total_variation",
    "triangle_target",
    "variance_bounds",
    "variance_study",
]
