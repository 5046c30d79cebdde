"""Training circuit angles for the fair cut cover objective.

The hard objective is ``min_e p_e(theta)``. Training usually runs Adam on the
log-sum-exp smoothing ``f_tau = -tau log sum_e exp(-p_e / tau)``, whose
gradient is a softmax-weighted sum of edge gradients. Reported values are
always the hard minimum at the best parameters seen.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import ConvergenceError, FaircutError, ParameterError
from .qsim import (
    STANDARD,
    build_spec,
    edge_probabilities,
    gradient_reverse,
    plus_state,
    run_circuit,
    zz_expectations,
)

SANDWICH_SLACK = 1e-12


@dataclass(frozen=True)
class Objective:
    """``kind`` is ``"min"`` or ``"lse"``; LSE can anneal ``tau`` geometrically."""

    kind: str = "lse"
    tau: float = 0.05
    anneal: bool = False
    anneal_every: int = 200
    anneal_factor: float = 0.5
    tau_min: float = 1e-3

    def __post_init__(self):
        if self.kind not in ("min", "lse"):
            raise ParameterError(f"unknown objective {self.kind!r}")
        if self.kind == "lse" and not self.tau > 0:
            raise ParameterError("LSE temperature must be positive")

    def tau_at(self, it):
        if not self.anneal:
            return self.tau
        return max(self.tau * self.anneal_factor ** (it // self.anneal_every), self.tau_min)

    def at(self, it):
        if self.kind == "min" or not self.anneal:
            return self
        return Objective("lse", self.tau_at(it))


MIN = Objective("min")


@dataclass(frozen=True)
class TrainConfig:
    step_size: float = 0.01
    beta1: float = 0.9
    beta2: float = 0.99
    eps_adam: float = 1e-8
    max_iters: int = 1000
    patience: int = 30
    improvement_floor: float = 1e-4
    init_range: tuple = (0.0, 0.05)
    n_seeds: int = 10

    def __post_init__(self):
        for name in ("step_size", "beta1", "beta2", "eps_adam", "patience", "improvement_floor", "n_seeds"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"{name} must be positive")
        if self.max_iters < 0:
            raise ParameterError("max_iters must be non-negative")
        lo, hi = self.init_range
        if not hi > lo:
            raise ParameterError("init_range must have lo < hi")


@dataclass
class TrainResult:
    best_params: np.ndarray
    best_value: float
    trajectory: list
    seed: object
    converged_reason: str
    objective_trajectory: list = field(default_factory=list, repr=False)

    def to_dict(self):
        return {
            "best_params": [float(x) for x in self.best_params],
            "best_value": self.best_value,
            "trajectory": [float(x) for x in self.trajectory],
            "objective_trajectory": [float(x) for x in self.objective_trajectory],
            "seed": self.seed if isinstance(self.seed, (int, type(None))) else str(self.seed),
            "converged_reason": self.converged_reason,
        }


def lse_min(p, tau):
    """``-tau log sum exp(-p / tau)`` and its softmax weights."""
    p = np.asarray(p, dtype=np.float64)
    m = p.min()
    z = np.exp(-(p - m) / tau)
    s = z.sum()
    return m - tau * np.log(s), z / s


def objective_from_probs(p, obj):
    """Objective value and weights ``d value / d p_e`` from edge probabilities."""
    m = float(p.min())
    if obj.kind == "min":
        weights = np.zeros(p.size)
        weights[int(np.argmin(p))] = 1.0
        return m, weights
    value, weights = lse_min(p, obj.tau)
    if not (m - obj.tau * np.log(p.size) - SANDWICH_SLACK <= value <= m + SANDWICH_SLACK):
        raise FaircutError(f"LSE sandwich violated: min {m}, f {value}, tau {obj.tau}")
    return float(value), weights


def evaluate_objective(spec, params, g=None, obj=MIN):
    """Objective value and per-edge weights at ``params``.

    ``min`` gives a one-hot weight on the lowest-index minimizing edge. ``lse``
    gives ``softmax(<ZZ>_e / (2 tau))``, equivalently ``softmax(-p_e / tau)``.
    """
    g = spec.base if g is None else g
    psi = run_circuit(spec, params)
    p = (1.0 - zz_expectations(psi, g, spec)) / 2.0
    return objective_from_probs(p, obj)


def _value_and_grad(spec, params, obj):
    p = edge_probabilities(spec, params)
    value, weights = objective_from_probs(p, obj)
    # p_e = (1 - <ZZ>_e) / 2
    grad = -0.5 * gradient_reverse(spec, params, weights)
    return value, float(p.min()), grad


def initial_params(spec, cfg, rng, strategy="small"):
    if strategy == "small":
        lo, hi = cfg.init_range
    elif strategy == "uniform":
        lo, hi = 0.0, 2 * np.pi
    else:
        raise ParameterError(f"unknown init strategy {strategy!r}")
    return rng.uniform(lo, hi, spec.n_params)


def train(spec, g=None, obj=None, cfg=None, seed=0, init_params=None, init="small"):
    """Adam ascent on the objective with best-seen tracking.

    Stops at ``max_iters`` or when the running best of the training objective
    improved by less than ``improvement_floor`` over the last ``patience``
    iterations.
    """
    g = spec.base if g is None else g
    if g is not spec.base and g.edge_pairs != spec.base.edge_pairs:
        raise ParameterError("graph does not match the circuit objective edges")
    obj = Objective() if obj is None else obj
    cfg = TrainConfig() if cfg is None else cfg
    rng = np.random.default_rng(seed)
    theta = spec.check(initial_params(spec, cfg, rng, init) if init_params is None else init_params).copy()

    m = np.zeros_like(theta)
    v = np.zeros_like(theta)
    value, hard, grad = _value_and_grad(spec, theta, obj.at(0))
    best_value, best_params = hard, theta.copy()
    trajectory, obj_traj = [hard], [value]
    running = [value]
    reason = "max_iters"
    for it in range(1, cfg.max_iters + 1):
        if not np.all(np.isfinite(grad)):
            raise ConvergenceError(f"non-finite gradient at iteration {it}: {grad}", iterations=it)
        m = cfg.beta1 * m + (1 - cfg.beta1) * grad
        v = cfg.beta2 * v + (1 - cfg.beta2) * grad * grad
        mhat = m / (1 - cfg.beta1**it)
        vhat = v / (1 - cfg.beta2**it)
        theta = theta + cfg.step_size * mhat / (np.sqrt(vhat) + cfg.eps_adam)
        value, hard, grad = _value_and_grad(spec, theta, obj.at(it))
        trajectory.append(hard)
        obj_traj.append(value)
        running.append(max(running[-1], value))
        if hard > best_value:
            best_value, best_params = hard, theta.copy()
        if it >= cfg.patience and running[-1] - running[-1 - cfg.patience] < cfg.improvement_floor:
            reason = "patience"
            break
    return TrainResult(
        best_params=best_params,
        best_value=float(best_value),
        trajectory=trajectory,
        seed=seed,
        converged_reason=reason,
        objective_trajectory=obj_traj,
    )


def seed_streams(seed, count):
    """Independent child seeds, one per training run."""
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(count)]


def train_multi(spec, g=None, obj=None, cfg=None, seed=0, init="small", jobs=1):
    """``cfg.n_seeds`` independent runs; returns ``(best, all_results)``."""
    cfg = TrainConfig() if cfg is None else cfg
    seeds = seed_streams(seed, cfg.n_seeds)

    def one(s):
        return train(spec, g, obj, cfg, s, init=init)

    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            results = list(pool.map(one, seeds))
    else:
        results = [one(s) for s in seeds]
    best = max(results, key=lambda r: r.best_value)
    return best, results


def depth_sweep(g, k_max, obj=None, cfg=None, seed=0, mode=STANDARD):
    """``Q_1 .. Q_{k_max}`` with fresh multi-seed runs plus a warm start.

    The depth-``k+1`` warm start pads the depth-``k`` optimum with a zero
    layer, which leaves the state unchanged, so values never decrease.
    """
    cfg = TrainConfig() if cfg is None else cfg
    out = []
    prev = None
    for k, s in zip(range(1, k_max + 1), seed_streams(seed, k_max)):
        spec = build_spec(g, k, mode)
        best, _ = train_multi(spec, g, obj, cfg, s)
        if prev is not None:
            warm = train(spec, g, obj, cfg, s, init_params=prev[0].pad(prev[1].best_params, k))
            if warm.best_value > best.best_value:
                best = warm
        out.append(best)
        prev = (spec, best)
    return out


# ---------------------------------------------------------------------------
# Depth-one grid search


class _K1Tables:
    """Coefficients ``(a_e, b_e)`` with ``<ZZ>_e(beta) = cs a_e + s^2 b_e``.

    Uses ``U_M^dag Z U_M = cos(2 beta) Z + sin(2 beta) Y`` on the phased state
    ``phi = exp(-i gamma C)|+>``, whose ``<ZZ>`` vanishes identically, so
    ``a_e = <Z_u Y_v> + <Y_u Z_v>`` and ``b_e = <Y_u Y_v>``. Both come from
    two Gram products over the stacked single-qubit images of ``phi``.
    """

    def __init__(self, spec, g):
        n = spec.n_qubits
        idx = np.arange(1 << n, dtype=np.int64)
        bits = (idx[None, :] >> np.arange(n)[:, None]) & 1
        self.cost = spec.cost_diag
        self.amp = 2.0 ** (-n / 2)
        self.flip = idx[None, :] ^ (1 << np.arange(n))[:, None]
        # Y|0> = i|1>, Y|1> = -i|0>
        self.ysign = 1j * (2 * bits - 1).astype(np.float64)
        self.zsign = (1 - 2 * bits).astype(np.float64)
        self.u, self.v = g.edge_array[:, 0], g.edge_array[:, 1]

    def __call__(self, gamma):
        phi = self.amp * np.exp(-1j * gamma * self.cost)
        yphi = self.ysign * phi[self.flip]
        zy = np.real((self.zsign * phi.conj()) @ yphi.T)
        yy = np.real(yphi.conj() @ yphi.T)
        u, v = self.u, self.v
        return zy[u, v] + zy[v, u], yy[u, v]


def _k1_edge_tables(spec, g, gamma):
    return _K1Tables(spec, g)(gamma)


def _min_over_beta(a, b, betas):
    c, s = np.cos(2 * betas), np.sin(2 * betas)
    zz = np.outer(c * s, a) + np.outer(s * s, b)
    return ((1.0 - zz) / 2.0).min(axis=1)


def k1_landscape(g, resolution, spec=None):
    """Hard-min value on the ``resolution x resolution`` grid over ``[0, 2 pi)^2``."""
    spec = build_spec(g, 1) if spec is None else spec
    axis = np.arange(resolution) * (2 * np.pi / resolution)
    out = np.empty((resolution, resolution))
    tables = _K1Tables(spec, g)
    # psi(-gamma, -beta) = conj(psi(gamma, beta)), so row -i is row i reversed
    neg = (-np.arange(resolution)) % resolution
    for i in range(resolution // 2 + 1):
        a, b = tables(axis[i])
        out[i] = _min_over_beta(a, b, axis)
        out[neg[i]] = out[i][neg]
    return axis, out


def _best_beta(a, b, lo, hi):
    res = minimize_scalar(lambda x: -_min_over_beta(a, b, np.array([x]))[0], bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-10})
    return float(res.x), float(-res.fun)


def grid_optimize_k1_std(g, resolution=400, refine=5, spec=None):
    """Global depth-one optimum: dense grid, then local refinement of the best cells.

    Each of the ``refine`` best cells is polished by a bounded scalar search
    in ``gamma`` over its neighbourhood, with the inner ``beta`` optimum found
    the same way on the exact depth-one tables. The winner is re-simulated.
    """
    spec = build_spec(g, 1) if spec is None else spec
    if spec.mode != STANDARD or spec.k != 1:
        raise ParameterError("grid search needs a depth-one standard circuit")
    axis, land = k1_landscape(g, resolution, spec)
    tables = _K1Tables(spec, g)
    h = axis[1] - axis[0]
    order = np.argsort(land, axis=None, kind="stable")[::-1][:refine]
    best_val, best_x = -np.inf, None
    trajectory = []
    for flat in order:
        i, j = np.unravel_index(flat, land.shape)
        cell = (float(land[i, j]), axis[i], axis[j])

        def inner(ga, j=j):
            a, b = tables(ga)
            return _best_beta(a, b, axis[j] - h, axis[j] + h)

        res = minimize_scalar(lambda ga: -inner(ga)[1], bounds=(axis[i] - h, axis[i] + h), method="bounded",
                              options={"xatol": 1e-10})
        be, val = inner(res.x)
        cand = max(cell, (val, float(res.x), be))
        trajectory.append(cand[0])
        if cand[0] > best_val:
            best_val, best_x = cand[0], np.array(cand[1:])
    value = float(edge_probabilities(spec, best_x).min())
    return TrainResult(
        best_params=best_x,
        best_value=value,
        trajectory=trajectory,
        seed=None,
        converged_reason="grid",
    )


def compare_init_strategies(spec, g=None, cfg=None, strategies=("small-min", "small-lse"), seed=0, tau=0.05):
    """Best value per initialization strategy over ``cfg.n_seeds`` runs, ranked.

    Strategies are ``small-min``, ``small-lse`` and ``uniform-lse``.
    """
    cfg = TrainConfig() if cfg is None else cfg
    strategies = list(strategies)
    if len(strategies) < 2:
        raise ParameterError("need at least two strategies to compare")
    table = {
        "small-min": ("small", MIN),
        "small-lse": ("small", Objective("lse", tau)),
        "uniform-lse": ("uniform", Objective("lse", tau)),
    }
    out = {}
    for name in strategies:
        if name not in table:
            raise ParameterError(f"unknown strategy {name!r}")
        init, obj = table[name]
        best, runs = train_multi(spec, g, obj, cfg, seed, init=init)
        out[name] = {"best": best.best_value, "values": [r.best_value for r in runs]}
    ranking = sorted(out, key=lambda k: -out[k]["best"])
    return {"strategies": out, "ranking": ranking, "config": asdict(cfg)}
