"""Exact fair cut cover value by linear programming.

Two independent routes:

* primal enumeration, ``max t`` s.t. ``Y p >= t``, ``sum p = 1`` over every
  Z2 cut class (HiGHS on the full problem, then the in-house simplex on the
  optimal support for a clean basic solution);
* dual cutting planes, ``min_q max_x q . Y_x`` over the edge simplex, where the
  inner max is weighted MaxCut solved by brute force.

Both report the same :class:`LpReport`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from . import _bits
from .cuts import CutDistribution, edge_cut_probabilities
from .errors import BudgetError, ConvergenceError, ParameterError, VerificationError
from .graphs import max_cut_bruteforce
from .lp import simplex_max

PRIMAL_VERTEX_LIMIT = 17
DUAL_VERTEX_LIMIT = 30
MAX_CUTS = 10_000
SUPPORT_THRESHOLD = 1e-12


@dataclass
class LpReport:
    value: float
    witness: CutDistribution
    dual_weights: np.ndarray
    iterations: int
    method: str
    gap: float = 0.0
    bound_history: list = field(default_factory=list, repr=False)

    def to_dict(self):
        return {
            "value": self.value,
            "dual_weights": [float(x) for x in self.dual_weights],
            "witness": self.witness.to_dict(),
            "method": self.method,
            "iterations": self.iterations,
            "gap": self.gap,
        }


def _check_graph(g, limit):
    if g.n_edges == 0:
        raise ParameterError("fair cut cover is undefined on an edgeless graph")
    if g.n > limit:
        raise BudgetError(f"graph has {g.n} vertices; this solver is limited to {limit}")


def _restricted(masks, g, basis=None):
    """Solve the primal restricted to ``masks``; returns (t, p, q, result)."""
    Y = _bits.cut_indicator(masks, g.edge_pairs).astype(np.float64)
    m, k = Y.shape
    # variables [t, p]; rows: t - Y p <= 0 per edge, sum p <= 1
    A = np.zeros((m + 1, k + 1))
    A[:m, 0] = 1.0
    A[:m, 1:] = -Y
    A[m, 1:] = 1.0
    b = np.zeros(m + 1)
    b[m] = 1.0
    c = np.zeros(k + 1)
    c[0] = 1.0
    res = simplex_max(c, A, b, basis=basis)
    p = np.clip(res.x[1:], 0.0, None)
    q = np.clip(res.duals[:m], 0.0, None)
    return res.value, p / p.sum(), q / q.sum(), res


def _witness(n, masks, p):
    keep = p > SUPPORT_THRESHOLD
    return CutDistribution(n, zip(masks[keep].tolist(), p[keep].tolist()))


def solve_primal_enumeration(g):
    """Exact ``eta_bar(G)`` by the LP over all ``2**(n-1)`` cut classes.

    Limited to 17 vertices; larger graphs should use
    :func:`solve_dual_cutting_plane`.
    """
    try:
        _check_graph(g, PRIMAL_VERTEX_LIMIT)
    except BudgetError as exc:
        raise BudgetError(f"{exc}; use solve_dual_cutting_plane instead") from None
    masks = _bits.class_masks(g.n)
    Y = sparse.csr_matrix(_bits.cut_indicator(masks, g.edge_pairs), dtype=np.float64)
    m, N = Y.shape
    A_ub = sparse.hstack([sparse.csr_matrix(np.ones((m, 1))), -Y], format="csr")
    A_eq = sparse.csr_matrix(np.concatenate([[0.0], np.ones(N)])[None, :])
    c = np.zeros(N + 1)
    c[0] = -1.0
    # t >= 0 is implied by p >= 0, so one bound covers every variable
    res = linprog(c, A_ub=A_ub, b_ub=np.zeros(m), A_eq=A_eq, b_eq=[1.0], bounds=(0, None), method="highs-ipm")
    if res.status != 0:
        raise ConvergenceError(f"primal LP failed: {res.message}")
    t_highs = -res.fun
    p_highs = np.clip(res.x[1:], 0.0, None)
    support = masks[p_highs > 1e-10]

    # polish: exact basic solution on the support
    t, p, q, sres = _restricted(support, g)
    iters = sres.iterations
    if t < t_highs - 1e-9:
        t, p, support = t_highs, p_highs / p_highs.sum(), masks
        q = np.clip(-res.ineqlin.marginals, 0.0, None)
        q = q / q.sum()
    witness = _witness(g.n, support, p)
    return LpReport(
        value=float(t),
        witness=witness,
        dual_weights=q,
        iterations=int(res.nit) + iters,
        method="PrimalEnumeration",
    )


def _initial_cuts(n, seed):
    cuts = {_bits.canonical(1 << v, n) for v in range(n)}
    rng = np.random.default_rng(seed)
    side = rng.permutation(n)[: n // 2]
    cuts.add(_bits.canonical(int(sum(1 << int(v) for v in side)), n))
    cuts.discard(0)
    return sorted(cuts)


def solve_dual_cutting_plane(g, tol=1e-8, max_cuts=MAX_CUTS, seed=0):
    """Exact ``eta_bar(G)`` by cutting planes on the dual.

    The restricted primal over the current cut pool gives a lower bound ``t``
    and dual weights ``q`` on the edge simplex. Weighted MaxCut under ``q``
    gives the upper bound ``M(q)`` and, when ``M(q) > t``, the violated cut to
    add. Stops when ``M(q) - t <= tol``.

    Raises
    ------
    ConvergenceError
        If the pool reaches ``max_cuts`` before the bounds meet; carries the gap.
    """
    _check_graph(g, DUAL_VERTEX_LIMIT)
    pool = _initial_cuts(g.n, seed)
    in_pool = set(pool)
    history = []
    total_iters = 0
    best_upper, best_q = np.inf, None
    basis = None
    while True:
        masks = np.array(pool, dtype=np.int64)
        t, p, q, res = _restricted(masks, g, basis)
        total_iters += res.iterations
        upper, mask = max_cut_bruteforce(g, q)
        if upper < best_upper:
            best_upper, best_q = upper, q
        history.append((t, upper))
        gap = best_upper - t
        if gap <= tol:
            break
        if mask in in_pool and gap <= 1e-6:
            break
        if mask in in_pool or len(pool) >= max_cuts:
            raise ConvergenceError(
                f"cutting plane stalled with gap {gap:.3e} after {len(pool)} cuts",
                gap=gap,
                iterations=len(history),
            )
        # the new column goes after the current cuts, shifting slack indices by one
        k = len(pool)
        basis = np.where(res.basis > k, res.basis + 1, res.basis)
        pool.append(mask)
        in_pool.add(mask)
    return LpReport(
        value=float(t),
        witness=_witness(g.n, masks, p),
        dual_weights=best_q,
        iterations=len(history),
        method="DualCuttingPlane",
        gap=float(max(gap, 0.0)),
        bound_history=history,
    )


def solve_exact(g, method="auto", **kwargs):
    """Dispatch to the primal route up to 17 vertices, the dual route above."""
    if method == "auto":
        method = "primal" if g.n <= PRIMAL_VERTEX_LIMIT else "dual"
    if method == "primal":
        return solve_primal_enumeration(g)
    if method == "dual":
        return solve_dual_cutting_plane(g, **kwargs)
    raise ParameterError(f"unknown exact method {method!r}")


@dataclass
class DualityReport:
    ok: bool
    primal: float
    dual: float
    gap: float
    max_cut_under_q: float
    offending_cut: int | None = None
    offending_value: float | None = None

    def raise_if_failed(self):
        if not self.ok:
            raise VerificationError(
                f"duality check failed: gap {self.gap:.3e}, cut {self.offending_cut} "
                f"scores {self.offending_value} under q*"
            )
        return self


def verify_duality(g, primal=None, dual=None, tol=1e-7):
    """Strong duality and complementary slackness between the two routes.

    Every cut in the primal witness support must be a weighted-MaxCut optimum
    under the dual weights ``q*`` of the cutting-plane solution.
    """
    primal = solve_primal_enumeration(g) if primal is None else primal
    dual = solve_dual_cutting_plane(g) if dual is None else dual
    q = dual.dual_weights
    best, _ = max_cut_bruteforce(g, q)
    gap = abs(primal.value - dual.value)
    scores = _bits.cut_weights(primal.witness.masks, g.edge_pairs, q)
    worst = int(np.argmin(scores))
    slack_ok = scores[worst] >= best - tol
    ok = gap <= tol and slack_ok
    return DualityReport(
        ok=bool(ok),
        primal=primal.value,
        dual=dual.value,
        gap=float(gap),
        max_cut_under_q=float(best),
        offending_cut=None if slack_ok else int(primal.witness.masks[worst]),
        offending_value=None if slack_ok else float(scores[worst]),
    )


def fair_value_upper_bound_maxcut(g, edge_transitive=False, tol=1e-9):
    """``MaxCut(G) / |E|``; with ``edge_transitive`` the bound is checked to be tight."""
    if g.n_edges == 0:
        raise ParameterError("bound undefined on an edgeless graph")
    unit = np.ones(g.n_edges)
    value, _ = max_cut_bruteforce(g, unit)
    bound = value / g.n_edges
    if edge_transitive:
        exact = solve_exact(g).value
        if abs(exact - bound) > tol:
            raise VerificationError(f"graph declared edge-transitive but eta_bar={exact} != {bound}")
    return bound


def witness_min_probability(report, g):
    """Independent re-evaluation of the witness through the cuts module."""
    return float(edge_cut_probabilities(report.witness, g).min())
