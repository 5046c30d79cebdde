"""Fair cut cover SDP over unit-vector embeddings.

The relaxation ``max t`` s.t. ``w_uv (1 - C_uv) / 2 >= t``, ``C >= 0``,
``diag C = 1`` is solved in factored form ``C = V V^T`` with unit rows. The
max-min objective is smoothed by log-sum-exp, which is concave in ``C``, and
maximized by projected gradient ascent on the product of spheres while the
temperature is annealed towards zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, VerificationError
from .graphs import GraphFamily, max_clique

ALPHA_GW = 0.878567
UNIT_TOL = 1e-10


class Embedding:
    """One unit vector per vertex; row ``i`` of ``vectors`` is ``v_i``."""

    __slots__ = ("vectors",)

    def __init__(self, vectors):
        V = np.array(vectors, dtype=np.float64, ndmin=2)
        norms = np.linalg.norm(V, axis=1)
        if np.any(np.abs(norms - 1.0) > UNIT_TOL):
            raise ParameterError(f"embedding rows must be unit vectors (max deviation {np.abs(norms - 1).max():.2e})")
        V.setflags(write=False)
        self.vectors = V

    @classmethod
    def normalized(cls, vectors):
        V = np.array(vectors, dtype=np.float64, ndmin=2)
        return cls(V / np.linalg.norm(V, axis=1, keepdims=True))

    @property
    def n(self):
        return self.vectors.shape[0]

    @property
    def rank(self):
        return self.vectors.shape[1]

    def gram(self):
        return self.vectors @ self.vectors.T

    def edge_inner(self, g):
        """``<v_u, v_v>`` for every edge, clipped to [-1, 1]."""
        if g.n != self.n:
            raise ParameterError(f"embedding has {self.n} rows, graph has {g.n} vertices")
        E = g.edge_array
        ip = np.einsum("ij,ij->i", self.vectors[E[:, 0]], self.vectors[E[:, 1]])
        return np.clip(ip, -1.0, 1.0)

    def restrict(self, vertices):
        """Rows for ``vertices`` in order (a principal submatrix of the Gram)."""
        return Embedding(self.vectors[list(vertices)])

    def __repr__(self):
        return f"Embedding(n={self.n}, rank={self.rank})"


@dataclass
class SdpReport:
    t_star: float
    embedding: Embedding
    hr_value: float
    converged: bool
    iterations: int
    grad_norm: float = float("nan")
    gap_proxy: float = float("nan")
    restart_values: list = field(default_factory=list)

    def to_dict(self):
        return {
            "t_objective": self.t_star,
            "hr_value": self.hr_value,
            "embedding": self.embedding.vectors.tolist(),
            "converged": self.converged,
            "iterations": self.iterations,
            "grad_norm": self.grad_norm,
            "gap_proxy": self.gap_proxy,
        }


def edge_objective(emb, g):
    """Per-edge SDP terms ``w_uv (1 - <v_u, v_v>) / 2``."""
    return g.weights * (1.0 - emb.edge_inner(g)) / 2.0


def hr_value_from_embedding(emb, g):
    """Smallest hyperplane-rounding cut probability ``arccos(<v_u, v_v>) / pi``."""
    return float(np.arccos(emb.edge_inner(g)).min() / np.pi)


def _ascent(g, V, tau0, tau_min, every, step0, tol, stable_window):
    u, v = g.edge_array[:, 0], g.edge_array[:, 1]
    w = g.weights

    def smooth(V, tau):
        t = w * (1.0 - np.einsum("ij,ij->i", V[u], V[v])) / 2.0
        m = t.min()
        z = np.exp(-(t - m) / tau)
        s = z.sum()
        return m - tau * np.log(s), z / s, t

    tau, step, it = tau0, step0, 0
    trace = []
    while True:
        level = []
        for _ in range(every):
            f, p, t = smooth(V, tau)
            level.append(f)
            # this temperature has stalled; the final level still fills the stability window
            if len(level) > stable_window and f - level[-1 - stable_window] <= 1e-13:
                break
            G = np.zeros_like(V)
            coef = -(w * p / 2.0)[:, None]
            np.add.at(G, u, coef * V[v])
            np.add.at(G, v, coef * V[u])
            # tangent projection onto each sphere
            G -= np.sum(G * V, axis=1, keepdims=True) * V
            gsq = float(np.sum(G * G))
            while True:
                Vn = V + step * G
                Vn /= np.linalg.norm(Vn, axis=1, keepdims=True)
                fn = smooth(Vn, tau)[0]
                if fn >= f + 1e-4 * step * gsq or step < 1e-12:
                    break
                step *= 0.5
            V = Vn
            step = min(step * 1.5, 1.0)
            it += 1
            if tau <= tau_min:
                trace.append(t.min())
        if tau <= tau_min:
            break
        tau = max(tau * 0.5, tau_min)
    grad_norm = float(np.sqrt(gsq))
    recent = np.array(trace[-stable_window:])
    stable = recent.size == stable_window and np.ptp(recent) <= max(tol, 1e-9)
    return V, it, grad_norm, bool(grad_norm < tol and stable)


def solve_sdp(g, rank=None, tol=1e-5, seed=0, restarts=8, tau0=0.1, tau_min=1e-4, every=500, step0=0.05):
    """Numerically solve the fair cut cover SDP.

    Parameters
    ----------
    g : Graph
    rank : int, optional
        Embedding dimension, default ``n`` (full rank).
    tol : float
        Gradient-norm threshold for the ``converged`` flag; the minimum edge
        term must also be stable over the last 50 steps.
    seed : int
        Restart ``i`` uses the ``i``-th child of ``SeedSequence(seed)``.
    restarts : int
        Independent random starts; the best ``t`` is kept.

    Returns
    -------
    SdpReport
    """
    if g.n_edges == 0:
        raise ParameterError("SDP undefined on an edgeless graph")
    if tol <= 0:
        raise ParameterError("tol must be positive")
    if restarts < 1:
        raise ParameterError("need at least one restart")
    rank = g.n if rank is None else int(rank)
    if rank < 1:
        raise ParameterError("rank must be positive")
    best = None
    values = []
    for child in np.random.SeedSequence(seed).spawn(restarts):
        rng = np.random.default_rng(child)
        V0 = rng.standard_normal((g.n, rank))
        V0 /= np.linalg.norm(V0, axis=1, keepdims=True)
        V, it, gn, conv = _ascent(g, V0, tau0, tau_min, every, step0, tol, 50)
        emb = Embedding.normalized(V)
        t = float(edge_objective(emb, g).min())
        values.append(t)
        if best is None or t > best[0] + 1e-12:
            best = (t, emb, it, gn, conv)
    t, emb, it, gn, conv = best
    terms = np.sort(edge_objective(emb, g))
    gap = float(terms[1] - terms[0]) if terms.size > 1 else 0.0
    return SdpReport(
        t_star=t,
        embedding=emb,
        hr_value=hr_value_from_embedding(emb, g),
        converged=conv,
        iterations=it,
        grad_norm=gn,
        gap_proxy=gap,
        restart_values=values,
    )


def sdp_value_analytic(family):
    """Optimal minimum edge inner product and its rounding value for closed-form families.

    Uses ``rho = -1 / (theta(complement) - 1)``: ``-1/(n-1)`` for ``K_n``,
    ``-cos(pi/n)`` for odd cycles, ``-1`` for even cycles (bipartite) and
    ``-k/(n-k)`` for ``Kneser(n, k)``.

    Returns
    -------
    (rho, hr_value)
    """
    if isinstance(family, str):
        family = GraphFamily.parse(family)
    name, p = family.name, family.params
    if name == "complete":
        n = int(p[0])
        if n < 2:
            raise ParameterError("K_n needs n >= 2")
        rho = -1.0 / (n - 1)
    elif name == "cycle":
        n = int(p[0])
        if n < 3:
            raise ParameterError("cycle needs n >= 3")
        rho = -np.cos(np.pi / n) if n % 2 else -1.0
    elif name in ("kneser", "petersen"):
        n, k = (int(p[0]), int(p[1])) if name == "kneser" else (5, 2)
        if k < 1 or n < 2 * k:
            raise ParameterError("Kneser graph needs k >= 1 and n >= 2k")
        rho = -k / (n - k)
    else:
        raise ParameterError(f"no closed form for family {name!r}")
    rho = float(rho)
    return rho, float(np.arccos(rho) / np.pi)


def clique_bounds(g, hr_value=None, tol=1e-4):
    """Clique-number sandwich for the rounding value.

    ``upper = arccos(1/(1-omega))/pi`` and ``lower = arccos(1/(1-n))/pi``.
    When ``hr_value`` is given it is checked to lie in ``[lower, upper + tol]``.
    """
    omega = max_clique(g)
    if omega < 2:
        raise ParameterError("clique bounds need at least one edge")
    upper = float(np.arccos(1.0 / (1 - omega)) / np.pi)
    lower = float(np.arccos(1.0 / (1 - g.n)) / np.pi)
    if hr_value is not None and not (lower - tol <= hr_value <= upper + tol):
        raise VerificationError(f"rounding value {hr_value} outside clique bounds [{lower}, {upper}]")
    return upper, lower


def check_sandwich(eta_bar, report, tol=1e-6):
    """``alpha_GW * SDP <= SDP_HR <= eta_bar <= SDP``, each within ``tol``."""
    t, hr = report.t_star, report.hr_value
    return bool(ALPHA_GW * t <= hr + tol and hr <= eta_bar + tol and eta_bar <= t + tol)
