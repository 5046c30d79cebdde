"""Statevector simulation of standard, multi-angle and ancilla-augmented QAOA.

Conventions
-----------
Qubit ``u`` is bit ``u`` of the amplitude index, and a set bit means
``Z_u = -1``, so amplitude indices are cut masks. One layer applies

* the phase separator ``exp(-i sum_s gamma_s w_s cut_s(x))``, the cut-counting
  cost ``w (1 - Z_u Z_v) / 2`` per term, fused into a single diagonal pass;
* the mixer ``exp(-i beta_u X_u)`` on every qubit.

Ancilla qubits sit above the base vertices. Their ZZ terms take part in the
dynamics but never in the objective, and sampling drops their bits.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import BudgetError, ParameterError
from .graphs import Graph

DEFAULT_QUBIT_BUDGET = 22
CUT_TABLE_BYTES = 1 << 27

STANDARD = "standard"
MULTI = "multi"
_MODES = {"standard": STANDARD, "std": STANDARD, "multi": MULTI, "multi-angle": MULTI, "ma": MULTI}


def qubit_budget():
    """Statevector cap, overridable with ``FAIRCUT_BUDGET_QUBITS``."""
    raw = os.environ.get("FAIRCUT_BUDGET_QUBITS")
    return int(raw) if raw else DEFAULT_QUBIT_BUDGET


def _mode(mode):
    try:
        return _MODES[str(mode).lower()]
    except KeyError:
        raise ParameterError(f"unknown circuit mode {mode!r}") from None


@dataclass(frozen=True, eq=False)
class CircuitSpec:
    """Layered gate plan.

    ``augmented`` lists the base edges first, then any ancilla edges. In
    standard mode layer ``l`` has slots ``2l`` (gamma) and ``2l + 1`` (beta).
    In multi-angle mode layer ``l`` owns ``|E'|`` gamma slots followed by
    ``|V'|`` beta slots.
    """

    base: Graph
    augmented: Graph
    k: int
    mode: str
    ancillas: tuple = ()

    @property
    def n_qubits(self):
        return self.augmented.n

    @property
    def n_terms(self):
        return self.augmented.n_edges

    @property
    def slots_per_layer(self):
        return 2 if self.mode == STANDARD else self.n_terms + self.n_qubits

    @property
    def n_params(self):
        return self.k * self.slots_per_layer

    def gamma_slots(self, layer):
        """Parameter index of each ZZ term in ``layer``."""
        off = layer * self.slots_per_layer
        if self.mode == STANDARD:
            return np.full(self.n_terms, off, dtype=np.int64)
        return off + np.arange(self.n_terms)

    def beta_slots(self, layer):
        """Parameter index of each X term in ``layer``."""
        off = layer * self.slots_per_layer
        if self.mode == STANDARD:
            return np.full(self.n_qubits, off + 1, dtype=np.int64)
        return off + self.n_terms + np.arange(self.n_qubits)

    def first_gamma_slot(self, layer):
        return int(self.gamma_slots(layer)[0])

    def check(self, params):
        params = np.asarray(params, dtype=np.float64)
        if params.shape != (self.n_params,):
            raise ParameterError(f"expected {self.n_params} parameters, got shape {params.shape}")
        return params

    def with_layers(self, k):
        return CircuitSpec(self.base, self.augmented, k, self.mode, self.ancillas)

    def pad(self, params, k):
        """Parameters for a ``k``-layer copy with the extra layers at zero angle."""
        params = self.check(params)
        if k < self.k:
            raise ParameterError("padding cannot remove layers")
        return np.concatenate([params, np.zeros((k - self.k) * self.slots_per_layer)])

    @cached_property
    def _index(self):
        return np.arange(1 << self.n_qubits, dtype=np.int64)

    @cached_property
    def cut_table(self):
        """``|E'| x 2^n'`` uint8 term-cut indicators, or None when too large."""
        size = self.n_terms << self.n_qubits
        if size > CUT_TABLE_BYTES:
            return None
        idx = self._index
        out = np.empty((self.n_terms, idx.size), dtype=np.uint8)
        for s, (u, v) in enumerate(self.augmented.edge_pairs):
            out[s] = ((idx >> u) ^ (idx >> v)) & 1
        return out

    def term_cut(self, s):
        table = self.cut_table
        if table is not None:
            return table[s]
        u, v = self.augmented.edge_pairs[s]
        idx = self._index
        return (((idx >> u) ^ (idx >> v)) & 1).astype(np.uint8)

    @cached_property
    def cost_diag(self):
        """``sum_s w_s cut_s(x)`` over all terms, the standard-mode phase generator."""
        out = np.zeros(1 << self.n_qubits)
        for s, w in enumerate(self.augmented.weights):
            out += w * self.term_cut(s)
        return out

    def phase_generator(self, params, layer):
        """Diagonal ``sum_s gamma_s w_s cut_s`` for ``layer``."""
        if self.mode == STANDARD:
            return params[layer * 2] * self.cost_diag
        gam = params[self.gamma_slots(layer)] * self.augmented.weights
        table = self.cut_table
        if table is not None:
            return gam @ table
        out = np.zeros(1 << self.n_qubits)
        for s, a in enumerate(gam):
            if a != 0.0:
                out += a * self.term_cut(s)
        return out

    def to_dict(self):
        layers = []
        for l in range(self.k):
            layers.append(
                {
                    "zz": [[u, v, int(s)] for (u, v), s in zip(self.augmented.edge_pairs, self.gamma_slots(l))],
                    "x": [[u, int(s)] for u, s in enumerate(self.beta_slots(l))],
                }
            )
        return {
            "mode": self.mode,
            "k": self.k,
            "n_base": self.base.n,
            "n_qubits": self.n_qubits,
            "ancillas": list(self.ancillas),
            "objective_edges": [[u, v] for u, v in self.base.edge_pairs],
            "layers": layers,
        }


def _check_budget(n):
    cap = qubit_budget()
    if n > cap:
        raise BudgetError(f"{n} qubits exceed the statevector budget of {cap}")


def build_spec(g, k, mode=STANDARD):
    """Plain QAOA on ``g`` with no ancillas."""
    if k < 1:
        raise ParameterError("need at least one layer")
    _check_budget(g.n)
    return CircuitSpec(g, g, int(k), _mode(mode), ())


def _hub(g, component):
    """Maximum-degree vertex of a component, lowest index on ties."""
    deg = g.degrees
    return min(component, key=lambda v: (-deg[v], v))


def build_dqaoa_spec(g, k, mode=MULTI):
    """Ancilla-augmented circuit.

    A disconnected graph, or a path or cycle on at least 4 vertices, gets
    ancilla ``A`` (index ``n``) joined to the hub of every component. A
    disconnected graph on at most 4 vertices also gets ancilla ``B`` joined to
    ``A``. Any other graph is returned unchanged.
    """
    if k < 1:
        raise ParameterError("need at least one layer")
    n = g.n
    disconnected = not g.is_connected()
    edges = list(g.edges)
    ancillas = []
    if disconnected or (g.is_path_or_cycle() and n >= 4):
        a = n
        ancillas.append(a)
        for comp in g.components:
            edges.append((_hub(g, comp), a, 1.0))
        if disconnected and n <= 4:
            ancillas.append(n + 1)
            edges.append((a, n + 1, 1.0))
    aug = Graph(n + len(ancillas), tuple(edges))
    _check_budget(aug.n)
    return CircuitSpec(g, aug, int(k), _mode(mode), tuple(ancillas))


# ---------------------------------------------------------------------------
# Evolution


def plus_state(n):
    return np.full(1 << n, 2.0 ** (-n / 2), dtype=np.complex128)


def apply_x_rotation(psi, n, u, beta):
    """In-place ``exp(-i beta X_u)``."""
    if beta == 0.0:
        return psi
    view = psi.reshape(1 << (n - u - 1), 2, 1 << u)
    c, s = np.cos(beta), -1j * np.sin(beta)
    a0 = view[:, 0, :].copy()
    view[:, 0, :] *= c
    view[:, 0, :] += s * view[:, 1, :]
    view[:, 1, :] *= c
    view[:, 1, :] += s * a0
    return psi


DENSE_MIXER_QUBITS = 8


def mixer_matrix(betas):
    """Dense ``prod_u exp(-i beta_u X_u)``; qubit 0 is the fastest-varying index."""
    out = np.ones((1, 1), dtype=np.complex128)
    for b in betas[::-1]:
        c, s = np.cos(b), -1j * np.sin(b)
        r = np.array([[c, s], [s, c]])
        m = out.shape[0]
        out = (out[:, None, :, None] * r[None, :, None, :]).reshape(2 * m, 2 * m)
    return out


def _apply_mixer(spec, psi, params, layer, sign=1.0):
    betas = sign * params[spec.beta_slots(layer)]
    if spec.n_qubits <= DENSE_MIXER_QUBITS:
        # one small matvec beats a Python loop of strided updates here
        psi[:] = mixer_matrix(betas) @ psi
        return
    for u in range(spec.n_qubits):
        apply_x_rotation(psi, spec.n_qubits, u, betas[u])


def run_circuit(spec, params, psi0=None):
    """Final state ``prod_l U_M(beta_l) U_C(gamma_l) |+>``."""
    params = spec.check(params)
    psi = plus_state(spec.n_qubits) if psi0 is None else np.array(psi0, dtype=np.complex128)
    for l in range(spec.k):
        psi *= np.exp(-1j * spec.phase_generator(params, l))
        _apply_mixer(spec, psi, params, l)
    return psi


def _cut_matrix(n_qubits, g):
    idx = np.arange(1 << n_qubits, dtype=np.int64)
    out = np.empty((g.n_edges, idx.size), dtype=np.uint8)
    for i, (u, v) in enumerate(g.edge_pairs):
        out[i] = ((idx >> u) ^ (idx >> v)) & 1
    return out


def _objective_cuts(spec):
    """Cut indicators of the objective (base) edges."""
    table = spec.cut_table
    if table is not None:
        return table[: spec.base.n_edges]
    return None


def zz_expectations(psi, g, spec=None):
    """``<Z_u Z_v>`` for every edge of ``g``; qubits above ``g.n`` are ignored."""
    probs = np.abs(psi) ** 2
    n_qubits = int(round(np.log2(probs.size)))
    if g.n > n_qubits:
        raise ParameterError("graph has more vertices than the state has qubits")
    cuts = _objective_cuts(spec) if spec is not None else None
    if cuts is None or cuts.shape[0] != g.n_edges:
        if (g.n_edges << n_qubits) <= CUT_TABLE_BYTES:
            cuts = _cut_matrix(n_qubits, g)
        else:
            idx = np.arange(probs.size, dtype=np.int64)
            return np.array([1.0 - 2.0 * probs[((idx >> u) ^ (idx >> v)) & 1 == 1].sum() for u, v in g.edge_pairs])
    return 1.0 - 2.0 * (cuts @ probs)


def edge_probabilities(spec, params):
    """Base-edge cut probabilities ``(1 - <ZZ>) / 2`` of the circuit output."""
    psi = run_circuit(spec, params)
    return (1.0 - zz_expectations(psi, spec.base, spec)) / 2.0


def marginal_probabilities(psi, n_keep):
    """Distribution over the lowest ``n_keep`` qubits (ancillas traced out)."""
    probs = np.abs(psi) ** 2
    return probs.reshape(-1, 1 << n_keep).sum(axis=0)


def sample_bitstrings(psi, shots, seed, n_keep=None):
    """``shots`` i.i.d. measurement outcomes as raw masks.

    Bits at or above ``n_keep`` (ancillas) are dropped. Masks are not
    canonicalized; :func:`faircut.cuts.empirical_distribution` does that.
    """
    if shots < 1:
        raise ParameterError("need at least one shot")
    probs = np.abs(psi) ** 2
    cdf = np.cumsum(probs)
    cdf /= cdf[-1]
    rng = np.random.default_rng(seed)
    out = np.searchsorted(cdf, rng.random(int(shots)), side="right").astype(np.int64)
    out = np.minimum(out, probs.size - 1)
    if n_keep is not None:
        out &= (1 << n_keep) - 1
    return out


# ---------------------------------------------------------------------------
# Reverse-mode gradient


def _gradient_diag(spec, params, obs):
    """Value and gradient of ``<psi(theta)| diag(obs) |psi(theta)>``.

    One forward pass, then a reverse sweep that carries the state and the
    adjoint ``lambda = O psi`` back through every commuting block. ``obs``
    may be a stack of shape ``(m, 2^n)``; the adjoints then travel together
    and the outputs gain a leading axis of length ``m``.
    """
    params = spec.check(params)
    psi = run_circuit(spec, params)
    obs = np.asarray(obs, dtype=np.float64)
    single = obs.ndim == 1
    obs = np.atleast_2d(obs)
    lam = obs * psi[None, :]
    value = np.real(lam @ np.conj(psi))
    grad = np.zeros((obs.shape[0], spec.n_params))
    nq = spec.n_qubits
    w = spec.augmented.weights
    for l in reversed(range(spec.k)):
        # mixer block: d/d beta_u = 2 Im <lam| X_u psi>
        bslots = spec.beta_slots(l)
        for u in range(nq):
            xpsi = psi.reshape(1 << (nq - u - 1), 2, 1 << u)[:, ::-1, :].reshape(-1)
            grad[:, bslots[u]] += 2.0 * np.imag(np.conj(lam) @ xpsi)
        betas = -params[bslots]
        if nq <= DENSE_MIXER_QUBITS:
            m = mixer_matrix(betas)
            psi = m @ psi
            lam = lam @ m.T
        else:
            for u in range(nq):
                apply_x_rotation(psi, nq, u, betas[u])
                for row in lam:
                    apply_x_rotation(row, nq, u, betas[u])
        # phase block: d/d gamma_s = 2 w_s sum_x cut_s(x) Im(conj(lam_x) psi_x)
        r = np.imag(np.conj(lam) * psi[None, :])
        if spec.mode == STANDARD:
            grad[:, 2 * l] += 2.0 * (r @ spec.cost_diag)
        else:
            table = spec.cut_table
            if table is not None:
                gs = r @ table.T
            else:
                gs = np.stack([r @ spec.term_cut(s) for s in range(spec.n_terms)], axis=1)
            grad[:, spec.gamma_slots(l)] += 2.0 * w * gs
        back = np.exp(1j * spec.phase_generator(params, l))
        psi *= back
        lam *= back[None, :]
    if single:
        return float(value[0]), grad[0]
    return value, grad


def objective_diag(spec, edge_weights):
    """Diagonal of ``sum_e a_e Z_u Z_v`` over the base edges."""
    a = np.asarray(edge_weights, dtype=np.float64)
    if a.shape != (spec.base.n_edges,):
        raise ParameterError("edge weight vector does not match the objective edges")
    obs = np.full(1 << spec.n_qubits, a.sum())
    for e, ae in enumerate(a):
        if ae != 0.0:
            obs -= 2.0 * ae * spec.term_cut(e)
    return obs


def gradient_reverse(spec, params, edge_weights):
    """Gradient of ``sum_e a_e <Z_u Z_v>`` with respect to every parameter."""
    a = np.asarray(edge_weights, dtype=np.float64)
    if not np.any(a):
        spec.check(params)
        return np.zeros(spec.n_params)
    return _gradient_diag(spec, params, objective_diag(spec, a))[1]


def gradient_reverse_batch(spec, params, edge_weights):
    """Rows of :func:`gradient_reverse` for a stack ``(m, |E|)`` of weight vectors."""
    a = np.atleast_2d(np.asarray(edge_weights, dtype=np.float64))
    obs = np.stack([objective_diag(spec, row) for row in a])
    return _gradient_diag(spec, params, obs)[1]


# ---------------------------------------------------------------------------
# Closed forms at depth one


def closed_form_k1_kn(n, gamma, beta):
    """``<Z Z>`` on any edge of ``K_n`` after one standard layer."""
    if n < 2:
        raise ParameterError("K_n needs n >= 2")
    d = n - 2
    return (
        -np.sin(4 * beta) * np.sin(gamma) * np.cos(gamma) ** d
        + 0.5 * np.sin(2 * beta) ** 2 * (1.0 - np.cos(2 * gamma) ** d)
    )


def _kn_f(n, gamma):
    d = n - 2
    A = 1.0 - np.cos(2 * gamma) ** d
    B = 16.0 * np.sin(gamma) ** 2 * np.cos(gamma) ** (2 * d)
    return (np.sqrt(A * A + B) - A) / 8.0


def kn_best_beta(n, gamma):
    """Maximizing ``beta`` for given ``gamma`` on ``K_n``."""
    d = n - 2
    S = np.sin(gamma) * np.cos(gamma) ** d
    A = 1.0 - np.cos(2 * gamma) ** d
    return float(np.arctan2(S, A / 4.0) / 4.0)


def _grid_golden(f, lo, hi, points):
    xs = np.linspace(lo, hi, points)
    vals = f(xs)
    i = int(np.argmax(vals))
    if 0 < i < points - 1:
        res = minimize_scalar(lambda x: -f(x), bracket=(xs[i - 1], xs[i], xs[i + 1]), method="golden", tol=1e-12)
        if -res.fun >= vals[i]:
            return float(res.x), float(-res.fun)
    return float(xs[i]), float(vals[i])


def closed_form_k1_kn_opt(n, points=100_000):
    """Best depth-one standard value on ``K_n``.

    Returns ``(value, gamma, beta)`` with ``value = 1/2 + max_gamma f(gamma)``.
    """
    if n < 2:
        raise ParameterError("K_n needs n >= 2")
    if n == 2:
        return 1.0, np.pi / 2, np.pi / 8
    gamma, fmax = _grid_golden(lambda x: _kn_f(n, x), 0.0, np.pi / 2, points)
    return 0.5 + fmax, gamma, kn_best_beta(n, gamma)


def closed_form_k1_triangle_free_regular(delta, gamma, beta):
    """Edge cut probability after one standard layer on a triangle-free ``delta``-regular graph."""
    if delta < 1:
        raise ParameterError("degree must be at least 1")
    return 0.5 + 0.5 * np.sin(4 * beta) * np.sin(gamma) * np.cos(gamma) ** (delta - 1)


def closed_form_k1_triangle_free_regular_opt(delta):
    """Returns ``(value, gamma, beta)``; the optimum sits at ``sin(gamma) = 1/sqrt(delta)``."""
    if delta < 1:
        raise ParameterError("degree must be at least 1")
    gamma = float(np.arcsin(1.0 / np.sqrt(delta)))
    return float(closed_form_k1_triangle_free_regular(delta, gamma, np.pi / 8)), gamma, np.pi / 8
