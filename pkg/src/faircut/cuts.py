"""Cuts as bitmasks and sparse distributions over them.

Bit ``u`` of a mask is set iff ``x_u = -1``. All objectives here are even in
``x``, so routines that produce distributions (solvers, samplers) emit class
representatives with bit 0 cleared. Explicit bitstring distributions are still
representable, which is what :func:`symmetrize_z2` and the Z2-symmetry checks
operate on.
"""

from __future__ import annotations

import itertools
import json
from collections import Counter
from pathlib import Path

import numpy as np

from . import _bits
from .errors import ParameterError

NORMALIZATION_TOL = 1e-12
RENORMALIZE_TOL = 1e-9

canonical = _bits.canonical


def edge_cut_indicator(mask, edge):
    """1 if the cut separates the endpoints of ``edge``, else 0."""
    u, v = edge[0], edge[1]
    return ((int(mask) >> u) ^ (int(mask) >> v)) & 1


class CutDistribution:
    """Finitely supported probability distribution over cuts of ``n`` vertices.

    Parameters
    ----------
    n : int
        Number of vertices.
    support : mapping or iterable of (mask, probability)
        Repeated masks are merged. Totals within 1e-9 of one are renormalized;
        anything further off is rejected.
    """

    __slots__ = ("n", "_p")

    def __init__(self, n, support):
        self.n = int(n)
        items = support.items() if hasattr(support, "items") else support
        acc = {}
        limit = 1 << self.n
        for mask, prob in items:
            mask, prob = int(mask), float(prob)
            if not 0 <= mask < limit:
                raise ParameterError(f"mask {mask:#x} out of range for n={self.n}")
            if prob < 0:
                if prob < -NORMALIZATION_TOL:
                    raise ParameterError(f"negative probability {prob}")
                prob = 0.0
            acc[mask] = acc.get(mask, 0.0) + prob
        acc = {m: p for m, p in acc.items() if p > 0}
        total = sum(acc.values())
        if not acc or abs(total - 1.0) > RENORMALIZE_TOL:
            raise ParameterError(f"probabilities sum to {total}, not 1")
        if abs(total - 1.0) > 0:
            acc = {m: p / total for m, p in acc.items()}
        self._p = dict(sorted(acc.items()))

    @classmethod
    def point_mass(cls, n, mask):
        return cls(n, {mask: 1.0})

    @classmethod
    def from_arrays(cls, n, masks, probs, threshold=0.0):
        masks = np.asarray(masks)
        probs = np.asarray(probs, dtype=np.float64)
        keep = probs > threshold
        return cls(n, zip(masks[keep].tolist(), probs[keep].tolist()))

    @property
    def support(self):
        return dict(self._p)

    @property
    def masks(self):
        return np.fromiter(self._p.keys(), dtype=np.int64, count=len(self._p))

    @property
    def probs(self):
        return np.fromiter(self._p.values(), dtype=np.float64, count=len(self._p))

    def __len__(self):
        return len(self._p)

    def __getitem__(self, mask):
        return self._p.get(int(mask), 0.0)

    def __iter__(self):
        return iter(self._p.items())

    def __repr__(self):
        return f"CutDistribution(n={self.n}, support={len(self._p)})"

    def classes(self):
        """Probability of each Z2 class, keyed by its canonical mask."""
        out = {}
        for mask, prob in self._p.items():
            c = _bits.canonical(mask, self.n)
            out[c] = out.get(c, 0.0) + prob
        return dict(sorted(out.items()))

    def canonicalized(self):
        return CutDistribution(self.n, self.classes())

    def is_z2_symmetric(self, tol=1e-12):
        full = _bits.full_mask(self.n)
        return all(abs(p - self[m ^ full]) <= tol for m, p in self._p.items())

    def edge_probs(self, g):
        return edge_cut_probabilities(self, g)

    def min_edge_prob(self, g):
        return float(edge_cut_probabilities(self, g).min())

    def sample(self, size, rng):
        rng = np.random.default_rng(rng)
        return self.masks[rng.choice(len(self), size=size, p=self.probs)]

    def to_dict(self):
        return {"n": self.n, "support": [{"mask": hex(m), "p": p} for m, p in self._p.items()]}

    @classmethod
    def from_dict(cls, data):
        return cls(int(data["n"]), [(int(s["mask"], 16), s["p"]) for s in data["support"]])


def edge_cut_probabilities(p, g):
    """Per-edge cut probability ``Pr_e = sum_x p(x) Y_ex``, aligned with ``g.edges``."""
    if p.n != g.n:
        raise ParameterError(f"distribution on {p.n} vertices, graph on {g.n}")
    if g.n_edges == 0:
        return np.zeros(0)
    return _bits.cut_indicator(p.masks, g.edge_pairs) @ p.probs


def min_edge_probability(p, g):
    return float(edge_cut_probabilities(p, g).min())


def symmetrize_z2(q):
    """Z2-symmetric distribution with ``p(x) = p(-x) = (q(x) + q(-x)) / 2``."""
    full = _bits.full_mask(q.n)
    out = {}
    for mask, prob in q:
        for m in (mask, mask ^ full):
            out[m] = out.get(m, 0.0) + prob / 2
    return CutDistribution(q.n, out)


def k_subset_distribution(n, k):
    """Uniform distribution over the cuts ``(S, V \\ S)`` with ``|S| = k``."""
    if n > 24:
        raise ParameterError("k-subset enumeration limited to n <= 24")
    if not 1 <= k <= n - 1:
        raise ParameterError(f"need 1 <= k <= n-1, got k={k}, n={n}")
    counts = Counter()
    for subset in itertools.combinations(range(n), k):
        mask = 0
        for v in subset:
            mask |= 1 << v
        counts[_bits.canonical(mask, n)] += 1
    total = sum(counts.values())
    return CutDistribution(n, {m: c / total for m, c in counts.items()})


def empirical_distribution(samples, n):
    """Class frequencies of sampled cuts (support size at most ``len(samples)``)."""
    samples = np.asarray(samples, dtype=np.int64).ravel()
    if samples.size == 0:
        raise ParameterError("empirical distribution needs at least one sample")
    masks, counts = np.unique(_bits.canonical_array(samples, n), return_counts=True)
    return CutDistribution(n, zip(masks.tolist(), (counts / samples.size).tolist()))


def total_variation(p, q):
    """Half the L1 distance between the Z2-class distributions of ``p`` and ``q``."""
    if p.n != q.n:
        raise ParameterError("distributions on different vertex counts")
    a, b = p.classes(), q.classes()
    keys = a.keys() | b.keys()
    return 0.5 * sum(abs(a.get(k, 0.0) - b.get(k, 0.0)) for k in keys)


def load_distribution(path):
    return CutDistribution.from_dict(json.loads(Path(path).read_text()))


def save_distribution(p, path):
    Path(path).write_text(json.dumps(p.to_dict()) + "\n")


def write_mask_lines(masks, path):
    """One hex mask per line, the shot format produced by the simulator."""
    Path(path).write_text("".join(f"{int(m):#x}\n" for m in masks))


def read_mask_lines(path):
    return np.array([int(t, 16) for t in Path(path).read_text().split()], dtype=np.int64)
