"""Gaussian hyperplane rounding of vector embeddings."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _bits
from .cuts import CutDistribution, empirical_distribution
from .errors import ParameterError
from .sdp import Embedding

SAMPLE_CHUNK = 1 << 16
CLAMP_TOL = 1e-12


@dataclass
class RoundingRun:
    embedding: Embedding
    n_samples: int
    seed: int
    empirical: CutDistribution
    empirical_probs: np.ndarray | None
    samples: np.ndarray

    def to_dict(self):
        out = self.empirical.to_dict()
        out.update({"T": self.n_samples, "seed": self.seed})
        if self.empirical_probs is not None:
            out["edge_probs"] = self.empirical_probs.tolist()
        return out


def _round_chunk(V, count, seed_seq):
    rng = np.random.default_rng(seed_seq)
    gauss = rng.standard_normal((count, V.shape[1]))
    # bit u set iff <g, v_u> < 0; exact zeros map to +1
    neg = (gauss @ V.T) < 0
    weights = np.left_shift(np.int64(1), np.arange(V.shape[0], dtype=np.int64))
    return neg.astype(np.int64) @ weights


def sample_hyperplane_cuts(emb, T, seed, jobs=1):
    """``T`` raw cut masks, one per Gaussian direction.

    Chunk ``i`` of 65536 samples draws from the ``i``-th child of
    ``SeedSequence(seed)``, so the output does not depend on ``jobs``.
    """
    if T < 1:
        raise ParameterError("need at least one sample")
    if emb.n > 62:
        raise ParameterError("masks limited to 62 vertices")
    sizes = [min(SAMPLE_CHUNK, T - s) for s in range(0, T, SAMPLE_CHUNK)]
    children = np.random.SeedSequence(seed).spawn(len(sizes))
    V = emb.vectors
    if jobs > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(jobs) as pool:
            parts = list(pool.map(lambda a: _round_chunk(V, *a), zip(sizes, children)))
    else:
        parts = [_round_chunk(V, c, s) for c, s in zip(sizes, children)]
    return np.concatenate(parts)


def round_hyperplane(emb, T, seed, g=None, jobs=1):
    """Round ``emb`` with ``T`` independent hyperplanes.

    With a graph the per-edge empirical cut frequencies are included.
    """
    masks = sample_hyperplane_cuts(emb, T, seed, jobs)
    probs = None
    if g is not None:
        if g.n != emb.n:
            raise ParameterError("embedding and graph sizes differ")
        probs = _bits.cut_indicator(masks, g.edge_pairs).mean(axis=1) if g.n_edges else np.zeros(0)
    return RoundingRun(
        embedding=emb,
        n_samples=int(T),
        seed=seed,
        empirical=empirical_distribution(masks, emb.n),
        empirical_probs=probs,
        samples=masks,
    )


def hr_probability(inner):
    """``arccos(inner) / pi`` with clamping of round-off within 1e-12."""
    inner = np.asarray(inner, dtype=np.float64)
    if np.any(np.abs(inner) > 1.0 + CLAMP_TOL):
        raise ParameterError("inner product outside [-1, 1]")
    out = np.arccos(np.clip(inner, -1.0, 1.0)) / np.pi
    return float(out) if out.ndim == 0 else out


def rounding_probability_exact(emb, e):
    """Probability that a random hyperplane separates the endpoints of ``e``."""
    u, v = int(e[0]), int(e[1])
    return hr_probability(emb.vectors[u] @ emb.vectors[v])


@dataclass
class HrGapReport:
    n: int
    optimum: float
    hr_ceiling: float

    @property
    def gap(self):
        return self.optimum - self.hr_ceiling


def kn_fair_value(n):
    """``eta_bar(K_n)``: ``n/(2(n-1))`` for even ``n``, ``(n+1)/(2n)`` for odd."""
    if n < 2:
        raise ParameterError("K_n needs n >= 2")
    return n / (2 * (n - 1)) if n % 2 == 0 else (n + 1) / (2 * n)


def kn_hr_value(n):
    return float(np.arccos(1.0 / (1 - n)) / np.pi)


def demonstrate_hr_gap(n):
    """Best fair distribution on ``K_n`` against the best any embedding can round to.

    For ``n >= 4`` the optimum is strictly larger, so no hyperplane-rounding
    distribution is optimal. At ``n = 3`` both equal 2/3 and the call is rejected.
    """
    if n < 4:
        raise ParameterError("the rounding gap on K_n needs n >= 4 (equality at n = 3)")
    rep = HrGapReport(n=n, optimum=kn_fair_value(n), hr_ceiling=kn_hr_value(n))
    assert rep.gap > 0, rep
    return rep
