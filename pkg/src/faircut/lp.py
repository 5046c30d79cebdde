"""Small dense revised simplex.

Solves ``max c.x  s.t.  A x <= b, x >= 0`` with ``b >= 0``, so the slack basis
is feasible and no phase one is needed. Bland's rule keeps degenerate pivots
(the fair-cover restricted problems are highly degenerate) from cycling. The
basis system is re-solved from scratch at every pivot; at these sizes that is
cheap and avoids the drift of an updated tableau.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, ParameterError


@dataclass
class SimplexResult:
    x: np.ndarray
    duals: np.ndarray
    value: float
    basis: np.ndarray
    iterations: int


def simplex_max(c, A, b, basis=None, tol=1e-10, pivot_tol=1e-9, max_iter=None):
    """Primal revised simplex.

    Parameters
    ----------
    c, A, b : array_like
        Problem data; ``b`` must be non-negative.
    basis : array_like of int, optional
        Warm-start basis over the ``n + m`` columns ``[A | I]``. It must be
        primal feasible; an infeasible or singular basis falls back to slacks.

    Returns
    -------
    SimplexResult
        ``duals`` are the row prices ``y`` with ``A^T y >= c`` at optimality.
    """
    c = np.asarray(c, dtype=np.float64)
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    m, nv = A.shape
    if c.shape != (nv,) or b.shape != (m,):
        raise ParameterError("shape mismatch in simplex inputs")
    if np.any(b < 0):
        raise ParameterError("simplex_max requires b >= 0")
    if max_iter is None:
        max_iter = 50 * (m + nv) + 100

    full = np.hstack([A, np.eye(m)])
    cfull = np.concatenate([c, np.zeros(m)])
    slack = np.arange(nv, nv + m)

    def factor(bs):
        B = full[:, bs]
        xb = np.linalg.solve(B, b)
        return B, xb

    if basis is None:
        basis = slack.copy()
        B, xb = full[:, basis], b.copy()
    else:
        basis = np.asarray(basis, dtype=np.int64).copy()
        try:
            B, xb = factor(basis)
            if xb.min() < -1e-9:
                raise np.linalg.LinAlgError
        except np.linalg.LinAlgError:
            basis = slack.copy()
            B, xb = full[:, basis], b.copy()

    it = 0
    while True:
        y = np.linalg.solve(B.T, cfull[basis])
        reduced = cfull - full.T @ y
        reduced[basis] = 0.0
        candidates = np.flatnonzero(reduced > tol)
        if candidates.size == 0:
            break
        if it >= max_iter:
            raise ConvergenceError("simplex iteration cap reached", iterations=it)
        j = candidates[0]
        u = np.linalg.solve(B, full[:, j])
        rows = np.flatnonzero(u > pivot_tol)
        if rows.size == 0:
            raise ConvergenceError("LP is unbounded", iterations=it)
        ratios = np.clip(xb[rows], 0.0, None) / u[rows]
        rmin = ratios.min()
        ties = rows[ratios <= rmin + 1e-12 * (1.0 + rmin)]
        i = ties[np.argmin(basis[ties])]
        basis[i] = j
        B, xb = factor(basis)
        it += 1

    xb = np.where(np.abs(xb) < 1e-14, 0.0, xb)
    xfull = np.zeros(nv + m)
    xfull[basis] = xb
    x = xfull[:nv]
    return SimplexResult(x=x, duals=y, value=float(c @ x), basis=basis.copy(), iterations=it)
