"""Bitmask helpers shared by the enumeration-based routines.

A cut on ``n`` vertices is an integer mask with bit ``u`` set iff ``x_u = -1``.
The Z2 class representative has bit 0 cleared.
"""

import numpy as np

CHUNK = 1 << 18


def full_mask(n):
    return (1 << n) - 1


def canonical(mask, n):
    """Representative of the ``{x, -x}`` class (bit 0 cleared)."""
    mask = int(mask)
    return mask ^ full_mask(n) if mask & 1 else mask


def canonical_array(masks, n):
    masks = np.asarray(masks, dtype=np.int64)
    flip = (masks & 1).astype(bool)
    out = masks.copy()
    out[flip] ^= full_mask(n)
    return out


def class_masks(n, start=0, stop=None):
    """Canonical masks ``2*i`` for ``i`` in ``[start, stop)`` out of ``2**(n-1)``."""
    total = 1 << max(n - 1, 0)
    stop = total if stop is None else min(stop, total)
    return np.arange(start, stop, dtype=np.int64) << 1


def cut_indicator(masks, edges_uv):
    """Matrix ``Y[e, j] = 1[bit u != bit v]`` for mask ``j`` and edge ``e``."""
    masks = np.asarray(masks, dtype=np.int64)
    Y = np.empty((len(edges_uv), masks.size), dtype=np.uint8)
    for i, (u, v) in enumerate(edges_uv):
        Y[i] = ((masks >> u) ^ (masks >> v)) & 1
    return Y


def cut_weights(masks, edges_uv, weights):
    """Weighted cut value of every mask."""
    masks = np.asarray(masks, dtype=np.int64)
    val = np.zeros(masks.size, dtype=np.float64)
    for (u, v), w in zip(edges_uv, weights):
        val += w * (((masks >> u) ^ (masks >> v)) & 1)
    return val


def _bit_table(count, width, offset=0):
    idx = np.arange(count, dtype=np.int64)
    return ((idx[:, None] >> np.arange(width)) & 1).astype(np.float64), idx << offset


def max_cut_blocks(n, edges_uv, weights, block=1 << 22):
    """Maximum weighted cut over canonical masks.

    Vertices split into a low half ``L`` (bit 0 pinned to 0) and a high half
    ``H``. Cross edges contribute ``b_u + b_v - 2 b_u b_v``, so the whole
    value table for a block of high masks is one matrix product.

    Returns ``(value, mask)`` with the smallest mask among exact maximizers.
    """
    if n <= 1:
        return 0.0, 0
    h = max(1, (n + 1) // 2)
    nh = n - h
    # low masks have bit 0 cleared, i.e. 2*i for i < 2**(h-1)
    bl_all, _ = _bit_table(1 << h, h)
    low_idx = np.arange(0, 1 << h, 2, dtype=np.int64)
    bl = bl_all[low_idx]
    bh, high_masks = _bit_table(1 << nh, nh, offset=h)

    vl = np.zeros(low_idx.size)
    vh = np.zeros(high_masks.size)
    a = np.zeros(h)
    c = np.zeros(nh)
    Q = np.zeros((h, nh))
    for (u, v), w in zip(edges_uv, weights):
        if v < h:
            vl += w * np.abs(bl[:, u] - bl[:, v])
        elif u >= h:
            vh += w * np.abs(bh[:, u - h] - bh[:, v - h])
        else:
            a[u] += w
            c[v - h] += w
            Q[u, v - h] += w
    row = vl + bl @ a
    BLQ = -2.0 * (bl @ Q)
    colterm = vh + bh @ c

    best_val, best_mask = -np.inf, 0
    step = max(1, block // max(1, low_idx.size))
    for s in range(0, high_masks.size, step):
        vals = row[:, None] + colterm[None, s : s + step] + BLQ @ bh[s : s + step].T
        vmax = vals.max()
        if vmax > best_val + 1e-12:
            li, hi = np.nonzero(vals >= vmax - 1e-12)
            masks = low_idx[li] | high_masks[s + hi]
            best_val, best_mask = float(vmax), int(masks.min())
    return best_val, best_mask
