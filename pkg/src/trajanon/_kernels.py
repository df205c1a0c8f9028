"""Numba-compiled inner loops for alignment-loss computations.

Everything here works on heap-numbered node ids packed into int64 arrays.
``align.py`` falls back to pure-Python equivalents when numba is missing,
so these kernels must stay behaviourally identical to those.
"""

import numpy as np
from numba import njit


@njit(cache=True, inline="always")
def _bit_length(x):
    n = 0
    while x > 0:
        x >>= 1
        n += 1
    return n


@njit(cache=True, inline="always")
def _pair_loss(a, b):
    # depth(a) + depth(b) - 2 * depth(lca(a, b)), all in bits
    da = _bit_length(a)
    db = _bit_length(b)
    if da > db:
        x = a >> (da - db)
        y = b
    elif db > da:
        x = b >> (db - da)
        y = a
    else:
        x = a
        y = b
    s = _bit_length(x ^ y)
    dm = da if da < db else db
    return da + db - 2 * dm + 2 * s


@njit(cache=True)
def dp_loss(px, py, qx, qy, hx, hy):
    """Minimum alignment loss between node sequences (px,py) and (qx,qy)."""
    m = px.shape[0]
    n = qx.shape[0]
    sup = hx + hy
    prev = np.empty(n + 1, np.int64)
    cur = np.empty(n + 1, np.int64)
    for j in range(n + 1):
        prev[j] = j * sup
    for i in range(1, m + 1):
        cur[0] = i * sup
        a = px[i - 1]
        b = py[i - 1]
        for j in range(1, n + 1):
            best = prev[j - 1] + _pair_loss(a, qx[j - 1]) + _pair_loss(b, qy[j - 1])
            up = prev[j] + sup
            if up < best:
                best = up
            left = cur[j - 1] + sup
            if left < best:
                best = left
            cur[j] = best
        prev, cur = cur, prev
    return prev[n]


@njit(cache=True)
def fill_condensed(xs, ys, lens, hx, hy):
    """All pairwise alignment losses over padded trajectory arrays.

    ``xs``/``ys`` are (n, max_len) int64 arrays of node ids, ``lens`` the
    actual lengths.  Returns the condensed upper triangle, pair (i, j),
    i < j, at the usual condensed index.
    """
    n = lens.shape[0]
    out = np.empty(n * (n - 1) // 2, np.float64)
    idx = 0
    for i in range(n):
        for j in range(i + 1, n):
            out[idx] = dp_loss(
                xs[i, : lens[i]], ys[i, : lens[i]],
                xs[j, : lens[j]], ys[j, : lens[j]],
                hx, hy,
            )
            idx += 1
    return out
