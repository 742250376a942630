"""Batch maximum-likelihood decoding kernels.

Both paths enumerate every sign combination in lexicographic order, form the
closed-form least-squares estimate per source symbol, clamp it to the support
interval of its x-chain, score the clamped candidate and keep the first
strict minimum. The numpy path performs the same floating point operations
in the same order as the compiled loop, so the two agree bit for bit.
"""
import numpy as np

from ._accel import HAVE_NUMBA, USE_NUMBA, njit, prange

# elements per (blocks x combos) slab in the numpy path
_SLAB = 1 << 20


@njit(cache=True, parallel=True)
def _decode_numba(rx, ry, ta, tb, tc, td, lo, hi):
    nblk, k, n = rx.shape
    nseq = ta.shape[0]
    bits = n - 1
    ncombo = nseq**k
    est = np.empty((nblk, k))
    best = np.empty(nblk, dtype=np.int64)
    obj = np.empty(nblk)
    for blk in prange(nblk):
        m = np.empty(k, dtype=np.int64)
        u = np.empty(k)
        best_obj = np.inf
        best_idx = 0
        best_u = np.zeros(k)
        for combo in range(ncombo):
            for j in range(k):
                m[j] = (combo >> ((k - 1 - j) * bits)) & (nseq - 1)
            for j in range(k):
                jp = (j - 1) % k
                mj = m[j]
                mp = m[jp]
                num = 0.0
                den = 0.0
                for i in range(n):
                    num += (
                        rx[blk, j, i] * ta[mj, i]
                        + ry[blk, jp, i] * tc[mp, i]
                        - ta[mj, i] * tb[mj, i]
                        - tc[mp, i] * td[mp, i]
                    )
                    den += ta[mj, i] * ta[mj, i] + tc[mp, i] * tc[mp, i]
                v = num / den
                if v < lo[mj]:
                    v = lo[mj]
                elif v > hi[mj]:
                    v = hi[mj]
                u[j] = v
            f = 0.0
            for j in range(k):
                jn = (j + 1) % k
                mj = m[j]
                for i in range(n):
                    r = rx[blk, j, i] - ta[mj, i] * u[j] - tb[mj, i]
                    f += r * r
                    r = ry[blk, j, i] - tc[mj, i] * u[jn] - td[mj, i]
                    f += r * r
            if f < best_obj:
                best_obj = f
                best_idx = combo
                for j in range(k):
                    best_u[j] = u[j]
        for j in range(k):
            est[blk, j] = best_u[j]
        best[blk] = best_idx
        obj[blk] = best_obj
    return est, best, obj


def _decode_slab(rx, ry, ta, tb, tc, td, lo, hi, combos):
    nblk, k, n = rx.shape
    bits = n - 1
    nseq = ta.shape[0]
    m = [(combos >> ((k - 1 - j) * bits)) & (nseq - 1) for j in range(k)]
    u = []
    for j in range(k):
        jp = (j - 1) % k
        mj, mp = m[j], m[jp]
        num = np.zeros((nblk, combos.size))
        den = np.zeros(combos.size)
        for i in range(n):
            a, b = ta[mj, i], tb[mj, i]
            c, d = tc[mp, i], td[mp, i]
            num += rx[:, j, i, None] * a + ry[:, jp, i, None] * c - a * b - c * d
            den += a * a + c * c
        v = num / den
        v = np.where(v < lo[mj], lo[mj], np.where(v > hi[mj], hi[mj], v))
        u.append(v)
    f = np.zeros((nblk, combos.size))
    for j in range(k):
        jn = (j + 1) % k
        mj = m[j]
        for i in range(n):
            r = rx[:, j, i, None] - ta[mj, i] * u[j] - tb[mj, i]
            f += r * r
            r = ry[:, j, i, None] - tc[mj, i] * u[jn] - td[mj, i]
            f += r * r
    return np.stack(u, axis=-1), f


def _decode_numpy(rx, ry, ta, tb, tc, td, lo, hi):
    nblk, k, n = rx.shape
    ncombo = ta.shape[0] ** k
    est = np.empty((nblk, k))
    best = np.empty(nblk, dtype=np.int64)
    obj = np.empty(nblk)
    cstep = max(1, min(ncombo, _SLAB // max(nblk, 1)))
    bstep = max(1, _SLAB // cstep)
    for b0 in range(0, nblk, bstep):
        sl = slice(b0, min(b0 + bstep, nblk))
        nb = sl.stop - sl.start
        best_obj = np.full(nb, np.inf)
        best_idx = np.zeros(nb, dtype=np.int64)
        best_u = np.zeros((nb, k))
        rows = np.arange(nb)
        for c0 in range(0, ncombo, cstep):
            combos = np.arange(c0, min(c0 + cstep, ncombo), dtype=np.int64)
            u, f = _decode_slab(rx[sl], ry[sl], ta, tb, tc, td, lo, hi, combos)
            pick = np.argmin(f, axis=1)
            fmin = f[rows, pick]
            better = fmin < best_obj
            best_obj = np.where(better, fmin, best_obj)
            best_idx = np.where(better, combos[pick], best_idx)
            best_u = np.where(better[:, None], u[rows, pick], best_u)
        est[sl] = best_u
        best[sl] = best_idx
        obj[sl] = best_obj
    return est, best, obj


def decode_blocks(rx, ry, table, lo, hi, backend=None):
    """Run the ML search on combined observations of shape ``(blocks, k, n)``.

    Returns ``(estimates, combo_index, objective)``. ``backend`` overrides the
    environment-selected implementation (``"numba"`` or ``"numpy"``).
    """
    if backend is None:
        backend = "numba" if USE_NUMBA else "numpy"
    args = (
        np.ascontiguousarray(rx, dtype=np.float64),
        np.ascontiguousarray(ry, dtype=np.float64),
        *(np.ascontiguousarray(t, dtype=np.float64) for t in table),
        np.ascontiguousarray(lo, dtype=np.float64),
        np.ascontiguousarray(hi, dtype=np.float64),
    )
    if backend == "numba":
        if not HAVE_NUMBA:  # pragma: no cover
            raise RuntimeError("numba backend requested but numba is unavailable")
        return _decode_numba(*args)
    if backend == "numpy":
        return _decode_numpy(*args)
    raise ValueError(f"unknown backend {backend!r}")
