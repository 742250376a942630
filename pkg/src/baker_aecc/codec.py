"""Tail-biting multi-branch baker's map code and its exact ML decoder.

Branch ``j`` (0-based here) is seeded with ``(u[j], u[(j + 1) % k])`` and
iterated ``n - 1`` times, so every source symbol is carried by the x-chain
of its own branch and the y-chain of the previous one. A block of ``k``
symbols becomes ``2 k n`` channel symbols.
"""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from .chaos import (
    AffineParams,
    DomainError,
    affine_params,
    affine_table,
    all_sign_sequences,
    iterate_array,
    support_interval,
)

# 2**24 sign combinations is already minutes of work per block
MAX_SIGN_BITS = 24

__all__ = [
    "CodeParams",
    "Codeword",
    "ReceivedCodeword",
    "DecodeResult",
    "encode",
    "combine_systematic",
    "support_interval",
    "objective",
    "closed_form_estimates",
    "ml_decode",
    "grid_oracle_decode",
]


@dataclass(frozen=True)
class CodeParams:
    k: int = 3
    n: int = 2
    systematic_duplicated: bool = True

    def __post_init__(self):
        if self.k < 2:
            raise ValueError(f"need at least 2 branches, got k={self.k}")
        if self.n < 1:
            raise ValueError(f"need at least 1 state per branch, got n={self.n}")
        if not self.systematic_duplicated:
            raise NotImplementedError("only the duplicated-systematic code is implemented")

    @property
    def length(self):
        """Channel symbols per block."""
        return 2 * self.k * self.n

    @property
    def rate(self):
        return self.k / self.length

    @property
    def symbols_per_pixel(self):
        return 2 * self.n


@dataclass
class Codeword:
    """Branch trajectories. ``x`` and ``y`` have shape ``(..., k, n)``."""

    x: np.ndarray
    y: np.ndarray


@dataclass
class ReceivedCodeword:
    """Noisy observations laid out like :class:`Codeword`."""

    rx: np.ndarray
    ry: np.ndarray


@dataclass
class DecodeResult:
    """ML decision. A leading block axis is present when a batch was decoded.

    ``best_signs`` holds the winning sign sequence of every branch,
    shape ``(..., k, n - 1)``; ``objective`` is the residual sum of squares
    against the combined observations.
    """

    estimates: np.ndarray
    best_signs: np.ndarray
    objective: np.ndarray


def _check_shape(r, params):
    if r.rx.shape != r.ry.shape or r.rx.shape[-2:] != (params.k, params.n):
        raise ValueError(
            f"received arrays {r.rx.shape}/{r.ry.shape} do not match k={params.k}, n={params.n}"
        )


def encode(block, params):
    """Encode ``k`` source symbols (or a ``(blocks, k)`` array of them)."""
    u = np.asarray(block, dtype=np.float64)
    if u.shape[-1:] != (params.k,):
        raise ValueError(f"block must have {params.k} symbols, got shape {u.shape}")
    if np.any(np.abs(u) > 1.0) or np.any(np.isnan(u)):
        raise DomainError("source symbols must lie in [-1, 1]")
    x, y = iterate_array(u, np.roll(u, -1, axis=-1), params.n)
    return Codeword(x, y)


def combine_systematic(r, params):
    """Equal-gain combine the two received copies of each source symbol.

    ``u[j]`` is seen at ``rx[j, 0]`` and at ``ry[j - 1, 0]``; both positions
    are replaced by their mean.
    """
    _check_shape(r, params)
    rx = np.array(r.rx, dtype=np.float64)
    ry = np.array(r.ry, dtype=np.float64)
    mean = (rx[..., :, 0] + np.roll(ry[..., :, 0], 1, axis=-1)) / 2.0
    rx[..., :, 0] = mean
    ry[..., :, 0] = np.roll(mean, -1, axis=-1)
    return ReceivedCodeword(rx, ry)


def _params_for(signs, k, n):
    signs = np.asarray(signs).reshape(k, n - 1)
    return [affine_params(s) for s in signs]


def objective(r, u, signs):
    """Residual sum of squares of ``r`` against the affine model for ``signs``.

    ``signs`` is a ``(k, n - 1)`` array; the model is fixed by it, so this is
    a quadratic in ``u`` even where ``u`` leaves the signs' support.
    """
    rx = np.asarray(r.rx, dtype=np.float64)
    ry = np.asarray(r.ry, dtype=np.float64)
    k, n = rx.shape
    u = np.asarray(u, dtype=np.float64)
    aps = _params_for(signs, k, n)
    f = 0.0
    for j in range(k):
        ap = aps[j]
        for i in range(n):
            res = rx[j, i] - ap.a[i] * u[j] - ap.b[i]
            f += res * res
            res = ry[j, i] - ap.c[i] * u[(j + 1) % k] - ap.d[i]
            f += res * res
    return f


def closed_form_estimates(r, signs):
    """Unconstrained least-squares minimizer of :func:`objective` per symbol."""
    rx = np.asarray(r.rx, dtype=np.float64)
    ry = np.asarray(r.ry, dtype=np.float64)
    k, n = rx.shape
    aps = _params_for(signs, k, n)
    out = np.empty(k)
    for j in range(k):
        p, q = aps[j], aps[(j - 1) % k]
        num = 0.0
        den = 0.0
        for i in range(n):
            num += rx[j, i] * p.a[i] + ry[(j - 1) % k, i] * q.c[i] - p.a[i] * p.b[i] - q.c[i] * q.d[i]
            den += p.a[i] * p.a[i] + q.c[i] * q.c[i]
        out[j] = num / den
    return out


@lru_cache(maxsize=None)
def _search_tables(n):
    table = affine_table(n)
    lo = np.empty(table.a.shape[0])
    hi = np.empty_like(lo)
    for m in range(lo.size):
        row = AffineParams(*(t[m] for t in table))
        lo[m], hi[m] = support_interval(row) if n > 1 else (-1.0, 1.0)
    return table, lo, hi, all_sign_sequences(n)


def _combo_signs(combo, params, seqs):
    bits = params.n - 1
    nseq = seqs.shape[0]
    shifts = (params.k - 1 - np.arange(params.k)) * bits
    idx = (np.asarray(combo)[..., None] >> shifts) & (nseq - 1)
    return seqs[idx]


def ml_decode(r, params, backend=None):
    """Exact ML decision by exhaustive sign-sequence search.

    Accepts a single received codeword (``(k, n)`` arrays) or a batch
    (``(blocks, k, n)``). The observations are combined first; every one of
    the ``2**(k (n - 1))`` sign combinations is scored after clamping the
    closed-form estimates into their support intervals. Ties go to the
    lexicographically smallest sign combination.
    """
    _check_shape(r, params)
    if params.k * (params.n - 1) > MAX_SIGN_BITS:
        raise ValueError(
            f"k*(n-1) = {params.k * (params.n - 1)} exceeds the enumeration cap of {MAX_SIGN_BITS}"
        )
    single = r.rx.ndim == 2
    c = combine_systematic(r, params)
    rx = c.rx.reshape(-1, params.k, params.n)
    ry = c.ry.reshape(-1, params.k, params.n)
    table, lo, hi, seqs = _search_tables(params.n)
    est, combo, obj = kernels.decode_blocks(rx, ry, table, lo, hi, backend=backend)
    signs = _combo_signs(combo, params, seqs)
    if single:
        return DecodeResult(est[0], signs[0], obj[0])
    return DecodeResult(est, signs, obj)


def _grid(step):
    if step <= 0:
        raise ValueError("grid step must be positive")
    span = 2.0 / step
    if abs(span - round(span)) < 1e-9:
        return np.linspace(-1.0, 1.0, int(round(span)) + 1)
    return -1.0 + step * np.arange(int(np.floor(span)) + 1)


def grid_oracle_decode(r, params, step):
    """Brute-force decode over the grid ``{-1, -1 + step, ..., 1}**k``.

    Independent of the affine machinery: candidates are scored by iterating
    the map directly. The squared distance splits into ring terms
    ``h_j(u_j, u_{j+1})`` (branch ``j`` sees only its two seeds), so the
    per-branch costs are tabulated over all grid pairs and the ring is
    searched exhaustively with bound-based skipping that never discards a
    candidate that could beat the incumbent.
    """
    _check_shape(r, params)
    if r.rx.ndim != 2:
        raise ValueError("grid oracle decodes one block at a time")
    c = combine_systematic(r, params)
    k, n = params.k, params.n
    g = _grid(step)
    # the x-chain depends on the first seed only; the y-chain on both
    xs, _ = iterate_array(g, g, n)
    _, ys = iterate_array(g[:, None] * np.ones(g.size), np.ones(g.size)[:, None] * g, n)
    tables = []
    for j in range(k):
        cost = ((c.rx[j] - xs) ** 2).sum(-1)[:, None] + ((c.ry[j] - ys) ** 2).sum(-1)
        tables.append(cost)
    best_idx = _ring_search(tables)
    u = g[list(best_idx)]
    cw = encode(u, params)
    f = float(((c.rx - cw.x) ** 2).sum() + ((c.ry - cw.y) ** 2).sum())
    signs = np.where(cw.x[:, :-1] < 0, -1, 1).astype(np.int8)
    return DecodeResult(u, signs, f)


def _ring_search(tables):
    """Minimize ``sum_j T_j[i_j, i_{j+1}]`` over all cyclic index tuples."""
    k = len(tables)
    if k == 2:
        vals = tables[0] + tables[1].T
        return np.unravel_index(int(np.argmin(vals)), vals.shape)
    idx = _coordinate_descent(tables)
    incumbent = _ring_value(tables, idx)
    best = tuple(idx)
    row_min = [t.min(axis=1) for t in tables]
    last_col_min = tables[k - 1].min(axis=0)
    glob = [float(t.min()) for t in tables]
    # tail[m] = sum of global minima of T_m .. T_{k-2}
    tail = [sum(glob[m:k - 1]) for m in range(k + 1)]

    def rec(prefix, acc):
        nonlocal incumbent, best
        d = len(prefix) - 1
        first, last = prefix[0], prefix[-1]
        if d == k - 2:
            vals = acc + tables[k - 2][last, :] + tables[k - 1][:, first]
            pick = int(np.argmin(vals))
            if vals[pick] < incumbent:
                incumbent = float(vals[pick])
                best = tuple(prefix) + (pick,)
            return
        cand = acc + tables[d][last, :]
        bound = cand + row_min[d + 1] + tail[d + 2] + last_col_min[first]
        live = np.flatnonzero(bound < incumbent)
        for nxt in live[np.argsort(bound[live], kind="stable")]:
            if bound[nxt] >= incumbent:
                break
            rec(prefix + [int(nxt)], float(cand[nxt]))

    lb0 = row_min[0] + tail[1] + last_col_min
    live = np.flatnonzero(lb0 < incumbent)
    for first in live[np.argsort(lb0[live], kind="stable")]:
        if lb0[first] >= incumbent:
            break
        rec([int(first)], 0.0)
    return best


def _coordinate_descent(tables, sweeps=5):
    k = len(tables)
    idx = [int(np.argmin(tables[j].min(axis=1))) for j in range(k)]
    for _ in range(sweeps):
        for j in range(k):
            # i_j appears in T_{j-1}[i_{j-1}, i_j] and T_j[i_j, i_{j+1}]
            vals = tables[(j - 1) % k][idx[(j - 1) % k], :] + tables[j][:, idx[(j + 1) % k]]
            idx[j] = int(np.argmin(vals))
    return idx


def _ring_value(tables, idx):
    k = len(tables)
    return float(sum(tables[j][idx[j], idx[(j + 1) % k]] for j in range(k)))
