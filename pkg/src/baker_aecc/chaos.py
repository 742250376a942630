"""Folded baker's map on the square [-1, 1]^2 and its segment-wise affine form.

The forward map::

    x < 0:  (x, y) -> (2x + 1, (y - 1) / 2)
    x >= 0: (x, y) -> (1 - 2x, (1 - y) / 2)

With ``s = sign(x)`` (and ``sign(0) = +1``) both branches collapse to
``x' = 1 - 2 s x`` and ``y' = 0.5 s (1 - y)``, which is what the affine
recursion below iterates.
"""
from itertools import product
from typing import NamedTuple

import numpy as np


class DomainError(ValueError):
    """A value fell outside the closed interval [-1, 1]."""


class PlanePoint(NamedTuple):
    x: float
    y: float


class AffineParams(NamedTuple):
    """Coefficients with ``x[i] = a[i] x[0] + b[i]`` and ``y[i] = c[i] y[0] + d[i]``."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray


def _check_unit(*values):
    for v in values:
        if not -1.0 <= v <= 1.0:
            raise DomainError(f"coordinate {v!r} outside [-1, 1]")


def sign(x):
    """Sign with ``sign(0) = +1``, matching the branch choice of the forward map."""
    return np.where(np.asarray(x) < 0, -1, 1) if np.ndim(x) else (-1 if x < 0 else 1)


def baker_forward(p):
    x, y = p
    _check_unit(x, y)
    if x < 0:
        return PlanePoint(2.0 * x + 1.0, (y - 1.0) / 2.0)
    return PlanePoint(1.0 - 2.0 * x, (1.0 - y) / 2.0)


def baker_inverse(p, s):
    """Undo one forward step given the sign ``s`` of the preimage's x-coordinate."""
    x, y = p
    _check_unit(x, y)
    if s not in (-1, 1):
        raise ValueError(f"sign must be -1 or +1, got {s!r}")
    return PlanePoint(-0.5 * s * (x - 1.0), -2.0 * s * y + 1.0)


def baker_forward_array(x, y):
    """Elementwise forward map on arrays; no range checking."""
    neg = x < 0
    xn = np.where(neg, 2.0 * x + 1.0, 1.0 - 2.0 * x)
    yn = np.where(neg, (y - 1.0) / 2.0, (1.0 - y) / 2.0)
    return xn, yn


def iterate(seed, n):
    """Return the ``n``-state trajectory starting at ``seed`` as a list of points."""
    if n < 1:
        raise ValueError(f"trajectory length must be >= 1, got {n}")
    p = PlanePoint(*map(float, seed))
    _check_unit(*p)
    states = [p]
    for _ in range(n - 1):
        p = baker_forward(p)
        states.append(p)
    return states


def iterate_array(x0, y0, n):
    """Vectorized trajectories: arrays of shape ``x0.shape + (n,)``."""
    if n < 1:
        raise ValueError(f"trajectory length must be >= 1, got {n}")
    x0 = np.asarray(x0, dtype=np.float64)
    y0 = np.asarray(y0, dtype=np.float64)
    xs = np.empty(x0.shape + (n,))
    ys = np.empty(y0.shape + (n,))
    xs[..., 0] = x0
    ys[..., 0] = y0
    for i in range(1, n):
        xs[..., i], ys[..., i] = baker_forward_array(xs[..., i - 1], ys[..., i - 1])
    return xs, ys


def sign_of_trajectory(trajectory):
    """Signs of the x-coordinates at indices ``0 .. n-2``.

    The last state's sign never enters the decoder, so it is dropped.
    """
    if len(trajectory) < 2:
        raise ValueError("sign sequence needs a trajectory of length >= 2")
    return [sign(p[0]) for p in trajectory[:-1]]


def affine_params(signs):
    s = np.asarray(signs, dtype=np.float64).reshape(-1)
    if np.any((s != 1.0) & (s != -1.0)):
        raise ValueError("sign sequence entries must be -1 or +1")
    n = s.size + 1
    a = np.empty(n)
    b = np.empty(n)
    c = np.empty(n)
    d = np.empty(n)
    a[0], b[0], c[0], d[0] = 1.0, 0.0, 1.0, 0.0
    for i in range(1, n):
        si = s[i - 1]
        a[i] = -2.0 * si * a[i - 1]
        b[i] = 1.0 - 2.0 * si * b[i - 1]
        c[i] = -0.5 * si * c[i - 1]
        # derived from y' = 0.5 s (1 - y)
        d[i] = 0.5 * si * (1.0 - d[i - 1])
    return AffineParams(a, b, c, d)


def all_sign_sequences(n):
    """Every length ``n-1`` sign sequence, lexicographic with -1 < +1.

    Row ``m`` corresponds to the binary expansion of ``m`` (most significant
    bit first, bit 1 meaning +1).
    """
    if n < 2:
        return np.ones((1, 0), dtype=np.int8)
    return np.array(list(product((-1, 1), repeat=n - 1)), dtype=np.int8)


def affine_table(n):
    """Stack ``affine_params`` for all sign sequences: four ``(2**(n-1), n)`` arrays."""
    seqs = all_sign_sequences(n)
    rows = [affine_params(s) for s in seqs]
    return AffineParams(*(np.array([getattr(r, f) for r in rows]) for f in AffineParams._fields))


def support_interval(ap):
    """Seeds consistent with the sign sequence behind ``ap``.

    Follows from requiring ``|a[n-1] u + b[n-1]| <= 1``; the result is also
    intersected with [-1, 1].
    """
    a, b = ap.a[-1], ap.b[-1]
    e1 = (-b + 1.0) / a
    e2 = (-b - 1.0) / a
    return max(min(e1, e2), -1.0), min(max(e1, e2), 1.0)
