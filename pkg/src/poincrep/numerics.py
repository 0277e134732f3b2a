"""Tolerance policy and small numerical utilities shared across modules."""
from __future__ import annotations

import math
from typing import Iterable

import numpy as np

# Group-membership checks (orthogonality defects, unit determinants, chart
# transition residuals) are held to a tighter tolerance than generic
# floating-point equality of computed quantities.
TAU_GROUP = 1e-9
TAU_NUM = 1e-8


def close(a: float, b: float, tol: float = TAU_NUM) -> bool:
    """Relative comparison with an absolute floor of 1."""
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def allclose(a, b, tol: float = TAU_NUM) -> bool:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    scale = max(1.0, float(np.max(np.abs(a), initial=0.0)), float(np.max(np.abs(b), initial=0.0)))
    return float(np.max(np.abs(a - b), initial=0.0)) <= tol * scale


def exact_sum(values: Iterable[float]) -> float:
    """Exactly rounded sum; the result does not depend on summand order."""
    return math.fsum(values)


def sorted_product(values: Iterable[float]) -> float:
    """Product of the values taken in sorted order.

    Multiplying in a canonical order makes the result a function of the
    multiset of factors alone, so reindexing upstream data cannot change
    the last bit.
    """
    out = 1.0
    for v in sorted(values):
        out *= v
    return out


def empirical_dimension(points: np.ndarray, k: int = 12, rel_threshold: float = 0.25) -> int:
    """Estimate the local dimension of a sampled manifold.

    Runs a principal-component analysis on the k nearest neighbours of a
    spread of base points and counts singular values above a relative
    threshold; the median count over base points is returned.  A cloud of
    (numerically) coincident points has dimension 0.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2:
        raise ValueError("points must be a 2-d array of row vectors")
    n = pts.shape[0]
    if n == 0:
        raise ValueError("cannot estimate the dimension of an empty set")
    if n == 1:
        return 0
    k = min(k, n - 1)
    d2 = ((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=-1)
    ranks = []
    step = max(1, n // 64)
    scale = max(1.0, float(np.max(np.abs(pts))))
    for i in range(0, n, step):
        idx = np.argsort(d2[i])[1 : k + 1]
        nb = pts[idx] - pts[idx].mean(axis=0)
        s = np.linalg.svd(nb, compute_uv=False)
        if s.size == 0 or s[0] <= 1e-9 * scale:
            ranks.append(0)
        else:
            ranks.append(int(np.sum(s >= rel_threshold * s[0])))
    return int(np.median(ranks))


def nullspace_dimension(a: np.ndarray, rtol: float = 1e-6) -> int:
    """Number of singular values of `a` below rtol times the largest."""
    a = np.asarray(a, dtype=float)
    if a.size == 0:
        return a.shape[1] if a.ndim == 2 else 0
    s = np.linalg.svd(a, compute_uv=False)
    if s[0] == 0.0:
        return a.shape[1]
    small = int(np.sum(s <= rtol * s[0]))
    return small + max(0, a.shape[1] - s.size)
