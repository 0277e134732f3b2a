"""Pure-numpy kernel implementations.

These are the semantics of record: the compiled backend must reproduce
them bit for bit.  Products over factor multisets are taken in sorted
order so results do not depend on how upstream data was indexed.
"""
from __future__ import annotations

import numpy as np

_CODE_ZERO = 0
_CODE_TIMELIKE_FUTURE = 1
_CODE_TIMELIKE_PAST = 2
_CODE_NULL_FUTURE = 3
_CODE_NULL_PAST = 4
_CODE_SPACELIKE = 5


def classify_radius(vectors, tol: float):
    """Causal-class codes and orbit radii for rows of a (n, 4) array.

    A vector is null when its interval is below tol relative to its
    coordinate scale, and zero when additionally its euclidean norm is
    below tol**2 times the scale.
    """
    v = np.ascontiguousarray(vectors, dtype=np.float64)
    if v.ndim != 2 or v.shape[1] != 4:
        raise ValueError("expected an (n, 4) array")
    t = v[:, 0]
    nsq = v[:, 1] * v[:, 1] + v[:, 2] * v[:, 2] + v[:, 3] * v[:, 3]
    s = t * t - nsq
    scale = np.maximum(1.0, t * t + nsq)
    codes = np.empty(v.shape[0], dtype=np.int8)
    radii = np.zeros(v.shape[0], dtype=np.float64)

    lightlike = np.abs(s) <= tol * scale
    zero = lightlike & (t * t + nsq <= (tol * tol) * scale)
    null_f = lightlike & ~zero & (t >= 0.0)
    null_p = lightlike & ~zero & (t < 0.0)
    timelike = ~lightlike & (s > 0.0)
    spacelike = ~lightlike & (s < 0.0)

    codes[zero] = _CODE_ZERO
    codes[null_f] = _CODE_NULL_FUTURE
    codes[null_p] = _CODE_NULL_PAST
    codes[timelike & (t > 0.0)] = _CODE_TIMELIKE_FUTURE
    codes[timelike & (t <= 0.0)] = _CODE_TIMELIKE_PAST
    codes[spacelike] = _CODE_SPACELIKE
    radii[timelike] = np.sqrt(s[timelike])
    radii[spacelike] = np.sqrt(-s[spacelike])
    return codes, radii


def statesum_integrand(
    colors,
    tri_edges,
    face_edges,
    simplex_factor,
    weight_by_color: bool,
    face_mode: int,
    face_n: float,
):
    """Integrand values for a batch of edge colorings.

    colors: (m, n_edges) color per edge for each of m colorings.
    tri_edges: (n_tri, 3) edge indices of each triangle, used for the
        admissibility cut: a triangle is admissible when its largest
        color is at least the sum of the other two.
    face_edges: (n_face, 3) edge indices of each weighted face.
    simplex_factor: (n_simplex,) constant amplitude per 4-simplex.
    weight_by_color: include each edge color itself as a measure factor.
    face_mode: 0 -> no face factor, 1 -> rho**2 + face_n**2 with rho the
        largest color on the face.
    Returns (m,) products over all factors, in sorted factor order, with
    inadmissible colorings mapped to 0.
    """
    c = np.ascontiguousarray(colors, dtype=np.float64)
    if c.ndim != 2:
        raise ValueError("colors must be (m, n_edges)")
    tri = np.ascontiguousarray(tri_edges, dtype=np.int64)
    fac = np.ascontiguousarray(face_edges, dtype=np.int64)
    simp = np.ascontiguousarray(simplex_factor, dtype=np.float64)
    m = c.shape[0]

    admissible = np.ones(m, dtype=bool)
    if tri.size:
        a = c[:, tri[:, 0]]
        b = c[:, tri[:, 1]]
        d = c[:, tri[:, 2]]
        s3 = (a + b) + d
        mx = np.maximum(np.maximum(a, b), d)
        admissible = np.all(2.0 * mx >= s3, axis=1)

    parts = []
    if weight_by_color:
        parts.append(c)
    if face_mode == 1 and fac.size:
        fa = c[:, fac[:, 0]]
        fb = c[:, fac[:, 1]]
        fd = c[:, fac[:, 2]]
        rho = np.maximum(np.maximum(fa, fb), fd)
        parts.append(rho * rho + face_n * face_n)
    if simp.size:
        parts.append(np.broadcast_to(simp, (m, simp.size)))
    if parts:
        factors = np.concatenate(parts, axis=1)
        factors = np.sort(factors, axis=1)
        out = np.multiply.reduce(factors, axis=1)
    else:
        out = np.ones(m, dtype=np.float64)
    out[~admissible] = 0.0
    return out
