# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; must match _reference bit for bit."""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt, fabs

cnp.import_array()

cdef int _CODE_ZERO = 0
cdef int _CODE_TIMELIKE_FUTURE = 1
cdef int _CODE_TIMELIKE_PAST = 2
cdef int _CODE_NULL_FUTURE = 3
cdef int _CODE_NULL_PAST = 4
cdef int _CODE_SPACELIKE = 5


def classify_radius(vectors, double tol):
    v_arr = np.ascontiguousarray(vectors, dtype=np.float64)
    if v_arr.ndim != 2 or v_arr.shape[1] != 4:
        raise ValueError("expected an (n, 4) array")
    cdef double[:, ::1] v = v_arr
    cdef Py_ssize_t n = v.shape[0], i
    codes_arr = np.empty(n, dtype=np.int8)
    radii_arr = np.zeros(n, dtype=np.float64)
    cdef signed char[::1] codes = codes_arr
    cdef double[::1] radii = radii_arr
    cdef double t, nsq, s, scale
    for i in range(n):
        t = v[i, 0]
        nsq = v[i, 1] * v[i, 1] + v[i, 2] * v[i, 2] + v[i, 3] * v[i, 3]
        s = t * t - nsq
        scale = t * t + nsq
        if scale < 1.0:
            scale = 1.0
        if fabs(s) <= tol * scale:
            if t * t + nsq <= (tol * tol) * scale:
                codes[i] = _CODE_ZERO
            elif t >= 0.0:
                codes[i] = _CODE_NULL_FUTURE
            else:
                codes[i] = _CODE_NULL_PAST
        elif s > 0.0:
            codes[i] = _CODE_TIMELIKE_FUTURE if t > 0.0 else _CODE_TIMELIKE_PAST
            radii[i] = sqrt(s)
        else:
            codes[i] = _CODE_SPACELIKE
            radii[i] = sqrt(-s)
    return codes_arr, radii_arr


cdef void _insertion_sort(double* x, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double key
    for i in range(1, n):
        key = x[i]
        j = i - 1
        while j >= 0 and x[j] > key:
            x[j + 1] = x[j]
            j -= 1
        x[j + 1] = key


def statesum_integrand(
    colors,
    tri_edges,
    face_edges,
    simplex_factor,
    bint weight_by_color,
    int face_mode,
    double face_n,
):
    c_arr = np.ascontiguousarray(colors, dtype=np.float64)
    if c_arr.ndim != 2:
        raise ValueError("colors must be (m, n_edges)")
    tri_arr = np.ascontiguousarray(tri_edges, dtype=np.int64)
    fac_arr = np.ascontiguousarray(face_edges, dtype=np.int64)
    simp_arr = np.ascontiguousarray(simplex_factor, dtype=np.float64)
    cdef double[:, ::1] c = c_arr
    cdef long long[:, ::1] tri = tri_arr.reshape(-1, 3) if tri_arr.size else np.empty((0, 3), np.int64)
    cdef long long[:, ::1] fac = fac_arr.reshape(-1, 3) if fac_arr.size else np.empty((0, 3), np.int64)
    cdef double[::1] simp = simp_arr
    cdef Py_ssize_t m = c.shape[0], ne = c.shape[1]
    cdef Py_ssize_t nt = tri.shape[0], nf = fac.shape[0], ns = simp.shape[0]
    cdef Py_ssize_t nfac = (ne if weight_by_color else 0) + (nf if face_mode == 1 else 0) + ns
    out_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] out = out_arr
    buf_arr = np.empty(max(nfac, 1), dtype=np.float64)
    cdef double[::1] buf = buf_arr
    cdef Py_ssize_t i, k, pos
    cdef double a, b, d, s3, mx, rho, prod
    cdef bint ok
    for i in range(m):
        ok = True
        for k in range(nt):
            a = c[i, tri[k, 0]]
            b = c[i, tri[k, 1]]
            d = c[i, tri[k, 2]]
            s3 = (a + b) + d
            mx = a
            if b > mx:
                mx = b
            if d > mx:
                mx = d
            if 2.0 * mx < s3:
                ok = False
                break
        if not ok:
            out[i] = 0.0
            continue
        pos = 0
        if weight_by_color:
            for k in range(ne):
                buf[pos] = c[i, k]
                pos += 1
        if face_mode == 1:
            for k in range(nf):
                a = c[i, fac[k, 0]]
                b = c[i, fac[k, 1]]
                d = c[i, fac[k, 2]]
                rho = a
                if b > rho:
                    rho = b
                if d > rho:
                    rho = d
                buf[pos] = rho * rho + face_n * face_n
                pos += 1
        for k in range(ns):
            buf[pos] = simp[k]
            pos += 1
        _insertion_sort(&buf[0], pos)
        prod = 1.0
        for k in range(pos):
            prod *= buf[k]
        out[i] = prod
    return out_arr
