# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; see ``_pykernels`` for the reference semantics."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def window_bounds(const double[::1] xs, double r):
    cdef Py_ssize_t n = xs.shape[0]
    cdef Py_ssize_t i, hi = 0, lo = 0
    cdef double xi
    out_hi = np.empty(n, dtype=np.int64)
    out_lo = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] vhi = out_hi
    cdef cnp.int64_t[::1] vlo = out_lo
    for i in range(n):
        xi = xs[i]
        if hi < i + 1:
            hi = i + 1
        while hi < n and (xs[hi] - xi) <= r:
            hi += 1
        if lo < hi:
            lo = hi
        while lo < n and not ((xs[lo] - xi) > 0.5 and ((1.0 - xs[lo]) + xi) <= r):
            lo += 1
        vhi[i] = hi
        vlo[i] = lo
    return out_hi, out_lo


def coverage_sweep(const double[::1] starts, const double[::1] ends, cnp.int64_t c0):
    cdef Py_ssize_t n = starts.shape[0]
    cdef Py_ssize_t a = 0, b = 0, m = 0
    cdef cnp.int64_t cov = c0
    cdef double p
    pos = np.empty(2 * n, dtype=np.float64)
    lev = np.empty(2 * n, dtype=np.int64)
    cdef double[::1] vpos = pos
    cdef cnp.int64_t[::1] vlev = lev
    while a < n or b < n:
        # starts first at equal positions, matching the stable argsort fallback
        if b >= n or (a < n and starts[a] <= ends[b]):
            p = starts[a]
            cov += 1
            a += 1
        else:
            p = ends[b]
            cov -= 1
            b += 1
        if m > 0 and vpos[m - 1] == p:
            vlev[m - 1] = cov
        else:
            vpos[m] = p
            vlev[m] = cov
            m += 1
    return pos[:m].copy(), lev[:m].copy()
