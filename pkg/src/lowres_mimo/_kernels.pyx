# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops for the Monte Carlo engine.

Same contract as :mod:`lowres_mimo._kernels_py`; the two are checked against
each other in the test suite.
"""
import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free

cnp.import_array()


def mrc_terms(const double complex[:, :, ::1] A, const double complex[:, :, ::1] B):
    """Per-trial MRC quadratic forms for a batch of (T, M, N) channels.

    Returns ``(norm, interference, quad)`` with shape (T, N):
    ``norm[t, n] = ||a_n||^2``, ``interference[t, n] = sum_{i != n} |a_n^H a_i|^2``
    and ``quad[t, n] = a_n^H diag(B B^H) a_n``.
    """
    cdef Py_ssize_t T = A.shape[0], M = A.shape[1], N = A.shape[2]
    if B.shape[0] != T or B.shape[1] != M or B.shape[2] != N:
        raise ValueError("A and B must have the same shape")

    norm_arr = np.zeros((T, N), dtype=np.float64)
    intf_arr = np.zeros((T, N), dtype=np.float64)
    quad_arr = np.zeros((T, N), dtype=np.float64)
    cdef double[:, ::1] norm = norm_arr
    cdef double[:, ::1] intf = intf_arr
    cdef double[:, ::1] quad = quad_arr

    cdef double *gre = <double *> malloc(N * N * sizeof(double))
    cdef double *gim = <double *> malloc(N * N * sizeof(double))
    cdef double *pw = <double *> malloc(N * sizeof(double))
    if gre == NULL or gim == NULL or pw == NULL:
        free(gre); free(gim); free(pw)
        raise MemoryError()

    cdef Py_ssize_t t, m, n, i
    cdef double ar, ai, br, bi, d, s
    try:
        with nogil:
            for t in range(T):
                for n in range(N * N):
                    gre[n] = 0.0
                    gim[n] = 0.0
                for m in range(M):
                    d = 0.0
                    for n in range(N):
                        br = B[t, m, n].real
                        bi = B[t, m, n].imag
                        d = d + br * br + bi * bi
                    for n in range(N):
                        ar = A[t, m, n].real
                        ai = A[t, m, n].imag
                        pw[n] = ar * ar + ai * ai
                        quad[t, n] += d * pw[n]
                        gre[n * N + n] += pw[n]
                        # upper triangle of conj(a_n) * a_i
                        for i in range(n + 1, N):
                            br = A[t, m, i].real
                            bi = A[t, m, i].imag
                            gre[n * N + i] += ar * br + ai * bi
                            gim[n * N + i] += ar * bi - ai * br
                for n in range(N):
                    norm[t, n] = gre[n * N + n]
                    s = 0.0
                    for i in range(N):
                        if i == n:
                            continue
                        if i > n:
                            s = s + gre[n * N + i] * gre[n * N + i] + gim[n * N + i] * gim[n * N + i]
                        else:
                            s = s + gre[i * N + n] * gre[i * N + n] + gim[i * N + n] * gim[i * N + n]
                    intf[t, n] = s
    finally:
        free(gre)
        free(gim)
        free(pw)
    return norm_arr, intf_arr, quad_arr


def quantize_real(x, const double[::1] thresholds, const double[::1] levels):
    """Map each real sample to the level of the cell it falls in (binary search)."""
    src = np.ascontiguousarray(x, dtype=np.float64)
    out_arr = np.empty_like(src)
    cdef const double[::1] xs = src.reshape(-1)
    cdef double[::1] out = out_arr.reshape(-1)
    cdef Py_ssize_t L = thresholds.shape[0]
    cdef Py_ssize_t k, lo, hi, mid
    cdef double v
    if levels.shape[0] != L + 1:
        raise ValueError("need len(levels) == len(thresholds) + 1")
    with nogil:
        for k in range(xs.shape[0]):
            v = xs[k]
            lo = 0
            hi = L
            # first threshold >= v, matching numpy.searchsorted(side="left")
            while lo < hi:
                mid = (lo + hi) >> 1
                if thresholds[mid] < v:
                    lo = mid + 1
                else:
                    hi = mid
            out[k] = levels[lo]
    return out_arr
