# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the Monte Carlo estimators."""

import numpy as np


def circular_xcov(const double[::1] a, const double[::1] b, const long[::1] lags):
    """``out[i] = mean_k a[(k + lags[i]) % K] * b[k]``."""
    cdef Py_ssize_t K = a.shape[0], n = lags.shape[0], i, k, s
    cdef double acc
    out = np.empty(n)
    cdef double[::1] o = out
    for i in range(n):
        s = lags[i] % K
        if s < 0:
            s += K
        acc = 0.0
        for k in range(K - s):
            acc += a[k + s] * b[k]
        for k in range(K - s, K):
            acc += a[k + s - K] * b[k]
        o[i] = acc / K
    return out


def circular_xcov2d(const double[:, ::1] a, const double[:, ::1] b,
                    const long[::1] lags1, const long[::1] lags2):
    """2D analogue of :func:`circular_xcov` on a lag grid ``lags1 x lags2``."""
    cdef Py_ssize_t K1 = a.shape[0], K2 = a.shape[1]
    cdef Py_ssize_t n1 = lags1.shape[0], n2 = lags2.shape[0]
    cdef Py_ssize_t i1, i2, k1, k2, s1, s2, r
    cdef double acc
    out = np.empty((n1, n2))
    cdef double[:, ::1] o = out
    for i1 in range(n1):
        s1 = lags1[i1] % K1
        if s1 < 0:
            s1 += K1
        for i2 in range(n2):
            s2 = lags2[i2] % K2
            if s2 < 0:
                s2 += K2
            acc = 0.0
            for k1 in range(K1):
                r = k1 + s1
                if r >= K1:
                    r -= K1
                for k2 in range(K2 - s2):
                    acc += a[r, k2 + s2] * b[k1, k2]
                for k2 in range(K2 - s2, K2):
                    acc += a[r, k2 + s2 - K2] * b[k1, k2]
            o[i1, i2] = acc / (K1 * K2)
    return out
