# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled pair-counting and ranking kernels (int64 inputs)."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

ctypedef cnp.int64_t i64


def count_pairs_brute(a, b):
    cdef const i64[::1] xa = np.ascontiguousarray(a, dtype=np.int64)
    cdef const i64[::1] xb = np.ascontiguousarray(b, dtype=np.int64)
    cdef Py_ssize_t i, j, na = xa.shape[0], nb = xb.shape[0]
    cdef long long wins = 0, ties = 0, losses = 0
    cdef i64 x, y
    with nogil:
        for i in range(na):
            x = xa[i]
            for j in range(nb):
                y = xb[j]
                if x > y:
                    wins += 1
                elif x == y:
                    ties += 1
                else:
                    losses += 1
    return int(wins), int(ties), int(losses)


def count_pairs_merge(a, b):
    cdef cnp.ndarray[i64, ndim=1] sa = np.sort(np.asarray(a, dtype=np.int64))
    cdef cnp.ndarray[i64, ndim=1] sb = np.sort(np.asarray(b, dtype=np.int64))
    cdef const i64[::1] xa = sa
    cdef const i64[::1] xb = sb
    cdef Py_ssize_t na = xa.shape[0], nb = xb.shape[0]
    cdef Py_ssize_t i = 0, lo = 0, hi = 0
    cdef long long wins = 0, ties = 0
    cdef i64 x
    with nogil:
        while i < na:
            x = xa[i]
            while lo < nb and xb[lo] < x:
                lo += 1
            if hi < lo:
                hi = lo
            while hi < nb and xb[hi] == x:
                hi += 1
            wins += lo
            ties += hi - lo
            i += 1
    return int(wins), int(ties), int(na) * int(nb) - int(wins) - int(ties)


def midranks2(values):
    cdef cnp.ndarray[i64, ndim=1] v = np.asarray(values, dtype=np.int64)
    cdef cnp.ndarray[cnp.intp_t, ndim=1] order = np.argsort(v, kind="stable")
    cdef cnp.ndarray[i64, ndim=1] out = np.empty(v.shape[0], dtype=np.int64)
    cdef const i64[::1] xv = v
    cdef const cnp.intp_t[::1] xo = order
    cdef i64[::1] xr = out
    cdef Py_ssize_t n = xv.shape[0], i = 0, j, k
    cdef i64 r2, cur
    with nogil:
        while i < n:
            j = i + 1
            cur = xv[xo[i]]
            while j < n and xv[xo[j]] == cur:
                j += 1
            r2 = i + j + 1
            for k in range(i, j):
                xr[xo[k]] = r2
            i = j
    return out.tolist()
