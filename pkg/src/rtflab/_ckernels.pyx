# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled batched series kernels over table-coded finite fields."""

import numpy as np
cimport numpy as cnp
from cython.parallel cimport prange

ctypedef cnp.int64_t i64


def conv(i64[:, :] A, i64[:, :] B, Py_ssize_t L, i64[:, :] add, i64[:, :] mul):
    cdef Py_ssize_t n = max(A.shape[0], B.shape[0]), La = A.shape[1], Lb = B.shape[1]
    cdef Py_ssize_t r, i, j, jmax, ra, rb
    cdef bint ba = A.shape[0] > 1, bb = B.shape[0] > 1
    cdef i64 a
    out = np.zeros((n, L), dtype=np.int64)
    cdef i64[:, :] C = out
    with nogil:
        for r in prange(n, schedule="static"):
            ra = r if ba else 0
            rb = r if bb else 0
            for i in range(La if La < L else L):
                a = A[ra, i]
                if a == 0:
                    continue
                jmax = L - i
                if Lb < jmax:
                    jmax = Lb
                for j in range(jmax):
                    if B[rb, j] != 0:
                        C[r, i + j] = add[C[r, i + j], mul[a, B[rb, j]]]
    return out


def first_nonzero(i64[:, :] D):
    cdef Py_ssize_t n = D.shape[0], L = D.shape[1], r, i
    out = np.full(n, -1, dtype=np.int64)
    cdef i64[:] idx = out
    with nogil:
        for r in range(n):
            for i in range(L):
                if D[r, i] != 0:
                    idx[r] = i
                    break
    return out


def inv_units(i64[:, :] D, i64[:, :] add, i64[:, :] mul, i64[:] neg, i64[:] inv):
    cdef Py_ssize_t n = D.shape[0], L = D.shape[1], r, k, j
    cdef i64 s, a0i
    out = np.zeros((n, L), dtype=np.int64)
    cdef i64[:, :] R = out
    with nogil:
        for r in prange(n, schedule="static"):
            a0i = inv[D[r, 0]]
            R[r, 0] = a0i
            for k in range(1, L):
                s = 0
                for j in range(1, k + 1):
                    s = add[s, mul[D[r, j], R[r, k - j]]]
                R[r, k] = mul[neg[s], a0i]
    return out
