"""Numpy implementations of the batched series kernels."""

import numpy as np


def conv(A, B, L, add, mul):
    """Truncated product of digit rows: C[r, k] = sum_{i+j=k} A[r, i] B[r, j], k < L.

    A one-row operand is broadcast against the other.
    """
    n = max(A.shape[0], B.shape[0])
    C = np.zeros((n, L), dtype=np.int64)
    La, Lb = A.shape[1], B.shape[1]
    for i in range(min(La, L)):
        a = A[:, i]
        if A.shape[0] < n:
            a = np.broadcast_to(a, (n,))
        if not a.any():
            continue
        for j in range(min(Lb, L - i)):
            C[:, i + j] = add[C[:, i + j], mul[a, B[:, j]]]
    return C


def first_nonzero(D):
    """Index of the first nonzero digit per row, -1 for an all-zero row."""
    nz = D != 0
    idx = nz.argmax(axis=1)
    idx[~nz.any(axis=1)] = -1
    return idx.astype(np.int64)


def inv_units(D, add, mul, neg, inv):
    """Row-wise inverse of unit series (D[:, 0] != 0) to the same length."""
    n, L = D.shape
    R = np.zeros((n, L), dtype=np.int64)
    a0i = inv[D[:, 0]]
    R[:, 0] = a0i
    for k in range(1, L):
        s = np.zeros(n, dtype=np.int64)
        for j in range(1, k + 1):
            s = add[s, mul[D[:, j], R[:, k - j]]]
        R[:, k] = mul[neg[s], a0i]
    return R
