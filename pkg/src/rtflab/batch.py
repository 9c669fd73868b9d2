"""Batches of truncated Laurent series sharing one digit window.

Row r of a SeriesBatch is the series sum_i D[r, i] t^(lo + i), known up to
(but excluding) absolute index ``hi``.  ``lo`` is a lower bound for every
row's valuation.  These batches carry the element-wise brute-force
integration; the inner loops live in ``kernels``.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .errors import PrecisionUnderflow
from .laurent import LocalElem

EXACT_WINDOW = 48


class Undecidable(PrecisionUnderflow):
    """A predicate needs digits beyond the tracked precision."""


class SeriesBatch:
    __slots__ = ("field", "lo", "hi", "D")

    def __init__(self, field, lo, hi, D):
        self.field = field
        self.lo = lo
        self.hi = hi
        self.D = D

    @property
    def n(self):
        return self.D.shape[0]

    @classmethod
    def from_units(cls, field, digits, shift=0):
        """Rows t^shift * (d0 + d1 t + ...) known to relative depth digits.shape[1]."""
        return cls(field, shift, shift + digits.shape[1], np.asarray(digits, dtype=np.int64))

    @classmethod
    def constant(cls, x: LocalElem, window=EXACT_WINDOW, field=None):
        field = field or x.field
        if x.is_zero_up_to_prec() and x.prec is None:
            return cls(field, 0, window, np.zeros((1, window), dtype=np.int64))
        lo = x.start
        hi = x.prec if x.prec is not None else lo + window
        row = np.zeros((1, hi - lo), dtype=np.int64)
        for i, c in enumerate(x.coeffs[: hi - lo]):
            row[0, i] = c
        return cls(field, lo, hi, row)

    def row(self, r) -> LocalElem:
        return LocalElem(self.field, self.lo, [int(c) for c in self.D[r]], self.hi)

    def __mul__(self, other):
        F = self.field
        lo = self.lo + other.lo
        hi = min(self.hi + other.lo, other.hi + self.lo)
        L = max(0, hi - lo)
        if self.n != other.n and min(self.n, other.n) != 1:
            raise ValueError("batch sizes differ")
        C = kernels.conv(self.D, other.D, L, F.add_t, F.mul_t)
        return SeriesBatch(F, lo, lo + L, C)

    def _aligned(self, lo, hi):
        L = hi - lo
        out = np.zeros((self.n, L), dtype=np.int64)
        s = self.lo - lo
        take = min(self.D.shape[1], L - s)
        if take > 0:
            out[:, s:s + take] = self.D[:, :take]
        return out

    def __add__(self, other):
        F = self.field
        lo = min(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        hi = max(hi, lo)
        A = self._aligned(lo, hi)
        B = other._aligned(lo, hi)
        if A.shape[0] != B.shape[0]:
            A, B = np.broadcast_arrays(A, B)
        return SeriesBatch(F, lo, hi, F.add_t[A, B])

    def __neg__(self):
        return SeriesBatch(self.field, self.lo, self.hi, self.field.neg_t[self.D])

    def __sub__(self, other):
        return self + (-other)

    def map_digits(self, table, field=None):
        return SeriesBatch(field or self.field, self.lo, self.hi, np.asarray(table)[self.D])

    def repeat(self, k):
        """Each row repeated k times consecutively."""
        return SeriesBatch(self.field, self.lo, self.hi, np.repeat(self.D, k, axis=0))

    def tile(self, k):
        """The whole batch repeated k times."""
        return SeriesBatch(self.field, self.lo, self.hi, np.tile(self.D, (k, 1)))

    def leading_index(self):
        """Absolute valuation per row, or None-marker (-10**9) for rows zero up to hi."""
        idx = kernels.first_nonzero(self.D)
        out = idx + self.lo
        out[idx < 0] = -10**9
        return out

    def valuations(self):
        """Exact valuations; raises Undecidable if some row has no known nonzero digit."""
        v = self.leading_index()
        if (v == -10**9).any():
            raise Undecidable("row is zero up to the tracked precision")
        return v

    def val_ge(self, k):
        """Row-wise test v(row) >= k, decided from known digits only."""
        v = self.leading_index()
        known = v != -10**9
        if not known.all() and k > self.hi:
            raise Undecidable(f"valuation test at {k} beyond precision {self.hi}")
        res = np.ones(self.n, dtype=bool)
        res[known] = v[known] >= k
        return res

    def digit(self, k):
        """Digit at absolute index k (must be < hi)."""
        if k >= self.hi:
            raise Undecidable(f"digit {k} beyond precision {self.hi}")
        if k < self.lo:
            return np.zeros(self.n, dtype=np.int64)
        return self.D[:, k - self.lo]

    def leading_digit(self):
        idx = kernels.first_nonzero(self.D)
        if (idx < 0).any():
            raise Undecidable("row is zero up to the tracked precision")
        return self.D[np.arange(self.n), idx]

    def inv_units(self):
        """Inverse of rows that are units times t^lo (leading digit at lo)."""
        F = self.field
        if (self.D[:, 0] == 0).any():
            raise ValueError("inv_units needs a nonzero digit at lo in every row")
        R = kernels.inv_units(self.D, F.add_t, F.mul_t, F.neg_t, F.inv_t)
        return SeriesBatch(F, -self.lo, -self.lo + R.shape[1], R)
