"""Declarative test functions on the Hermitian side and on the quaternion side.

Each basic function exposes

* ``support()``: whether every entry is integral and the admissible range
  of v_F(det), which the engine turns into finite shell boxes;
* ``member(view)``: a vectorised membership test on a batch of matrices;
* optionally ``member_vals(vals)``: the same test when it depends only on
  entry valuations (this enables the valuation-pattern fast path).

Linear combinations are ``LinComb([(coef, fn), ...])`` with rational or
Value coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .laurent import LocalElem


@dataclass(frozen=True)
class Support:
    integral: bool
    det_lo: int
    det_hi: int


class MatView:
    """A batch of 2x2 matrices plus their determinant.

    ``e`` converts F-valuations to the index units of the entries (2 for a
    ramified E, else 1).  ``const`` embeds an F-element as a batch constant.
    """

    def __init__(self, e11, e12, e21, e22, det, e, const, gl2f=None):
        self.e11, self.e12, self.e21, self.e22 = e11, e12, e21, e22
        self.det = det
        self.e = e
        self.const = const
        self._gl2f = gl2f

    def entries(self):
        return (self.e11, self.e12, self.e21, self.e22)

    def gl2f(self):
        """The GL2(F)-model view (quaternion side, eps = 1, unramified)."""
        if self._gl2f is None:
            raise ValueError("no GL2(F) model attached to this view")
        if callable(self._gl2f):
            self._gl2f = self._gl2f()
        return self._gl2f

    def integral(self):
        ok = np.ones(self.e11.n if self.e11.n > 1 else max(x.n for x in self.entries()), dtype=bool)
        for x in self.entries():
            ok &= x.val_ge(0)
        return ok

    def det_val_eq(self, m):
        k = self.e * m
        return self.det.val_ge(k) & ~self.det.val_ge(k + 1)

    def congruent(self, entry, target, depth):
        """entry = target mod p^depth (index units of the entries)."""
        diff = entry - self.const(target) if target is not None else entry
        return diff.val_ge(depth)


def _ones(view):
    return np.ones(max(x.n for x in view.entries()), dtype=bool)


class TestFn:
    side = "S"

    def terms(self):
        return [(Fraction(1), self)]

    def support(self) -> Support:
        raise NotImplementedError

    def depth_hint(self):
        return 1

    def valuation_only(self):
        return hasattr(self, "member_vals")

    def __add__(self, other):
        return LinComb(self.terms() + other.terms())

    def __rmul__(self, c):
        return LinComb([(c * k, f) for k, f in self.terms()])

    def __sub__(self, other):
        return self + (-1) * other


@dataclass(frozen=True)
class LinComb(TestFn):
    parts: list = field(default_factory=list)

    def __hash__(self):
        return id(self)

    @property
    def side(self):
        sides = {f.side for _, f in self.parts}
        return sides.pop() if len(sides) == 1 else "mixed"

    def terms(self):
        out = []
        for c, f in self.parts:
            out.extend((c * k, g) for k, g in f.terms())
        return out

    def label(self):
        return " + ".join(f"({c})*{f.label()}" for c, f in self.parts)


# ----------------------------------------------------------------- S side

@dataclass(frozen=True)
class KcapS(TestFn):
    """Indicator of K = GL2(O_E) intersected with the Hermitian matrices."""

    def support(self):
        return Support(True, 0, 0)

    def member(self, view):
        return view.integral() & view.det_val_eq(0)

    def member_vals(self, vals, vdet):
        return all(v >= 0 for v in vals) and vdet == 0

    def label(self):
        return "KcapS"


@dataclass(frozen=True)
class IntegralDetM(TestFn):
    """Hermitian matrices with integral entries and v_F(det) = m."""

    m: int

    def support(self):
        return Support(True, self.m, self.m)

    def member(self, view):
        return view.integral() & view.det_val_eq(self.m)

    def member_vals(self, vals, vdet):
        return all(v >= 0 for v in vals) and vdet == self.m

    def label(self):
        return f"IntegralDetM({self.m})"


def _trace_depth(E, l):
    """L with tr(p_E^l) = p_F^L."""
    if E.flavor == "ramified":
        return -(-l // 2)
    return l


@dataclass(frozen=True)
class KlxiN(TestFn):
    """[[a, b], [c, d]] in GL2(O_E) with b = c = 1 and d = 0 mod p_E^n, a in -tr(xi) + tr(p_E^l)."""

    l: int
    xi: object
    n: int

    def support(self):
        return Support(True, 0, 0)

    def depth_hint(self):
        return max(self.n, self.l) + 1

    def member(self, view):
        E = view.ext
        tr = E.trace(self.xi)
        L = _trace_depth(E, self.l)
        ok = view.integral() & view.det_val_eq(0)
        one = LocalElem.one(E.F)
        ok &= view.congruent(view.e12, one, self.n)
        ok &= view.congruent(view.e21, one, self.n)
        ok &= view.e22.val_ge(self.n)
        ok &= view.congruent(view.e11, -tr, view.e * L)
        return ok

    def label(self):
        return f"KlxiN(l={self.l}, n={self.n})"


@dataclass(frozen=True)
class KlxiNPrime(TestFn):
    """[[a, b], [c, d]] in GL2(O_E) with a = 0, b = c = -1 mod p_E^n, d in -tr(xi) + tr(p_E^l)."""

    l: int
    xi: object
    n: int

    def support(self):
        return Support(True, 0, 0)

    def depth_hint(self):
        return max(self.n, self.l) + 1

    def member(self, view):
        E = view.ext
        tr = E.trace(self.xi)
        L = _trace_depth(E, self.l)
        ok = view.integral() & view.det_val_eq(0)
        mone = -LocalElem.one(E.F)
        ok &= view.e11.val_ge(self.n)
        ok &= view.congruent(view.e12, mone, self.n)
        ok &= view.congruent(view.e21, mone, self.n)
        ok &= view.congruent(view.e22, -tr, view.e * L)
        return ok

    def label(self):
        return f"KlxiNPrime(l={self.l}, n={self.n})"


@dataclass(frozen=True)
class MatBall(TestFn):
    """Split model only: g = center mod p^k, with v(det center) < k so the ball sits in GL2."""

    center: object  # Mat2 over F
    k: int

    def __post_init__(self):
        if self.center.det().val >= self.k:
            raise ValueError("ball meets singular matrices; take k > v(det center)")
        if any(x.val_lower_bound() < 0 for x in self.center.entries()):
            raise ValueError("center must be integral")

    def __hash__(self):
        return id(self)

    def support(self):
        d = self.center.det().val
        return Support(True, d, d)

    def depth_hint(self):
        return self.k + 1

    def member(self, view):
        ok = _ones(view)
        for ent, c in zip(view.entries(), self.center.entries()):
            ok &= view.congruent(ent, c, self.k)
        return ok

    def label(self):
        return f"MatBall(k={self.k})"


# ----------------------------------------------------------------- G side

class GTestFn(TestFn):
    side = "G"


@dataclass(frozen=True)
class IntegralDetMG(GTestFn):
    """GL2(F) matrices with integral entries and v(det) = m (the Hecke generator)."""

    m: int

    def support(self):
        return Support(True, self.m, self.m)

    def member(self, view):
        g = view.gl2f()
        return g.integral() & g.det_val_eq(self.m)

    def member_mat(self, g):
        ok = all(x.val_lower_bound() >= 0 for x in g.entries())
        return ok and g.det().val == self.m

    def label(self):
        return f"IntegralDetM_G({self.m})"


IntegralDetM_G = IntegralDetMG


@dataclass(frozen=True)
class Cm(GTestFn):
    """K_1 diag(t^m, 1) K_1: integral, v(det) = m, some entry a unit."""

    m: int

    def support(self):
        return Support(True, self.m, self.m)

    def member(self, view):
        g = view.gl2f()
        ok = g.integral() & g.det_val_eq(self.m)
        unit = np.zeros_like(ok)
        for x in g.entries():
            unit |= ~x.val_ge(1)
        return ok & unit

    def member_mat(self, g):
        vals = [x.val_lower_bound() for x in g.entries()]
        return min(vals) == 0 and g.det().val == self.m

    def label(self):
        return f"Cm({self.m})"


@dataclass(frozen=True)
class KepsM(GTestFn):
    """G_eps intersected with GL2(O_E), congruent to 1 mod p_E^m (m = 0: no congruence)."""

    m: int

    def support(self):
        return Support(True, 0, 0)

    def depth_hint(self):
        return self.m + 1

    def member(self, view):
        ok = view.integral() & view.det_val_eq(0)
        if self.m > 0:
            one = LocalElem.one(view.ext.F)
            ok &= view.congruent(view.e11, one, self.m)
            ok &= view.congruent(view.e22, one, self.m)
            ok &= view.e12.val_ge(self.m)
            ok &= view.e21.val_ge(self.m)
        return ok

    def label(self):
        return f"KepsM({self.m})"


@dataclass(frozen=True)
class KepsMZ(GTestFn):
    """K_{eps,m} times the powers of the uniformizer; integrated over T / Xi."""

    m: int

    def support(self):
        return Support(True, 0, 0)

    def depth_hint(self):
        return self.m + 1

    def base(self):
        return KepsM(self.m)

    def label(self):
        return f"KepsMZ({self.m})"


@dataclass(frozen=True)
class RightTranslateW(GTestFn):
    """g -> phi(g w) with w = [[0, 1], [1, 0]] (split model)."""

    phi: TestFn

    def support(self):
        return self.phi.support()

    def depth_hint(self):
        return self.phi.depth_hint()

    def member(self, view):
        swapped = MatView(view.e12, view.e11, view.e22, view.e21, -view.det, view.e, view.const)
        swapped.ext = view.ext
        return self.phi.member(swapped)

    def valuation_only(self):
        return self.phi.valuation_only()

    def member_vals(self, vals, vdet):
        v11, v12, v21, v22 = vals
        return self.phi.member_vals((v12, v11, v22, v21), vdet)

    def label(self):
        return f"RightTranslateW({self.phi.label()})"


def K1():
    return Cm(0)
