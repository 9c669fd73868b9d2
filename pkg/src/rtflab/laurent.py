"""Truncated Laurent series over a table-coded finite field.

A LocalElem stores the digits from its valuation up to its absolute
precision.  ``prec=None`` marks an exact finite Laurent polynomial.  An
element whose known digits all vanish is "zero up to precision": its
valuation is only bounded below by ``prec``.
"""

from __future__ import annotations

import math

from .errors import InversionOfZero, PrecisionUnderflow, UncertainValuation

DEFAULT_REL_PREC = 24


def _pmin(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class LocalElem:
    __slots__ = ("field", "start", "coeffs", "prec")

    def __init__(self, field, start, coeffs, prec=None):
        coeffs = list(coeffs)
        if prec is not None:
            coeffs = coeffs[: max(0, prec - start)]
        i = 0
        while i < len(coeffs) and coeffs[i] == 0:
            i += 1
        start += i
        coeffs = coeffs[i:]
        if prec is None:
            while coeffs and coeffs[-1] == 0:
                coeffs.pop()
        if not coeffs:
            start = prec if prec is not None else 0
        self.field = field
        self.start = start
        self.coeffs = tuple(coeffs)
        self.prec = prec

    # constructors
    @classmethod
    def from_dict(cls, field, terms, prec=None):
        if not terms:
            return cls(field, 0, (), prec)
        lo, hi = min(terms), max(terms)
        ds = [0] * (hi - lo + 1)
        for k, c in terms.items():
            ds[k - lo] = field.add(ds[k - lo], c)
        return cls(field, lo, ds, prec)

    @classmethod
    def const(cls, field, c, prec=None):
        return cls(field, 0, (c,), prec)

    @classmethod
    def one(cls, field):
        return cls(field, 0, (1,))

    @classmethod
    def zero(cls, field, prec=None):
        return cls(field, 0, (), prec)

    @classmethod
    def uniformizer(cls, field, power=1):
        return cls(field, power, (1,))

    # inspection
    @property
    def is_exact(self):
        return self.prec is None

    def is_zero_up_to_prec(self):
        return not self.coeffs

    def is_exact_zero(self):
        return not self.coeffs and self.prec is None

    @property
    def val(self):
        if not self.coeffs:
            if self.prec is None:
                return math.inf
            raise UncertainValuation(f"zero up to precision {self.prec}")
        return self.start

    valuation = val

    def val_lower_bound(self):
        return self.start if self.coeffs or self.prec is not None else math.inf

    def coeff(self, i):
        if self.prec is not None and i >= self.prec:
            raise PrecisionUnderflow(f"digit {i} beyond precision {self.prec}")
        j = i - self.start
        if 0 <= j < len(self.coeffs):
            return self.coeffs[j]
        return 0

    def leading(self):
        if not self.coeffs:
            raise UncertainValuation("no certain leading digit")
        return self.coeffs[0]

    def rel_prec(self):
        return None if self.prec is None else self.prec - self.start

    def terms(self):
        return {self.start + i: c for i, c in enumerate(self.coeffs) if c}

    # precision handling
    def with_prec(self, prec):
        return LocalElem(self.field, self.start, self.coeffs, _pmin(self.prec, prec))

    def exact_lift(self):
        """The finite Laurent polynomial formed by the known digits."""
        return LocalElem(self.field, self.start, self.coeffs, None)

    def agrees(self, other, prec=None):
        p = _pmin(_pmin(self.prec, other.prec), prec)
        lo = min(self.start, other.start)
        if p is None:
            hi = max(self.start + len(self.coeffs), other.start + len(other.coeffs))
        else:
            hi = p
        return all(self.coeff(i) == other.coeff(i) for i in range(lo, hi))

    def __eq__(self, other):
        if isinstance(other, int):
            other = LocalElem.const(self.field, other % self.field.p) if other else LocalElem.zero(self.field)
        if not isinstance(other, LocalElem):
            return NotImplemented
        return self.field is other.field and self.agrees(other)

    __hash__ = None

    # arithmetic
    def _coerce(self, other):
        if isinstance(other, LocalElem):
            return other
        if isinstance(other, int):
            F = self.field
            c = 0
            step = 1 if other >= 0 else F.neg(1)
            for _ in range(abs(other) % F.p):
                c = F.add(c, step)
            return LocalElem.const(F, c)
        return NotImplemented

    def __neg__(self):
        F = self.field
        return LocalElem(F, self.start, [F.neg(c) for c in self.coeffs], self.prec)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        F = self.field
        prec = _pmin(self.prec, other.prec)
        lo = min(self.start, other.start)
        hi = max(self.start + len(self.coeffs), other.start + len(other.coeffs))
        if prec is not None:
            hi = min(hi, prec)
            lo = min(lo, prec)
        ds = [F.add(self.coeff_raw(i), other.coeff_raw(i)) for i in range(lo, max(lo, hi))]
        return LocalElem(F, lo, ds, prec)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def coeff_raw(self, i):
        j = i - self.start
        if 0 <= j < len(self.coeffs):
            return self.coeffs[j]
        return 0

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        F = self.field
        va, vb = self.val_lower_bound(), other.val_lower_bound()
        if va == math.inf or vb == math.inf:
            if va == math.inf and vb == math.inf:
                return LocalElem.zero(F)
            # exact zero times anything known is exact zero
            return LocalElem.zero(F)
        prec = None
        if self.prec is not None:
            prec = self.prec + vb
        if other.prec is not None:
            prec = _pmin(prec, other.prec + va)
        start = self.start + other.start
        n = len(self.coeffs) + len(other.coeffs) - 1 if self.coeffs and other.coeffs else 0
        if prec is not None:
            n = min(n, max(0, prec - start))
        ds = [0] * n
        add, mul = F._add, F._mul
        for i, a in enumerate(self.coeffs):
            if i >= n:
                break
            if a == 0:
                continue
            row = mul[a]
            for j in range(min(len(other.coeffs), n - i)):
                b = other.coeffs[j]
                if b:
                    ds[i + j] = add[ds[i + j]][row[b]]
        return LocalElem(F, start, ds, prec)

    __rmul__ = __mul__

    def inv(self, rel_prec=None):
        if not self.coeffs:
            raise InversionOfZero("inverse of an element that is zero up to precision")
        F = self.field
        r = self.rel_prec()
        if r is None:
            r = rel_prec if rel_prec is not None else DEFAULT_REL_PREC
        a = self.coeffs
        a0inv = F.inv(a[0])
        b = [a0inv]
        add, mul, neg = F._add, F._mul, F._neg
        for k in range(1, r):
            s = 0
            for j in range(1, min(k, len(a) - 1) + 1):
                s = add[s][mul[a[j]][b[k - j]]]
            b.append(mul[neg[s]][a0inv])
        return LocalElem(F, -self.start, b, -self.start + r)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not other.coeffs:
            raise InversionOfZero("division by an element that is zero up to precision")
        if other.prec is None and len(other.coeffs) == 1:
            # monomial divisor: exact shift and scale
            F = self.field
            c = F.inv(other.coeffs[0])
            s = other.start
            return LocalElem(F, self.start - s, [F.mul(d, c) for d in self.coeffs],
                             None if self.prec is None else self.prec - s)
        rp = None
        if self.prec is not None:
            rp = self.prec - (self.start if self.coeffs else self.prec)
        return self * other.inv(rel_prec=rp if rp is not None else None)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, e):
        if e < 0:
            return self.inv() ** (-e)
        r = LocalElem.one(self.field)
        b = self
        while e:
            if e & 1:
                r = r * b
            b = b * b
            e >>= 1
        return r

    def shift(self, k):
        """Multiply by t^k."""
        return LocalElem(self.field, self.start + k, self.coeffs,
                         None if self.prec is None else self.prec + k)

    def unit_part(self):
        return self.shift(-self.val)

    def map_coeffs(self, fn, field):
        return LocalElem(field, self.start, [fn(c) for c in self.coeffs], self.prec)

    def __repr__(self):
        return f"LocalElem({self.render()})"

    def render(self):
        F = self.field
        parts = []
        for k, c in sorted(self.terms().items()):
            parts.append(f"{_render_residue(F, c)}*t^{k}")
        s = " + ".join(parts) if parts else "0"
        if self.prec is not None:
            s += f" + O(t^{self.prec})"
        return s


def _render_residue(F, c):
    if c == 1:
        return "1"
    return f"g^{F.log(c)}"


def laurent_arith(a, b, op):
    """Facade over the LocalElem operators.

    Raises PrecisionUnderflow when the result has no certain digit.
    """
    if op == "add":
        r = a + b
    elif op == "mul":
        r = a * b
    elif op == "inv":
        r = a.inv()
    elif op == "div":
        r = a / b
    else:
        raise ValueError(f"unknown op {op!r}")
    if r.is_zero_up_to_prec() and not r.is_exact:
        raise PrecisionUnderflow("result has no certain coefficient")
    return r


def parse_local(field, text, prec=None):
    """Parse a literal such as ``"1 + g^2*t^3 - t^-1 + O(t^6)"``.

    Terms are ``c*t^k``, ``c`` or ``t^k``; a coefficient is an integer
    (read mod p), ``g`` or ``g^j`` (powers of the fixed residue generator).
    A trailing ``O(t^N)`` sets the absolute precision.
    """
    import re

    s = text.replace(" ", "")
    m = re.search(r"\+?O\(t\^?(-?\d+)\)$", s)
    if m:
        prec = int(m.group(1))
        s = s[: m.start()]
    if not s:
        return LocalElem.zero(field, prec)
    terms = {}
    s = re.sub(r"(?<!\^)-", "+-", s)
    for piece in filter(None, s.split("+")):
        sign, body = ("-", piece[1:]) if piece.startswith("-") else ("", piece)
        coef, k = 1, 0
        factors = body.split("*")
        for f in factors:
            if f.startswith("t"):
                k += int(f[2:]) if f.startswith("t^") else 1
            elif f.startswith("g"):
                coef = field.mul(coef, field.gen_pow(int(f[2:]) if f.startswith("g^") else 1))
            else:
                c = 0
                for _ in range(int(f) % field.p):
                    c = field.add(c, 1)
                coef = field.mul(coef, c)
        if sign == "-":
            coef = field.neg(coef)
        terms[k] = field.add(terms.get(k, 0), coef)
    return LocalElem.from_dict(field, terms, prec)
