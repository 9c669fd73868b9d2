"""Exact symbolic values for orbital integrals.

A Value is a finite sum of rational multiples of monomials
``T^k * xi^a * xi1^b * xi2^c * sqrt(q)^r`` with r in {0, 1}.  T stands for
q_E^{-s}; the xi symbols are formal character values at the uniformizer.
A LogValue is a Value multiplied by the symbol (-log q).
"""

from __future__ import annotations

from fractions import Fraction

SYMBOLS = ("xi", "xi1", "xi2")


def _frac(x):
    return x if isinstance(x, Fraction) else Fraction(x)


class Value:
    __slots__ = ("q", "terms")

    def __init__(self, q, terms=None):
        self.q = q
        clean = {}
        for key, c in (terms or {}).items():
            c = _frac(c)
            if c:
                clean[key] = clean.get(key, 0) + c
        self.terms = {k: c for k, c in clean.items() if c}

    # keys are (tpow, (xi, xi1, xi2) exponents as Fractions, r)
    @staticmethod
    def key(tpow=0, xi=0, xi1=0, xi2=0, r=0):
        return (int(tpow), (_frac(xi), _frac(xi1), _frac(xi2)), int(r))

    @classmethod
    def const(cls, q, c=1):
        return cls(q, {cls.key(): c})

    @classmethod
    def zero(cls, q):
        return cls(q, {})

    @classmethod
    def mono(cls, q, c=1, tpow=0, xi=0, xi1=0, xi2=0, sqrt_q=0):
        """c * T^tpow * xi^.. * sqrt(q)^sqrt_q (sqrt_q any integer)."""
        c = _frac(c)
        r = sqrt_q % 2
        h = (sqrt_q - r) // 2
        c *= Fraction(q) ** h
        return cls(q, {cls.key(tpow, xi, xi1, xi2, r): c})

    @classmethod
    def q_power(cls, q, half_exp):
        """q^(half_exp/2)."""
        return cls.mono(q, 1, sqrt_q=half_exp)

    def _check(self, other):
        if isinstance(other, (int, Fraction)):
            return Value.const(self.q, other)
        if not isinstance(other, Value):
            return NotImplemented
        if other.q != self.q:
            raise ValueError(f"values over different q ({self.q}, {other.q})")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        t = dict(self.terms)
        for k, c in other.terms.items():
            t[k] = t.get(k, 0) + c
        return Value(self.q, t)

    __radd__ = __add__

    def __neg__(self):
        return Value(self.q, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        t = {}
        for (k1, s1, r1), c1 in self.terms.items():
            for (k2, s2, r2), c2 in other.terms.items():
                c = c1 * c2
                r = r1 + r2
                if r == 2:
                    c *= self.q
                    r = 0
                key = (k1 + k2, tuple(a + b for a, b in zip(s1, s2)), r)
                t[key] = t.get(key, 0) + c
        return Value(self.q, t)

    __rmul__ = __mul__

    def is_monomial(self):
        return len(self.terms) == 1

    def inverse(self):
        """Inverse of a single monomial, or of a sum sharing one monomial shape."""
        if not self.terms:
            raise ZeroDivisionError("inverse of zero value")
        shapes = {(k, s, r) for (k, s, r) in self.terms}
        if len(shapes) != 1:
            raise ValueError("only monomials can be inverted")
        (k, s, r), c = next(iter(self.terms.items()))
        inv_c = 1 / c
        if r:
            # 1/sqrt(q) = sqrt(q)/q
            inv_c /= self.q
        return Value(self.q, {(-k, tuple(-a for a in s), r): inv_c})

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / _frac(other))
        return self * other.inverse()

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Value.const(self.q, other)
        if not isinstance(other, Value):
            return NotImplemented
        return self.q == other.q and self.terms == other.terms

    def __hash__(self):
        return hash((self.q, frozenset(self.terms.items())))

    def is_zero(self):
        return not self.terms

    def substitute(self, xi=None, xi1=None, xi2=None):
        """Specialise formal symbols to 1 (pass True) or to another Value."""
        out = Value.zero(self.q)
        for (k, s, r), c in self.terms.items():
            new_s = list(s)
            factor = Value.const(self.q, 1)
            for i, spec in enumerate((xi, xi1, xi2)):
                if spec is None:
                    continue
                e = s[i]
                new_s[i] = Fraction(0)
                if spec is True:
                    continue
                if e.denominator != 1:
                    raise ValueError("cannot substitute into a fractional exponent")
                p = spec if e >= 0 else spec.inverse()
                for _ in range(abs(int(e))):
                    factor = factor * p
            out = out + Value(self.q, {(k, tuple(new_s), r): c}) * factor
        return out

    # T-polynomial views
    def at_T1(self):
        """Value at s = 0 (T -> 1)."""
        t = {}
        for (k, s, r), c in self.terms.items():
            key = (0, s, r)
            t[key] = t.get(key, 0) + c
        return Value(self.q, t)

    def t_derivative(self):
        """sum over k of k * c_k (coefficient of -log q_E in the s-derivative)."""
        t = {}
        for (k, s, r), c in self.terms.items():
            if k:
                key = (0, s, r)
                t[key] = t.get(key, 0) + k * c
        return Value(self.q, t)

    def t_degrees(self):
        return sorted({k for (k, _, _) in self.terms})

    def is_T_constant(self):
        return all(k == 0 for (k, _, _) in self.terms)

    def render(self):
        if not self.terms:
            return "0"
        out = []
        for (k, s, r), c in sorted(self.terms.items(), key=lambda kv: (kv[0][0], kv[0][1], kv[0][2])):
            factors = []
            for name, e in zip(SYMBOLS, s):
                if e:
                    factors.append(f"{name}^{_fmt(e)}")
            factors.append(_fmt(c))
            if k:
                factors.append(f"T^{k}")
            if r:
                factors.append("sqrt(q)")
            out.append(" * ".join(factors))
        return " + ".join(out)

    def __repr__(self):
        return f"Value({self.render()})"

    __str__ = render


def _fmt(x):
    x = _frac(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


class LogValue:
    """coeff * (-log q) with q the residue cardinality of F.

    ``grade`` is the power of q inside the log used for display: a
    LogValue built as c * (-log q^2) stores coeff 2c and renders with grade 2.
    """

    __slots__ = ("coeff", "grade")

    def __init__(self, coeff, grade=1):
        self.coeff = coeff
        self.grade = grade

    @classmethod
    def of(cls, value, grade):
        """value * (-log q^grade)."""
        return cls(value * grade, grade)

    def __eq__(self, other):
        if not isinstance(other, LogValue):
            return NotImplemented
        return self.coeff == other.coeff

    def __hash__(self):
        return hash(self.coeff)

    def __add__(self, other):
        return LogValue(self.coeff + other.coeff, self.grade)

    def scaled(self, c):
        return LogValue(self.coeff * c, self.grade)

    def is_zero(self):
        return self.coeff.is_zero()

    def render(self):
        if self.coeff.is_zero():
            return "0"
        inner = self.coeff / self.grade
        body = inner.render()
        if len(inner.terms) > 1:
            body = f"({body})"
        return f"{body} * (-logq^{self.grade})"

    __str__ = render

    def __repr__(self):
        return f"LogValue({self.render()})"


def derivative_at_zero(v: Value, residue_degree: int = 2) -> LogValue:
    """s-derivative at 0 of sum c_k q_E^{-ks}: (sum k c_k) * (-log q_E).

    ``residue_degree`` is f(E/F): log q_E = f * log q.
    """
    return LogValue.of(v.t_derivative(), residue_degree)
