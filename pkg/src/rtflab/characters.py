"""Characters of F = F_q((t)), exact cyclotomic values, Gauss sums, volumes."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import product

import numpy as np
import sympy

from .errors import BudgetExceeded, ConfigError
from .laurent import LocalElem
from .values import Value

ENUMERATION_BUDGET = 2_000_000


@lru_cache(maxsize=None)
def _cyclotomic(M):
    x = sympy.Symbol("x")
    return tuple(int(c) for c in reversed(sympy.cyclotomic_poly(M, x, polys=True).all_coeffs()))


class CycloValue:
    """An element of Q(zeta_M) times q^(qhalf/2), M = p(q-1).

    zeta_p is zeta_M^(q-1) and zeta_{q-1} is zeta_M^p.  Coefficients are
    kept reduced modulo the M-th cyclotomic polynomial, so equal values have
    equal representations.
    """

    __slots__ = ("p", "q", "M", "coeffs", "qhalf")

    def __init__(self, p, q, coeffs, qhalf=0):
        self.p, self.q = p, q
        self.M = p * (q - 1)
        self.coeffs = self._reduce(coeffs)
        self.qhalf = qhalf if any(self.coeffs) else 0

    def _reduce(self, coeffs):
        M = self.M
        acc = [Fraction(0)] * M
        if isinstance(coeffs, dict):
            items = coeffs.items()
        else:
            items = enumerate(coeffs)
        for e, c in items:
            acc[e % M] += c
        phi = _cyclotomic(M)
        d = len(phi) - 1
        for i in range(M - 1, d - 1, -1):
            c = acc[i]
            if c:
                acc[i] = Fraction(0)
                for j in range(d):
                    acc[i - d + j] -= c * phi[j]
        return tuple(acc[:d])

    @classmethod
    def root(cls, p, q, e, c=1):
        return cls(p, q, {e: Fraction(c)})

    @classmethod
    def zero(cls, p, q):
        return cls(p, q, {})

    def is_zero(self):
        return not any(self.coeffs)

    def __add__(self, other):
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if other.qhalf != self.qhalf:
            raise ValueError("adding values with different q-power volume factors")
        return CycloValue(self.p, self.q, [a + b for a, b in zip(self.coeffs, other.coeffs)], self.qhalf)

    def __neg__(self):
        return CycloValue(self.p, self.q, [-a for a in self.coeffs], self.qhalf)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycloValue(self.p, self.q, [a * other for a in self.coeffs], self.qhalf)
        acc = {}
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        acc[i + j] = acc.get(i + j, 0) + a * b
        qh = self.qhalf + other.qhalf
        out = CycloValue(self.p, self.q, acc, 0)
        # fold whole powers of q into the coefficients
        if qh % 2 == 0:
            return out * (Fraction(self.q) ** (qh // 2))
        out = out * (Fraction(self.q) ** ((qh - 1) // 2))
        out.qhalf = 1 if not out.is_zero() else 0
        return out

    __rmul__ = __mul__

    def conj(self):
        return CycloValue(self.p, self.q, {(-i) % self.M: a for i, a in enumerate(self.coeffs)}, self.qhalf)

    def abs2(self):
        """self * conj(self), a rational when the value is a Gauss-type sum."""
        return self * self.conj()

    def rational(self):
        """The rational value if this lies in Q (and qhalf is even), else None."""
        if any(self.coeffs[1:]) or self.qhalf % 2:
            return None
        return self.coeffs[0] * Fraction(self.q) ** (self.qhalf // 2)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CycloValue(self.p, self.q, {0: Fraction(other)})
        if not isinstance(other, CycloValue):
            return NotImplemented
        return (self.M == other.M and self.coeffs == other.coeffs
                and (self.qhalf == other.qhalf or self.is_zero()))

    def __hash__(self):
        return hash((self.M, self.coeffs, self.qhalf))

    def render(self):
        terms = [f"{_fmt(c)}*z^{i}" for i, c in enumerate(self.coeffs) if c]
        s = " + ".join(terms) if terms else "0"
        if self.qhalf:
            s = f"({s}) * q^({self.qhalf}/2)"
        return s

    def __repr__(self):
        return f"CycloValue[M={self.M}]({self.render()})"


def _fmt(c):
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


class AdditiveCharacter:
    """psi(x) = zeta_p ** Tr(digit of a*x at index -c-1).

    With conductor c the character is trivial on t^{-c} O and nontrivial on
    t^{-c-1} O.  ``twist`` is an exact unit a giving psi_a(x) = psi(a x).
    """

    def __init__(self, field, conductor=0, twist=None):
        self.field = field
        self.conductor = conductor
        self.twist = twist
        if twist is not None and twist.val != 0:
            raise ConfigError("twist must be a unit")

    def twisted(self, a):
        a = a if self.twist is None else a * self.twist
        return AdditiveCharacter(self.field, self.conductor, a.exact_lift() if not a.is_exact else a)

    def exponent(self, x):
        """Exponent e in Z/p with psi(x) = zeta_p^e."""
        if self.twist is not None:
            x = x * self.twist
        return self.field.trace(x.coeff(-self.conductor - 1))

    def trivial_on(self, k, depth=2):
        """Check triviality on t^k O by enumerating digits k..k+depth-1."""
        F = self.field
        for ds in product(range(F.order), repeat=depth):
            if self.exponent(LocalElem(F, k, ds, k + depth + 8)) != 0:
                return False
        return True


class MultiplicativeCharacter:
    """A character of F^x of conductor 0, 1 or 2.

    On a unit u = u0 (1 + y t + ...) it is zeta_{q-1}^(a log u0) times
    zeta_p^Tr(b y).  At the uniformizer it takes the value
    ``sign * zeta_M^unif_exp``, or the formal symbol xi when ``formal``.
    """

    def __init__(self, field, gen_exp=0, mu_p=0, unif_exp=0, sign=1, formal=False):
        self.field = field
        q = field.order
        self.gen_exp = gen_exp % (q - 1)
        self.mu_p = mu_p
        self.unif_exp = unif_exp
        self.sign = sign
        self.formal = formal
        if mu_p:
            self.conductor = 2
        elif self.gen_exp:
            self.conductor = 1
        else:
            self.conductor = 0

    @classmethod
    def quadratic(cls, field, ramified):
        """The quadratic character of an unramified or tame ramified extension."""
        if ramified:
            if field.p == 2:
                raise ConfigError("tame ramified characters need odd p")
            return cls(field, gen_exp=(field.order - 1) // 2)
        return cls(field, sign=-1)

    def unit_exponent(self, u):
        """Exponent of zeta_M for the value on the unit u."""
        F = self.field
        p, q = F.p, F.order
        u0 = u.coeff(0)
        e = p * ((self.gen_exp * F.log(u0)) % (q - 1))
        if self.mu_p:
            y = F.mul(u.coeff(1), F.inv(u0))
            e += (q - 1) * F.trace(F.mul(self.mu_p, y))
        return e % (p * (q - 1))

    def value(self, x):
        """Value on x as a CycloValue (not available for a formal character)."""
        F = self.field
        if self.formal:
            raise ConfigError("formal character has no cyclotomic value at the uniformizer")
        v = x.val
        e = self.unit_exponent(x.unit_part()) + v * self.unif_exp
        return CycloValue.root(F.p, F.order, e, self.sign ** (v % 2))


def shell_representatives(field, n, depth):
    """Representatives of t^n O^x / (1 + p^depth), each of valuation n."""
    if depth < 1:
        raise ConfigError("depth must be at least 1")
    q = field.order
    count = (q - 1) * q ** (depth - 1)
    if count > ENUMERATION_BUDGET:
        raise BudgetExceeded(f"{count} classes exceed the enumeration budget")
    out = []
    for d0 in field.units():
        for rest in product(range(q), repeat=depth - 1):
            out.append(LocalElem(field, n, (d0,) + rest, n + depth))
    return out


def unit_digit_array(q, depth):
    """All digit vectors (d0 != 0, d1..d_{depth-1}) as an int64 array."""
    count = (q - 1) * q ** (depth - 1)
    if count > ENUMERATION_BUDGET:
        raise BudgetExceeded(f"{count} classes exceed the enumeration budget")
    grids = np.indices((q - 1,) + (q,) * (depth - 1)).reshape(depth, -1).T.copy()
    grids[:, 0] += 1
    return grids


class MeasureContext:
    """Haar-measure bookkeeping with Vol(O_F) = Vol(O_F^x) = q^{c/2}.

    ``ext`` selects the E-side data: "unramified" gives q_E = q^2 and
    Vol(O_E) = q^c; "ramified" gives Vol(O_E) = q^{(2c-1)/2} (different
    exponent 1); "split" gives Vol(O_E) = q^c; None leaves E undefined.
    """

    def __init__(self, q, c_psi=0, ext="unramified"):
        self.q = q
        self.c_psi = c_psi
        self.ext = ext

    def vol_OF(self):
        return Value.q_power(self.q, self.c_psi)

    vol_OF_units = vol_OF

    def vol_shell(self, n):
        """Multiplicative volume of t^n O_F^x (independent of n)."""
        return self.vol_OF()

    def vol_mult_ball_F(self, n):
        """Vol^x(1 + p_F^n), n >= 1."""
        q = self.q
        return self.vol_OF() * Fraction(1, (q - 1) * q ** (n - 1))

    def vol_add_ball_F(self, n):
        """Vol(p_F^n)."""
        return self.vol_OF() * (Fraction(1, self.q) ** n if n >= 0 else Fraction(self.q) ** (-n))

    def e_data(self):
        if self.ext in ("unramified", "split"):
            return 1, 2 if self.ext == "unramified" else 1
        if self.ext == "ramified":
            return 2, 1
        raise ConfigError("measure context has no extension")

    def vol_OE(self):
        if self.ext == "ramified":
            return Value.q_power(self.q, 2 * self.c_psi - 1)
        return Value.q_power(self.q, 2 * self.c_psi)

    vol_OE_units = vol_OE

    def residue_order_E(self):
        return self.q ** 2 if self.ext == "unramified" else self.q

    def vol_mult_ball_E(self, n):
        """Vol^x(1 + p_E^n), n >= 1."""
        qE = self.residue_order_E()
        return self.vol_OE() * Fraction(1, (qE - 1) * qE ** (n - 1))

    def vol_add_ball_E(self, n):
        """Vol^+(p_E^n)."""
        qE = self.residue_order_E()
        return self.vol_OE() * (Fraction(1, qE) ** n if n >= 0 else Fraction(qE) ** (-n))

    def vol_torus_quotient(self):
        """Vol(E^x / F^x) with quotient measures."""
        if self.ext == "ramified":
            return 2 * self.vol_OE() / self.vol_OF()
        return self.vol_OE() / self.vol_OF()

    def describe(self):
        return {"psi_conductor": self.c_psi, "vol_OF": self.vol_OF().render(),
                "extension": self.ext}


def gauss_sum(chi: MultiplicativeCharacter, psi: AdditiveCharacter, n: int,
              depth: int | None = None, measure: MeasureContext | None = None) -> CycloValue:
    """tau_n(chi, psi) = integral over O^x of chi(t^n x) psi(t^n x) dx.

    The value is returned as a CycloValue carrying the volume factor
    q^(c/2) of the measure context (default c = 0).
    """
    F = chi.field
    p, q = F.p, F.order
    need = max(1, chi.conductor, -n - psi.conductor)
    N = need if depth is None else max(depth, need)
    total = _gauss_counts(chi, psi, n, N)
    check = _gauss_counts(chi, psi, n, N + 1)
    if total != check:
        raise AssertionError("Gauss sum not stable under deeper enumeration")
    vol = measure.c_psi if measure is not None else 0
    return CycloValue(p, q, total, 0) * Fraction(1) if vol == 0 else _with_qhalf(CycloValue(p, q, total), vol)


def _with_qhalf(v, h):
    out = v * (Fraction(v.q) ** (h // 2))
    if h % 2 and not out.is_zero():
        out.qhalf = 1
    return out


def _gauss_counts(chi, psi, n, N):
    """Coefficients of the Gauss sum (in units of Vol(O^x)) at depth N."""
    F = chi.field
    p, q = F.p, F.order
    M = p * (q - 1)
    digits = unit_digit_array(q, N)
    count = digits.shape[0]
    # chi(t^n x): uniformizer part times unit part
    log_t = np.asarray(F._log, dtype=np.int64)
    e = p * ((chi.gen_exp * log_t[digits[:, 0]]) % (q - 1))
    if chi.mu_p:
        y = F.mul_t[digits[:, 1], F.inv_t[digits[:, 0]]] if N > 1 else np.zeros(count, dtype=np.int64)
        e = e + (q - 1) * F.trace_t[F.mul_t[chi.mu_p, y]]
    sign = 1
    if chi.formal:
        raise ConfigError("Gauss sums need a character with cyclotomic values")
    e = e + n * chi.unif_exp
    sign = chi.sign ** (n % 2)
    # psi(t^n a x): digit of a x at index -c-1-n
    j = -psi.conductor - 1 - n
    if j >= 0:
        if psi.twist is not None:
            col = np.zeros(count, dtype=np.int64)
            for i in range(j + 1):
                a = psi.twist.coeff(j - i)
                if a and i < N:
                    col = F.add_t[col, F.mul_t[a, digits[:, i]]]
        else:
            col = digits[:, j] if j < N else np.zeros(count, dtype=np.int64)
        e = e + (q - 1) * F.trace_t[col]
    e = e % M
    hist = np.bincount(e, minlength=M)
    return {int(k): Fraction(int(c) * sign, count) for k, c in enumerate(hist) if c}
