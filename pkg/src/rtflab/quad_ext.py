"""Quadratic extensions E/F of F = F_q((t)) in three flavors.

* unramified: E = F_{q^2}((t)), conjugation is Frobenius on digits;
* ramified (p odd): E = F_q((s)) with s^2 = u t, conjugation s -> -s;
* split: E = F x F with swapped coordinates.
"""

from __future__ import annotations

from .errors import ConfigError, UncertainValuation
from .fields import quad_residue_field, residue_field
from .laurent import LocalElem


class SplitElem:
    """An element (a, b) of F x F."""

    __slots__ = ("a", "b")

    def __init__(self, a, b):
        self.a, self.b = a, b

    def __add__(self, o):
        o = _split_coerce(o, self)
        return SplitElem(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, o):
        o = _split_coerce(o, self)
        return SplitElem(self.a - o.a, self.b - o.b)

    def __rsub__(self, o):
        return _split_coerce(o, self) - self

    def __neg__(self):
        return SplitElem(-self.a, -self.b)

    def __mul__(self, o):
        o = _split_coerce(o, self)
        return SplitElem(self.a * o.a, self.b * o.b)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = _split_coerce(o, self)
        return SplitElem(self.a / o.a, self.b / o.b)

    def inv(self):
        return SplitElem(self.a.inv(), self.b.inv())

    def __eq__(self, o):
        return isinstance(o, SplitElem) and self.a == o.a and self.b == o.b

    __hash__ = None

    def is_zero_up_to_prec(self):
        return self.a.is_zero_up_to_prec() and self.b.is_zero_up_to_prec()

    def __repr__(self):
        return f"SplitElem({self.a.render()}, {self.b.render()})"


def _split_coerce(o, ref):
    if isinstance(o, SplitElem):
        return o
    if isinstance(o, LocalElem):
        return SplitElem(o, o)
    if isinstance(o, int):
        return SplitElem(ref.a._coerce(o), ref.b._coerce(o))
    raise TypeError(f"cannot combine SplitElem with {type(o).__name__}")


class QuadExt:
    """Descriptor of E/F with norm, trace, conjugation and the character eta."""

    def __init__(self, q, flavor="unramified", unit=None):
        self.q = q
        self.F = residue_field(q)
        self.flavor = flavor
        F = self.F
        if flavor == "unramified":
            self.K = quad_residue_field(q)
            self.e = 1
            self.f = 2
            self.tau = self.K.tau
        elif flavor == "ramified":
            if F.p == 2:
                raise ConfigError("ramified extensions are only modelled for odd p")
            self.K = F
            self.e = 2
            self.f = 1
            self.u = 1 if unit is None else unit
            if self.u == 0:
                raise ConfigError("s^2 = u t needs a unit u")
            self.tau = None
        elif flavor == "split":
            self.K = F
            self.e = 1
            self.f = 1
            self.tau = None
        else:
            raise ConfigError(f"unknown flavor {flavor!r}")

    # -- embeddings and basic maps --
    def embed(self, x):
        """F -> E."""
        if self.flavor == "unramified":
            return LocalElem(self.K, x.start, x.coeffs, x.prec)
        if self.flavor == "split":
            return SplitElem(x, x)
        F = self.F
        uinv = F.inv(self.u)
        terms = {}
        for k, c in x.terms().items():
            terms[2 * k] = F.mul(c, F.pow(uinv, k))
        prec = None if x.prec is None else 2 * x.prec
        return LocalElem.from_dict(F, terms, prec) if terms else LocalElem.zero(F, prec)

    def restrict(self, z):
        """E -> F for an element known to lie in F."""
        if self.flavor == "unramified":
            q = self.q
            if any(c >= q for c in z.coeffs):
                raise ValueError("element does not lie in F")
            return LocalElem(self.F, z.start, z.coeffs, z.prec)
        if self.flavor == "split":
            if not z.a == z.b:
                raise ValueError("element does not lie in F")
            return z.a
        F = self.F
        terms = {}
        for k, c in z.terms().items():
            if k % 2:
                raise ValueError("element does not lie in F")
            terms[k // 2] = F.mul(c, F.pow(self.u, k // 2))
        prec = None if z.prec is None else (z.prec + 1) // 2
        return LocalElem.from_dict(F, terms, prec) if terms else LocalElem.zero(F, prec)

    def conj(self, z):
        if self.flavor == "unramified":
            K = self.K
            return LocalElem(K, z.start, [K.conj(c) for c in z.coeffs], z.prec)
        if self.flavor == "split":
            return SplitElem(z.b, z.a)
        F = self.F
        return LocalElem(F, z.start, [c if (z.start + i) % 2 == 0 else F.neg(c)
                                      for i, c in enumerate(z.coeffs)], z.prec)

    def norm(self, z):
        if self.flavor == "split":
            return z.a * z.b
        return self.restrict(z * self.conj(z))

    def trace(self, z):
        if self.flavor == "split":
            return z.a + z.b
        return self.restrict(z + self.conj(z))

    def trace_norm(self, z):
        return self.trace(z), self.norm(z)

    def generator(self):
        """The basis element w of O_E over O_F (w^2 = u, or w^2 = w + tau; s if ramified)."""
        if self.flavor == "unramified":
            return LocalElem.const(self.K, self.K.w)
        if self.flavor == "ramified":
            return LocalElem.uniformizer(self.F, 1)
        return SplitElem(LocalElem.one(self.F), LocalElem.zero(self.F))

    def make(self, a, b):
        """a + b*w with a, b in F."""
        return self.embed(a) + self.embed(b) * self.generator()

    def parts(self, z):
        """Coordinates (a, b) with z = a + b*w."""
        if self.flavor == "unramified":
            q = self.q
            a = LocalElem(self.F, z.start, [c % q for c in z.coeffs], z.prec)
            b = LocalElem(self.F, z.start, [c // q for c in z.coeffs], z.prec)
            return a, b
        if self.flavor == "split":
            return z.b, z.a - z.b
        zc = self.conj(z)
        a = self.restrict(_halve(self.F, z + zc))
        b = self.restrict(_halve(self.F, (z - zc) / self.generator()))
        return a, b

    def uniformizer(self):
        if self.flavor == "ramified":
            return LocalElem.uniformizer(self.F, 1)
        if self.flavor == "split":
            t = LocalElem.uniformizer(self.F, 1)
            return SplitElem(t, t)
        return LocalElem.uniformizer(self.K, 1)

    def v_E(self, z):
        if self.flavor == "split":
            raise ValueError("the split algebra has no valuation")
        return z.val

    def one(self):
        if self.flavor == "split":
            o = LocalElem.one(self.F)
            return SplitElem(o, o)
        return LocalElem.one(self.K)

    def zero(self):
        if self.flavor == "split":
            z = LocalElem.zero(self.F)
            return SplitElem(z, z)
        return LocalElem.zero(self.K)

    # -- the quadratic character --
    def eta(self, x):
        """eta(x) in {+1, -1}."""
        if self.flavor == "split":
            return 1
        v = x.val
        if self.flavor == "unramified":
            return -1 if v % 2 else 1
        F = self.F
        leg = 1 if F.is_square(x.leading()) else -1
        eta_t = 1 if F.is_square(F.neg(self.u)) else -1
        return leg * (eta_t if v % 2 else 1)

    def norm_membership(self, x, depth=4):
        """True iff x lies in Nm(E^x); certified by a preimage when true."""
        if self.flavor == "split":
            return True
        y = self.norm_preimage(x, depth)
        return y is not None

    def norm_preimage(self, x, depth=4):
        """y in E with Nm(y) = x mod (1 + p^depth) x, or None when x is not a norm."""
        if self.flavor == "split":
            return SplitElem(x, LocalElem.one(self.F))
        if x.is_zero_up_to_prec():
            raise UncertainValuation("norm preimage of an element that is zero up to precision")
        F, K = self.F, self.K
        v = x.val
        xu = x.unit_part()
        if x.prec is None:
            xu = xu.with_prec(depth)
        if self.flavor == "unramified":
            if v % 2:
                return None
            target = xu
            y = LocalElem.const(K, next(c for c in K.units() if K.norm(c) == xu.leading()))
            base = LocalElem.uniformizer(K, v // 2)
        else:
            # t = Nm(s) / (-u), so x = Nm(s^v) (-u)^(-v) xu
            mu = LocalElem.const(F, F.pow(F.neg(self.u), -v))
            target = xu * mu
            r0 = target.leading()
            if not F.is_square(r0):
                return None
            root = next(c for c in F.units() if F.mul(c, c) == r0)
            y = LocalElem.const(F, root)
            base = LocalElem.uniformizer(F, v)
        for j in range(1, depth):
            ratio = target / self.norm(y)
            d = ratio.coeff(j) if ratio.start <= j else 0
            if d == 0:
                continue
            if self.flavor == "unramified":
                c = next(c for c in K.elements() if K.trace(c) == d)
                y = y * (LocalElem.one(K) + LocalElem(K, j, (c,)))
            else:
                c = F.mul(d, F.inv(F.mul(F.add(1, 1), F.pow(self.u, j))))
                y = y * (LocalElem.one(F) + LocalElem(F, 2 * j, (c,)))
        y = y.exact_lift() * base
        check = self.norm(y) / x.exact_lift() if x.prec is None else self.norm(y) / x
        assert all(check.coeff(i) == (1 if i == 0 else 0) for i in range(0, depth)), "norm lift failed"
        return y

    def describe(self):
        d = {"q": self.q, "flavor": self.flavor}
        if self.flavor == "ramified":
            d["s_squared_unit"] = f"g^{self.F.log(self.u)}"
        if self.tau is not None:
            d["artin_schreier_tau"] = f"g^{self.F.log(self.tau)}"
        return d


def _halve(F, z):
    h = F.inv(F.add(1, 1))
    return LocalElem(z.field, z.start, [F.mul(c, h) for c in z.coeffs], z.prec)


def eta_character(E):
    """The quadratic character of E/F as a callable on F^x."""
    return E.eta
