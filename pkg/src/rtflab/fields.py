"""Finite fields coded as small integers with precomputed tables.

An element of F_q (q = p^k) is an integer in [0, q) whose base-p digits are
the coefficients of a polynomial modulo a fixed irreducible of degree k.
A quadratic extension F_{q^2} is coded as x0 + q*x1 meaning x0 + x1*w.
Elements of the base field keep their codes inside the extension.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product

import numpy as np

from .errors import BudgetExceeded, ConfigError

MAX_FIELD_ORDER = 64


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def prime_power(q: int) -> tuple[int, int]:
    """Return (p, k) with q = p**k, or raise ConfigError."""
    if q < 2:
        raise ConfigError(f"q={q} is not a prime power")
    p = 2
    while q % p:
        p += 1
    k, r = 0, q
    while r % p == 0:
        r //= p
        k += 1
    if r != 1 or not _is_prime(p):
        raise ConfigError(f"q={q} is not a prime power")
    return p, k


class TableField:
    """A finite field given by addition and multiplication tables."""

    def __init__(self, p, order, add, mul, name):
        self.p = p
        self.order = order
        self.name = name
        self.add_t = np.asarray(add, dtype=np.int64)
        self.mul_t = np.asarray(mul, dtype=np.int64)
        self._add = [list(map(int, row)) for row in self.add_t]
        self._mul = [list(map(int, row)) for row in self.mul_t]
        self._neg = [self._add[x].index(0) for x in range(order)]
        self._inv = [0] * order
        for x in range(1, order):
            self._inv[x] = self._mul[x].index(1)
        self.neg_t = np.asarray(self._neg, dtype=np.int64)
        self.inv_t = np.asarray(self._inv, dtype=np.int64)
        self.generator = self._find_generator()
        self._log = [0] * order
        g = 1
        self._pow = []
        for e in range(order - 1):
            self._pow.append(g)
            self._log[g] = e
            g = self._mul[g][self.generator]

    # scalar arithmetic
    def add(self, a, b):
        return self._add[a][b]

    def sub(self, a, b):
        return self._add[a][self._neg[b]]

    def mul(self, a, b):
        return self._mul[a][b]

    def neg(self, a):
        return self._neg[a]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in a finite field")
        return self._inv[a]

    def pow(self, a, e):
        if a == 0:
            if e <= 0:
                raise ZeroDivisionError("0 to a non-positive power")
            return 0
        return self._pow[(self._log[a] * e) % (self.order - 1)]

    def log(self, a):
        """Discrete logarithm to the fixed generator."""
        if a == 0:
            raise ValueError("log of 0")
        return self._log[a]

    def gen_pow(self, j):
        return self._pow[j % (self.order - 1)]

    def is_square(self, a):
        if a == 0:
            return True
        if self.p == 2:
            return True
        return self._log[a] % 2 == 0

    def elements(self):
        return range(self.order)

    def units(self):
        return range(1, self.order)

    def _find_generator(self):
        n = self.order - 1
        if n == 1:
            return 1
        primes = [d for d in range(2, n + 1) if n % d == 0 and _is_prime(d)]
        for g in range(2, self.order):
            if all(self._power_plain(g, n // r) != 1 for r in primes):
                return g
        raise ConfigError("no generator found")

    def _power_plain(self, a, e):
        r = 1
        for _ in range(e):
            r = self._mul[r][a]
        return r

    def __repr__(self):
        return f"TableField({self.name})"


class FqField(TableField):
    """The residue field F_q, q = p^k <= MAX_FIELD_ORDER."""

    def __init__(self, q, bound=MAX_FIELD_ORDER):
        if q > bound:
            raise BudgetExceeded(f"q={q} exceeds the residue-field bound {bound}")
        p, k = prime_power(q)
        self.k = k
        self.q = q
        modulus = _irreducible(p, k)
        self.modulus = modulus
        add = [[_vec_add(a, b, p, k) for b in range(q)] for a in range(q)]
        mul = [[_poly_mul_mod(a, b, p, k, modulus) for b in range(q)] for a in range(q)]
        super().__init__(p, q, add, mul, f"F_{q}")
        self._trace = [self._trace_of(x) for x in range(q)]
        self.trace_t = np.asarray(self._trace, dtype=np.int64)
        self.nonsquare = next((x for x in self.units() if not self.is_square(x)), None)

    def from_int(self, n):
        """Image of the integer n (its residue mod p)."""
        return n % self.p

    def trace(self, a):
        """Absolute trace to F_p, as an integer in [0, p)."""
        return self._trace[a]

    def _trace_of(self, a):
        s, y = 0, a
        for _ in range(self.k):
            s = self._add[s][y]
            y = self.pow(y, self.p) if y else 0
        return s  # prime-field elements are coded 0..p-1


@lru_cache(maxsize=None)
def residue_field(q):
    return FqField(q)


def _digits(a, p, k):
    return [(a // p**i) % p for i in range(k)]


def _undigits(ds, p):
    return sum(d * p**i for i, d in enumerate(ds))


def _vec_add(a, b, p, k):
    return _undigits([(x + y) % p for x, y in zip(_digits(a, p, k), _digits(b, p, k))], p)


def _poly_mul_mod(a, b, p, k, modulus):
    da, db = _digits(a, p, k), _digits(b, p, k)
    prod = [0] * (2 * k - 1)
    for i, x in enumerate(da):
        for j, y in enumerate(db):
            prod[i + j] = (prod[i + j] + x * y) % p
    # modulus is monic of degree k, given as its k low coefficients
    for d in range(2 * k - 2, k - 1, -1):
        c = prod[d]
        if c:
            prod[d] = 0
            for i in range(k):
                prod[d - k + i] = (prod[d - k + i] - c * modulus[i]) % p
    return _undigits(prod[:k], p)


def _irreducible(p, k):
    """Low coefficients of a monic irreducible polynomial of degree k over F_p."""
    if k == 1:
        return (0,)
    for low in product(range(p), repeat=k):
        if low[0] == 0:
            continue
        if _poly_is_irreducible(list(low) + [1], p):
            return low
    raise ConfigError(f"no irreducible polynomial of degree {k} over F_{p}")


def _poly_is_irreducible(f, p):
    k = len(f) - 1
    # trial division by every monic polynomial of degree <= k/2
    for d in range(1, k // 2 + 1):
        for low in product(range(p), repeat=d):
            g = list(low) + [1]
            if _poly_rem(f, g, p) == [0] * d:
                return False
    return True


def _poly_rem(f, g, p):
    f = list(f)
    dg = len(g) - 1
    for i in range(len(f) - 1, dg - 1, -1):
        c = f[i]
        if c:
            for j in range(dg + 1):
                f[i - dg + j] = (f[i - dg + j] - c * g[j]) % p
    return f[:dg]


class QuadResidueField(TableField):
    """F_{q^2} = F_q[w] coded as x0 + q*x1.

    For odd p, w^2 = u with u the least non-square; for p = 2, w^2 = w + tau
    with X^2 + X + tau irreducible (w is the Artin-Schreier root).
    """

    def __init__(self, base: FqField):
        self.base = base
        q = base.order
        if base.p == 2:
            tau = next(t for t in base.units()
                       if all(base.add(base.add(base.mul(x, x), x), t) != 0 for x in base.elements()))
            self.tau = tau
            self.w_sq = (tau, 1)  # w^2 = tau + 1*w
        else:
            self.tau = None
            self.w_sq = (base.nonsquare, 0)
        c0, c1 = self.w_sq
        B = base

        def mul(a, b):
            a0, a1 = a % q, a // q
            b0, b1 = b % q, b // q
            hi = B.mul(a1, b1)
            r0 = B.add(B.mul(a0, b0), B.mul(hi, c0))
            r1 = B.add(B.add(B.mul(a0, b1), B.mul(a1, b0)), B.mul(hi, c1))
            return r0 + q * r1

        def add(a, b):
            return B.add(a % q, b % q) + q * B.add(a // q, b // q)

        n = q * q
        super().__init__(base.p, n, [[add(a, b) for b in range(n)] for a in range(n)],
                         [[mul(a, b) for b in range(n)] for a in range(n)], f"F_{q}^2")
        self._conj = [self.pow(x, q) if x else 0 for x in range(n)]
        self.conj_t = np.asarray(self._conj, dtype=np.int64)
        self.w = q  # code of w

    def conj(self, a):
        return self._conj[a]

    def norm(self, a):
        return self.mul(a, self._conj[a])

    def trace(self, a):
        return self.add(a, self._conj[a])

    def make(self, x0, x1):
        return x0 + self.base.order * x1

    def parts(self, a):
        q = self.base.order
        return a % q, a // q


@lru_cache(maxsize=None)
def quad_residue_field(q):
    return QuadResidueField(residue_field(q))
