"""Matrix models: GL2 over F or E, Hermitian matrices, quaternion units,
invariant maps, singular-set tests, the Cartan coordinate and the
upper-half-plane metric."""

from __future__ import annotations

import math

from .errors import NonRegularX, PointOnBoundary, SingularElement
from .laurent import LocalElem
from .quad_ext import QuadExt, SplitElem
from .values import Value


class Mat2:
    """A 2x2 matrix [[a, b], [c, d]] over a ring of LocalElem or SplitElem."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d):
        self.a, self.b, self.c, self.d = a, b, c, d

    def det(self):
        return self.a * self.d - self.b * self.c

    def __mul__(self, o):
        if isinstance(o, Mat2):
            return Mat2(self.a * o.a + self.b * o.c, self.a * o.b + self.b * o.d,
                        self.c * o.a + self.d * o.c, self.c * o.b + self.d * o.d)
        return Mat2(self.a * o, self.b * o, self.c * o, self.d * o)

    def __rmul__(self, o):
        return Mat2(o * self.a, o * self.b, o * self.c, o * self.d)

    def __add__(self, o):
        return Mat2(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)

    def __sub__(self, o):
        return Mat2(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)

    def inv(self):
        dt = self.det()
        di = dt.inv() if hasattr(dt, "inv") else 1 / dt
        return Mat2(self.d * di, -self.b * di, -self.c * di, self.a * di)

    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def map(self, fn):
        return Mat2(*(fn(x) for x in self.entries()))

    def transpose(self):
        return Mat2(self.a, self.c, self.b, self.d)

    def __eq__(self, o):
        return isinstance(o, Mat2) and all(x == y for x, y in zip(self.entries(), o.entries()))

    __hash__ = None

    def __repr__(self):
        return "Mat2[" + ", ".join(_short(x) for x in self.entries()) + "]"


def _short(x):
    return x.render() if isinstance(x, LocalElem) else repr(x)


def identity(field):
    o, z = LocalElem.one(field), LocalElem.zero(field)
    return Mat2(o, z, z, o)


def w_matrix(field):
    o, z = LocalElem.one(field), LocalElem.zero(field)
    return Mat2(z, o, o, z)


def diag(x, y):
    z = x * 0
    return Mat2(x, z, z, y)


# ---------------------------------------------------------------- Hermitian

class HermMat:
    """[[a, b], [conj(b), d]] with a, d in F and b in E."""

    def __init__(self, E: QuadExt, a, b, d):
        self.E, self.a, self.b, self.d = E, a, b, d

    @classmethod
    def gamma(cls, E, x):
        """The orbit representative [[x, 1], [1, 1]]."""
        F = E.F
        return cls(E, x, E.one(), LocalElem.one(F))

    def matrix(self):
        E = self.E
        return Mat2(E.embed(self.a), self.b, E.conj(self.b), E.embed(self.d))

    def det(self):
        return self.a * self.d - self.E.norm(self.b)

    def act(self, a, z):
        """(a, z) . s = diag(a, 1) s diag(conj(a), 1) z."""
        E = self.E
        return HermMat(E, self.a * E.norm(a) * z, self.b * a * E.embed(z), self.d * z)

    def inv(self):
        nb = self.E.norm(self.b)
        if nb.is_zero_up_to_prec():
            raise SingularElement("off-diagonal entry vanishes")
        return (self.a * self.d) / nb

    def is_hermitian(self):
        m = self.matrix()
        E = self.E
        return m.b == E.conj(m.c) and E.conj(m.a) == m.a and E.conj(m.d) == m.d


# ---------------------------------------------------------------- quaternions

class QuatElem:
    """A + B j in the quaternion algebra (E, eps / F): j z = conj(z) j, j^2 = eps."""

    def __init__(self, E: QuadExt, eps, A, B):
        self.E, self.eps, self.A, self.B = E, eps, A, B

    @classmethod
    def delta(cls, E, x, eps=None, b=None, depth=8):
        """1 + b j with eps Nm(b) = x (b from the constructive norm preimage)."""
        F = E.F
        eps = LocalElem.one(F) if eps is None else eps
        if b is None:
            b = E.norm_preimage(x / eps if not (eps == 1) else x, depth)
            if b is None:
                raise NonRegularX("x is not in eps * Nm(E^x)")
        return cls(E, eps, E.one(), b)

    def matrix(self):
        E = self.E
        return Mat2(self.A, self.B * E.embed(self.eps), E.conj(self.B), E.conj(self.A))

    def __mul__(self, o):
        E = self.E
        if not isinstance(o, QuatElem):
            # an element of E acting on the right
            return QuatElem(E, self.eps, self.A * o, self.B * E.conj(o))
        A = self.A * o.A + E.embed(self.eps) * self.B * E.conj(o.B)
        B = self.A * o.B + self.B * E.conj(o.A)
        return QuatElem(E, self.eps, A, B)

    def left(self, h):
        """h * self for h in E (the torus)."""
        return QuatElem(self.E, self.eps, h * self.A, h * self.B)

    def det(self):
        E = self.E
        return E.norm(self.A) - self.eps * E.norm(self.B)

    def inv(self):
        nA = self.E.norm(self.A)
        if nA.is_zero_up_to_prec():
            raise SingularElement("torus part vanishes")
        return self.eps * self.E.norm(self.B) / nA

    def inv_prime(self):
        nb = self.E.norm(self.B)
        if nb.is_zero_up_to_prec() or self.A.is_zero_up_to_prec():
            raise SingularElement("element is not regular")
        return self.eps * nb / self.det()

    def to_gl2F(self):
        """Image in GL2(F) under the fixed identification (eps = 1, unramified)."""
        E = self.E
        a0, a1 = E.parts(self.A)
        b0, b1 = E.parts(self.B)
        return torus_matrix(E, a0, a1) + torus_matrix(E, b0, b1) * j_matrix(E)


def torus_matrix(E, a, b):
    """Image of a + b w in GL2(F): [[a, b], [b u, a]] or [[a, b], [b tau, a + b]]."""
    F = E.F
    if E.flavor != "unramified":
        raise ValueError("the fixed GL2(F) model is set up for the unramified flavor")
    if F.p == 2:
        tau = LocalElem.const(F, E.tau)
        return Mat2(a, b, b * tau, a + b)
    u = LocalElem.const(F, E.K.w_sq[0])
    return Mat2(a, b, b * u, a)


def j_matrix(E):
    F = E.F
    o, z = LocalElem.one(F), LocalElem.zero(F)
    if F.p == 2:
        return Mat2(o, z, o, o)
    return Mat2(o, z, z, -o)


def decompose_gl2F(E, g: Mat2):
    """Write g = M(A) + M(B) J and return the quaternion A + B j (eps = 1)."""
    F = E.F
    al, be, ga, de = g.entries()
    if F.p == 2:
        tau = LocalElem.const(F, E.tau)
        s = ga + tau * be  # b0 + b1
        a0 = al + s
        a1 = de + al
        b1 = be + a1
        b0 = s + b1
    else:
        h = LocalElem.const(F, F.inv(F.add(1, 1)))
        u = LocalElem.const(F, E.K.w_sq[0])
        a0 = (al + de) * h
        b0 = (al - de) * h
        a1 = (be + ga / u) * h
        b1 = (ga / u - be) * h
    return QuatElem(E, LocalElem.one(F), E.make(a0, a1), E.make(b0, b1))


def inv_prime_gl2(E, g: Mat2):
    """inv' of g in GL2(F) relative to the embedded torus: Nm(B)/det g."""
    q = decompose_gl2F(E, g)
    nb = E.norm(q.B)
    if nb.is_zero_up_to_prec() or q.A.is_zero_up_to_prec():
        raise SingularElement("element is not regular for the torus")
    return nb / g.det()


# ---------------------------------------------------------------- invariants

def inv_maps(g):
    """(inv, inv') for a HermMat or QuatElem."""
    if isinstance(g, HermMat):
        i = g.inv()
        if i.is_zero_up_to_prec():
            raise SingularElement("inv vanishes")
    elif isinstance(g, QuatElem):
        if g.B.is_zero_up_to_prec() or g.A.is_zero_up_to_prec():
            raise SingularElement("element is not regular")
        i = g.inv()
    else:
        raise TypeError(type(g).__name__)
    one_minus = 1 - i
    if one_minus.is_zero_up_to_prec():
        raise SingularElement("inv equals 1")
    return i, i / one_minus


def gw_membership(E: QuadExt, s: HermMat) -> bool:
    """True iff s lies in the G-orbit of w, i.e. -det(s) is a norm."""
    return E.norm_membership(-s.det())


def singular_test(g):
    """'regular' or the name of the singular piece containing g."""
    if isinstance(g, QuatElem):
        if g.B.is_zero_up_to_prec():
            return "torus"
        if g.A.is_zero_up_to_prec():
            return "anti-torus"
        return "regular"
    if isinstance(g, HermMat):
        m = g.matrix()
    elif isinstance(g, Mat2):
        m = g
    else:
        raise TypeError(type(g).__name__)
    a, b, c, d = m.entries()
    zero = [_is0(x) for x in (a, b, c, d)]
    if zero[1] and zero[2]:
        return "torus"
    if zero[2]:
        return "C"
    if zero[1]:
        return "wCw"
    if zero[0]:
        return "wC"
    if zero[3]:
        return "Cw"
    if _is0(m.det()):
        return "non-invertible"
    return "regular"


def _is0(x):
    if isinstance(x, SplitElem):
        return x.a.is_zero_up_to_prec() or x.b.is_zero_up_to_prec()
    return x.is_zero_up_to_prec()


# ---------------------------------------------------------------- Cartan data

def elementary_divisors(g: Mat2):
    """Valuations (d1, d2), d1 <= d2, of the Smith form of g over O_F.

    Row and column reduction with a pivot of least valuation.
    """
    m = [[g.a, g.b], [g.c, g.d]]
    cells = [(i, j) for i in range(2) for j in range(2) if not m[i][j].is_zero_up_to_prec()]
    if not cells:
        raise SingularElement("zero matrix")
    i, j = min(cells, key=lambda ij: m[ij[0]][ij[1]].val)
    # move the pivot to (0, 0)
    if i:
        m = [m[1], m[0]]
    if j:
        m = [[r[1], r[0]] for r in m]
    piv = m[0][0]
    # after clearing the pivot's column the remaining entry carries d2
    f_row = m[1][0] / piv
    rest = m[1][1] - f_row * m[0][1]
    d1 = piv.val
    d2 = rest.val
    return d1, d2


def cartan_coordinate(g: Mat2) -> int:
    """c with g in T_1 h_c K_1 for the unramified torus: d2 - d1."""
    d1, d2 = elementary_divisors(g)
    return d2 - d1


def hermite_cosets(F, m, prec_margin=0):
    """Representatives [[t^a, y], [0, t^b]] of the K-cosets g K with g integral, v(det) = m."""
    from itertools import product

    out = []
    for a in range(m + 1):
        b = m - a
        for ds in product(range(F.order), repeat=b):
            y = LocalElem(F, 0, ds) if ds else LocalElem.zero(F)
            out.append(Mat2(LocalElem.uniformizer(F, a), y, LocalElem.zero(F), LocalElem.uniformizer(F, b)))
    return out


# ---------------------------------------------------------------- half plane

class HalfPlanePoint:
    """A point z of E outside F, with |z|_i = |z1| for z = z0 + z1 w."""

    def __init__(self, E: QuadExt, z):
        if E.flavor != "unramified":
            raise ValueError("half-plane points are set up for the unramified flavor")
        self.E, self.z = E, z
        _, z1 = E.parts(z)
        if z1.is_zero_up_to_prec():
            raise PointOnBoundary("point lies on F")
        self.imag_val = z1.val

    def moved(self, g: Mat2):
        """Mobius action (a z + b) / (c z + d) of g in GL2(F)."""
        E = self.E
        a, b, c, d = (E.embed(x) for x in g.entries())
        return HalfPlanePoint(E, (a * self.z + b) / (c * self.z + d))

    def imag_val_bruteforce(self, M=3):
        """max over a in t^-M O / t^M of v(z - a); the tail bound makes larger |a| irrelevant."""
        from itertools import product

        E, F = self.E, self.E.F
        best = -math.inf
        lo = min(-M, self.z.val)
        for ds in product(range(F.order), repeat=M - lo):
            a = LocalElem(F, lo, ds)
            diff = self.z - E.embed(a)
            if not diff.is_zero_up_to_prec():
                best = max(best, diff.val)
        return best


def hyperbolic_distance(z1: HalfPlanePoint, z2: HalfPlanePoint) -> Value:
    """|z1 - z2|^2 / (|z1|_i |z2|_i) as an exact power of q."""
    diff = z1.z - z2.z
    q = z1.E.q
    if diff.is_zero_up_to_prec():
        return Value.zero(q)
    n = 2 * diff.val - z1.imag_val - z2.imag_val
    return Value.q_power(q, -2 * n)


def torus_fixed_point(E: QuadExt) -> HalfPlanePoint:
    """The fixed point of the embedded torus: 1/w."""
    w = E.generator()
    return HalfPlanePoint(E, LocalElem.one(E.K) / w)
