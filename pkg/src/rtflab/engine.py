"""Exact evaluation of orbital integrals.

Hermitian side (with the s-variable, as a Laurent polynomial in T = q_E^{-s}):

    O(s, gamma, Phi) = int_{F^x} int_{E^x} Phi((a, z) . gamma) eta(z) omega^{-1}(z) Omega^{-1}(a) |a|_E^s

Quaternion side (constant in T):

    O(delta, f) = int_{T/Z} int_T f(h1^{-1} delta h2) Omega(h1) Omega^{-1}(h2)

and the split analogues.  Every integral is a finite sum over valuation
shells, each shell being either evaluated from exact valuations (fast path,
when the integrand only sees valuations or an explicit coset computation
applies) or enumerated over unit classes mod 1 + p^N with batched series
arithmetic (brute force).  Shell boxes come from the test function's support
and a guard band around the box is checked to vanish.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .batch import SeriesBatch, Undecidable
from .characters import MeasureContext, unit_digit_array
from .errors import BudgetExceeded, ConfigError, NonRegularX, SingularDelta
from .geometry import HermMat, Mat2, QuatElem
from .laurent import LocalElem
from .quad_ext import QuadExt
from .testfns import KepsM, KepsMZ, KlxiN, KlxiNPrime, MatView
from .values import LogValue, Value, derivative_at_zero

OrbitalValue = Value

MAX_DEPTH = 6
ROW_BUDGET = 3_000_000


class EvalContext:
    """Evaluation settings shared by all orbital integrals.

    ``omega_power`` fixes omega^{-1}(t) = xi^omega_power on F^x; 1 means omega is
    the restriction of Omega.  ``strategy`` is "auto", "fast" or "brute".
    """

    def __init__(self, E: QuadExt, c_psi=0, omega_power=1, strategy="auto", depth=None,
                 guard=2, check_stability=False, max_depth=MAX_DEPTH):
        if strategy not in ("auto", "fast", "brute"):
            raise ConfigError(f"unknown strategy {strategy!r}")
        self.E = E
        self.measure = MeasureContext(E.q, c_psi, E.flavor)
        self.omega_power = omega_power
        self.strategy = strategy
        self.depth = depth
        self.guard = guard
        self.check_stability = check_stability
        self.max_depth = max_depth

    def with_strategy(self, strategy):
        return EvalContext(self.E, self.measure.c_psi, self.omega_power, strategy, self.depth,
                           self.guard, self.check_stability, self.max_depth)

    def describe(self):
        d = dict(self.measure.describe())
        d["omega_convention"] = {1: "restriction", 0: "trivial", 2: "norm"}.get(self.omega_power,
                                                                               str(self.omega_power))
        d["strategy"] = self.strategy
        return d


# ------------------------------------------------------------------ batches over E

class _Model:
    """Digit-array helpers for E (entries) and F (scalars)."""

    def __init__(self, E: QuadExt):
        self.E = E
        self.F = E.F
        self.K = E.K
        self.e = E.e
        self.q = E.q
        F = self.F
        if E.flavor == "ramified":
            leg = np.array([0] + [1 if F.is_square(c) else -1 for c in range(1, F.order)], dtype=np.int64)
            self.eta_unit_table = leg
            self.eta_unif = 1 if F.is_square(F.neg(E.u)) else -1
            uinv = F.inv(E.u)
            self._uinv_pows = [F.pow(uinv, k % (F.order - 1)) for k in range(F.order - 1)]
        elif E.flavor == "unramified":
            self.eta_unit_table = np.ones(F.order, dtype=np.int64)
            self.eta_unif = -1
        else:
            self.eta_unit_table = np.ones(F.order, dtype=np.int64)
            self.eta_unif = 1

    def units_E(self, shift, NE):
        return SeriesBatch.from_units(self.K, unit_digit_array(self.K.order, NE), shift)

    def units_F(self, shift, N):
        return SeriesBatch.from_units(self.F, unit_digit_array(self.q, N), shift)

    def const_E(self, z):
        return SeriesBatch.constant(z, field=self.K)

    def const_F(self, x):
        return self.const_E(self.E.embed(x))

    def embed(self, Z):
        """F-batch -> E-batch."""
        if self.E.flavor != "ramified":
            return SeriesBatch(self.K, Z.lo, Z.hi, Z.D)
        F = self.F
        n, w = Z.D.shape
        out = np.zeros((n, 2 * w), dtype=np.int64)
        for i in range(w):
            k = Z.lo + i
            out[:, 2 * i] = F.mul_t[Z.D[:, i], self._uinv_pows[k % (F.order - 1)]]
        return SeriesBatch(F, 2 * Z.lo, 2 * Z.hi, out)

    def conj(self, X):
        if self.E.flavor == "unramified":
            return X.map_digits(self.K.conj_t)
        if self.E.flavor == "ramified":
            D = X.D.copy()
            odd = [(X.lo + i) % 2 == 1 for i in range(D.shape[1])]
            if any(odd):
                idx = np.nonzero(odd)[0]
                D[:, idx] = self.F.neg_t[D[:, idx]]
            return SeriesBatch(X.field, X.lo, X.hi, D)
        return X

    def parts(self, X):
        """(a0, a1) F-batches with X = a0 + a1 w (unramified)."""
        q = self.q
        return (SeriesBatch(self.F, X.lo, X.hi, X.D % q), SeriesBatch(self.F, X.lo, X.hi, X.D // q))

    def as_F(self, X):
        """Reinterpret an E-batch whose digits lie in F (unramified codes)."""
        return SeriesBatch(self.F, X.lo, X.hi, X.D)

    def eta_units(self, digits):
        return self.eta_unit_table[digits[:, 0]]


def _view(model, e11, e12, e21, e22, det, gl2f=None):
    v = MatView(e11, e12, e21, e22, det, model.e, model.const_F, gl2f)
    v.ext = model.E
    return v


def _eta_unif(E):
    """eta(t)."""
    if E.flavor == "unramified":
        return -1
    if E.flavor == "ramified":
        return 1 if E.F.is_square(E.F.neg(E.u)) else -1
    return 1


def _mean_eta_is_zero(E):
    return E.flavor == "ramified"


# ------------------------------------------------------------------ depth control

def _initial_depth(fn, ctx, valuation_only):
    if ctx.depth is not None:
        return ctx.depth
    return 1 if valuation_only else max(1, fn.depth_hint())


def _adaptive(fn, ctx, compute, valuation_only=False):
    """Run compute(N) from a starting depth, deepening on Undecidable."""
    N = _initial_depth(fn, ctx, valuation_only)
    while True:
        try:
            val = compute(N)
            break
        except Undecidable:
            N += 1
            if N > ctx.max_depth:
                raise BudgetExceeded(f"membership still undecidable at depth {ctx.max_depth}")
    if ctx.check_stability:
        again = compute(N + 2)
        if again != val:
            raise AssertionError(f"value changed between depth {N} and {N + 2}: "
                                 f"{val.render()} vs {again.render()}")
    return val


def _check_rows(n):
    if n > ROW_BUDGET:
        raise BudgetExceeded(f"{n} rows per shell exceed the budget {ROW_BUDGET}")


# ------------------------------------------------------------------ Hermitian side

def _as_hermitian(E, gamma_or_x):
    if isinstance(gamma_or_x, HermMat):
        g = gamma_or_x
        if g.b.is_zero_up_to_prec() or g.a.is_zero_up_to_prec() or g.d.is_zero_up_to_prec():
            raise NonRegularX("Hermitian element is not regular")
        if g.det().is_zero_up_to_prec():
            raise NonRegularX("Hermitian element is singular")
        return g
    x = gamma_or_x
    if x.is_zero_up_to_prec():
        raise NonRegularX("x = 0 is not regular")
    if (x - 1).is_zero_up_to_prec():
        raise NonRegularX("x = 1 is not regular")
    return HermMat.gamma(E, x)


def _s_shells(fn, g, e, extra):
    """(inner shell set, box) for the (v_E(a), v_F(z)) lattice."""
    sup = fn.support()
    if not sup.integral:
        raise ConfigError(f"{fn.label()} has no integrality bound")
    va, vb, vd = g.a.val, g.b.val, g.d.val
    vdet = g.det().val
    inner = set()
    for d in range(sup.det_lo, sup.det_hi + 1):
        for c in range(-vd, d - vdet + va + 1):
            num = e * (d - 2 * c - vdet)
            if num % 2:
                continue
            i = num // 2
            if e * c + i + vb < 0 or e * c + 2 * i + e * va < 0:
                continue
            inner.add((i, c))
    box = set(inner)
    if extra and inner:
        is_ = [i for i, _ in inner]
        cs = [c for _, c in inner]
        for i in range(min(is_) - extra, max(is_) + extra + 1):
            for c in range(min(cs) - extra, max(cs) + extra + 1):
                box.add((i, c))
    return inner, sorted(box)


def _s_weight(ctx, i, c):
    E, ms = ctx.E, ctx.measure
    e = E.e
    xi = Fraction(i, e) + ctx.omega_power * c
    sign = _eta_unif(E) ** (c % 2)
    return Value.mono(E.q, sign, tpow=i, xi=xi) * ms.vol_OE() * ms.vol_OF()


def _s_fast_valuations(fn, g, ctx):
    E = ctx.E
    if _mean_eta_is_zero(E):
        return Value.zero(E.q)
    e = E.e
    inner, _ = _s_shells(fn, g, e, 0)
    va, vb, vd = g.a.val, g.b.val, g.d.val
    vdet = g.det().val
    total = Value.zero(E.q)
    for i, c in sorted(inner):
        vals = (e * c + 2 * i + e * va, e * c + i + vb, e * c + i + vb, e * c + e * vd)
        vd_F = 2 * c + (2 * i) // e + vdet
        if fn.member_vals(vals, vd_F):
            total = total + _s_weight(ctx, i, c)
    return total


def _s_brute_shell(fn, g, ctx, model, i, c, N):
    E = ctx.E
    e = E.e
    NE = e * N
    A = model.units_E(i, NE)
    Z = model.units_F(c, N)
    nE, nF = A.n, Z.n
    _check_rows(nE * nF)
    a = A.repeat(nF)
    z = model.embed(Z).tile(nE)
    ab = model.conj(a)
    Na = a * ab
    e11 = z * Na * model.const_F(g.a)
    e12 = z * a * model.const_E(g.b)
    e21 = z * ab * model.const_E(E.conj(g.b))
    e22 = z * model.const_F(g.d)
    det = z * z * Na * model.const_F(g.det())
    mask = fn.member(_view(model, e11, e12, e21, e22, det))
    eta = np.tile(model.eta_units(Z.D), nE)
    s = int((mask * eta).sum())
    return Fraction(s, nE * nF)


def _s_brute(fn, g, ctx):
    E = ctx.E
    model = _Model(E)
    inner, box = _s_shells(fn, g, E.e, ctx.guard)

    def compute(N):
        total = Value.zero(E.q)
        for i, c in box:
            frac = _s_brute_shell(fn, g, ctx, model, i, c, N)
            if (i, c) not in inner:
                if frac:
                    raise AssertionError(f"guard shell {(i, c)} does not vanish for {fn.label()}")
                continue
            if frac:
                total = total + _s_weight(ctx, i, c) * frac
        return total

    return _adaptive(fn, ctx, compute)


def _s_reduce(g, E, ctx):
    """gamma = (a0, z0) . gamma(x): returns (x, prefactor) with O(gamma) = prefactor * O(x)."""
    z0 = g.d
    a0 = g.b / E.embed(z0)
    x = g.inv()
    e = E.e
    va0 = a0.val
    vz0 = z0.val
    xi = Fraction(-va0, e) - ctx.omega_power * vz0
    pref = Value.mono(E.q, E.eta(z0), tpow=-va0, xi=xi)
    return x, pref


def _s_fast_klxin(fn, g, ctx):
    """Coset computation for the congruence families; None when outside its hypotheses."""
    E, ms = ctx.E, ctx.measure
    if E.flavor == "split":
        return None
    e = E.e
    tr = E.trace(fn.xi)
    if tr.is_zero_up_to_prec():
        return None
    vtr = tr.val
    L = -(-fn.l // 2) if E.flavor == "ramified" else fn.l
    if fn.n < 1 or L - vtr < 1:
        return None
    x, pref = _s_reduce(g, E, ctx)
    vx = x.val
    if e * vx < fn.n + e * vtr:
        return Value.zero(E.q)
    vol = ms.vol_mult_ball_E(fn.n) * ms.vol_mult_ball_F(L - vtr)
    if isinstance(fn, KlxiN):
        vz = vx - vtr
        sign = E.eta(-(x * tr))
    else:
        vz = vtr
        sign = E.eta(-tr)
    core = Value.mono(E.q, sign, tpow=-e * vz, xi=(ctx.omega_power - 1) * vz) * vol
    return pref * core


def _s_basic(fn, g, ctx):
    strategy = ctx.strategy
    if strategy != "brute":
        if fn.valuation_only():
            return _s_fast_valuations(fn, g, ctx)
        if isinstance(fn, (KlxiN, KlxiNPrime)):
            v = _s_fast_klxin(fn, g, ctx)
            if v is not None:
                return v
    return _s_brute(fn, g, ctx)


def eval_orbital_S(phi, gamma_or_x, ctx: EvalContext) -> Value:
    """O(s, x, Phi) as a Laurent polynomial in T with coefficients in Q[xi^{1/2}, sqrt(q)]."""
    E = ctx.E
    if E.flavor == "split":
        return eval_orbital_split("S", phi, gamma_or_x, ctx)
    g = _as_hermitian(E, gamma_or_x)
    total = Value.zero(E.q)
    for coef, fn in phi.terms():
        total = total + _s_basic(fn, g, ctx) * coef
    return total


# ------------------------------------------------------------------ quaternion side

def _as_quaternion(E, delta_or_x, eps=None):
    if isinstance(delta_or_x, QuatElem):
        d = delta_or_x
    else:
        x = delta_or_x
        if x.is_zero_up_to_prec() or (x - 1).is_zero_up_to_prec():
            raise NonRegularX("x must lie outside {0, 1}")
        d = QuatElem.delta(E, x, eps=eps, depth=12)
    if d.A.is_zero_up_to_prec() or d.B.is_zero_up_to_prec():
        raise SingularDelta("delta is not regular")
    if d.det().is_zero_up_to_prec():
        raise SingularDelta("delta is not invertible")
    return d


def _g_scalar_mat(d, k):
    """t^k times the GL2(F)-model matrix of d."""
    m = d.to_gl2F()
    F = d.E.F
    t = LocalElem.uniformizer(F, k)
    return Mat2(*(x * t for x in m.entries()))


def _g_fast_bi_k(fn, d, ctx):
    """f bi-invariant under K_1: sum over k of xi^k f(t^k delta)."""
    E, ms = ctx.E, ctx.measure
    sup = fn.support()
    vdet = d.det().val
    total = Value.zero(E.q)
    for dd in range(sup.det_lo, sup.det_hi + 1):
        if (dd - vdet) % 2:
            continue
        k = (dd - vdet) // 2
        g = _g_scalar_mat(d, k)
        if fn.member_mat(g):
            total = total + Value.mono(E.q, 1, xi=k)
    return total * ms.vol_torus_quotient() * ms.vol_OE()


def _g_fast_keps(fn, d, ctx):
    E, ms = ctx.E, ctx.measure
    e = E.e
    b = d.B / d.A
    vb = b.val
    veps = e * d.eps.val
    vA = d.A.val
    base = Value.mono(E.q, 1, xi=Fraction(-vA, e)) * ms.vol_torus_quotient()
    m = fn.m
    if m >= 1:
        if vb >= m and vb + veps >= m:
            return base * ms.vol_mult_ball_E(m)
        return Value.zero(E.q)
    det1 = 1 - d.eps * E.norm(b)
    num = -e * det1.val
    if num % 2:
        return Value.zero(E.q)
    k = num // 2
    if k >= 0 and k + vb >= 0 and k + vb + veps >= 0:
        return base * ms.vol_OE() * Value.mono(E.q, 1, xi=Fraction(k, e))
    return Value.zero(E.q)


def _g_shells(fn, d, e, extra):
    sup = fn.support()
    if not sup.integral:
        raise ConfigError(f"{fn.label()} has no integrality bound")
    vdet = d.det().val
    vA, vB = d.A.val, d.B.val
    veps = e * d.eps.val
    avals = (0, 1) if e == 2 else (0,)
    inner, box = set(), set()
    for a in avals:
        for dd in range(sup.det_lo - extra, sup.det_hi + extra + 1):
            num = e * (dd - vdet)
            if num % 2:
                continue
            k = a + num // 2
            box.add((a, k))
            if sup.det_lo <= dd <= sup.det_hi and k - a + vA >= 0 and k - a + vB >= 0 \
                    and k - a + vB + veps >= 0:
                inner.add((a, k))
    return inner, sorted(box)


def _g_gl2f(model, A, B):
    """The GL2(F)-model entries of A + B j (unramified, eps = 1)."""
    F = model.F
    a0, a1 = model.parts(A)
    b0, b1 = model.parts(B)
    if F.p == 2:
        tau = SeriesBatch.constant(LocalElem.const(F, model.E.tau))
        s = b0 + b1
        t = a1 + b1
        return (a0 + s, t, tau * t + s, a0 + a1 + s)
    u = SeriesBatch.constant(LocalElem.const(F, model.K.w_sq[0]))
    return (a0 + b0, a1 - b1, u * (a1 + b1), a0 - b0)


def _g_brute_shell(fn, d, ctx, model, a, k, N, shift_det=False):
    E = ctx.E
    NE = E.e * N
    al = model.units_E(a, NE)
    be = model.units_E(k, NE)
    n1, n2 = al.n, be.n
    _check_rows(n1 * n2)
    ai = al.inv_units().repeat(n2)
    b = be.tile(n1)
    bb = model.conj(b)
    A = ai * model.const_E(d.A) * b
    B = ai * model.const_E(d.B) * bb
    det = b * bb * ai * model.conj(ai) * model.const_F(d.det())
    eps_c = model.const_F(d.eps)
    e11, e12, e21, e22 = A, B * eps_c, model.conj(B), model.conj(A)
    if shift_det:
        # scale by t^{-v(det)/2} to land in the unit-determinant coset
        vd = d.det().val + (2 * (k - a)) // E.e
        if vd % 2:
            return Fraction(0)
        sh = -E.e * (vd // 2)
        e11, e12, e21, e22 = (_shift(x, sh) for x in (e11, e12, e21, e22))
        det = _shift(det, 2 * sh)

    def gl2():
        if E.flavor != "unramified" or not (d.eps == 1):
            raise ConfigError("the GL2(F) model needs an unramified E and eps = 1")
        g = _g_gl2f(model, A, B)
        v = MatView(*g, model.as_F(det), 1, lambda x: SeriesBatch.constant(x))
        v.ext = E
        return v

    mask = fn.member(_view(model, e11, e12, e21, e22, det, gl2f=gl2))
    return Fraction(int(mask.sum()), n1 * n2)


def _shift(X, k):
    return SeriesBatch(X.field, X.lo + k, X.hi + k, X.D)


def _g_brute(fn, d, ctx):
    E, ms = ctx.E, ctx.measure
    e = E.e
    model = _Model(E)
    inner, box = _g_shells(fn, d, e, ctx.guard)
    per = ms.vol_OE() / ms.vol_OF() * ms.vol_OE()

    def compute(N):
        total = Value.zero(E.q)
        for a, k in box:
            frac = _g_brute_shell(fn, d, ctx, model, a, k, N)
            if (a, k) not in inner:
                if frac:
                    raise AssertionError(f"guard shell {(a, k)} does not vanish for {fn.label()}")
                continue
            if frac:
                total = total + per * Value.mono(E.q, frac, xi=Fraction(k - a, e))
        return total

    return _adaptive(fn, ctx, compute)


def _xi0_volume(ms, m, e):
    if m == 0:
        return ms.vol_OF()
    return ms.vol_mult_ball_F(-(-m // e))


def _g_brute_xi(fn, d, ctx):
    """Xi-quotient: h2 runs over a fundamental domain of t^Z, xi specialised to 1."""
    E, ms = ctx.E, ctx.measure
    e = E.e
    model = _Model(E)
    base = fn.base()
    vals = (0, 1) if e == 2 else (0,)
    per = ms.vol_OE() / ms.vol_OF() * ms.vol_OE()

    def compute(N):
        total = Value.zero(E.q)
        for a in vals:
            for k in vals:
                frac = _g_brute_shell(base, d, ctx, model, a, k, N, shift_det=True)
                if frac:
                    total = total + per * frac
        return total

    return _adaptive(base, ctx, compute) / _xi0_volume(ms, fn.m, e)


def _g_basic(fn, d, ctx, xi_quotient):
    strategy = ctx.strategy
    if isinstance(fn, KepsMZ) or xi_quotient:
        if not isinstance(fn, KepsMZ):
            raise ConfigError("the Xi-quotient integral is set up for KepsMZ")
        if strategy == "brute":
            return _g_brute_xi(fn, d, ctx)
        v = _g_fast_keps(fn.base(), d, ctx).substitute(xi=True)
        return v / _xi0_volume(ctx.measure, fn.m, ctx.E.e)
    if strategy != "brute":
        if isinstance(fn, KepsM):
            return _g_fast_keps(fn, d, ctx)
        if hasattr(fn, "member_mat") and ctx.E.flavor == "unramified":
            return _g_fast_bi_k(fn, d, ctx)
    return _g_brute(fn, d, ctx)


def eval_orbital_G(f, delta_or_x, ctx: EvalContext, xi_quotient=False, eps=None) -> Value:
    """O(delta, f); for an F-element x the representative delta(x) = 1 + b j with eps Nm(b) = x."""
    E = ctx.E
    if E.flavor == "split":
        return eval_orbital_split("G", f, delta_or_x, ctx)
    d = _as_quaternion(E, delta_or_x, eps)
    total = Value.zero(E.q)
    for coef, fn in f.terms():
        total = total + _g_basic(fn, d, ctx, xi_quotient) * coef
    return total


# ------------------------------------------------------------------ split side

def split_delta(F, x):
    """delta(x) = [[1, x], [1, 1]] with torus invariant x."""
    one = LocalElem.one(F)
    return Mat2(one, x, one, one)


def split_gamma(F, x):
    one = LocalElem.one(F)
    return Mat2(x, one, one, one)


def _split_weight(q, c1, c2):
    return Value.mono(q, 1, xi1=c1, xi2=c2)


def _split_s_shells(fn, s, extra):
    sup = fn.support()
    if not sup.integral:
        raise ConfigError(f"{fn.label()} has no integrality bound")
    v11, v12, v21, v22 = (x.val for x in s.entries())
    vdet = s.det().val
    inner = set()
    for d in range(sup.det_lo, sup.det_hi + 1):
        for c in range(-v22, d - vdet + v11 + 1):
            tot = d - 2 * c - vdet
            for i1 in range(-c - v12, tot + c + v21 + 1):
                i2 = tot - i1
                inner.add((c, i1, i2))
    box = set(inner)
    if extra and inner:
        cs = [t[0] for t in inner]
        ones = [t[1] for t in inner]
        twos = [t[2] for t in inner]
        for c in range(min(cs) - extra, max(cs) + extra + 1):
            for i1 in range(min(ones) - extra, max(ones) + extra + 1):
                for i2 in range(min(twos) - extra, max(twos) + extra + 1):
                    box.add((c, i1, i2))
    return inner, sorted(box)


def _split_g_shells(fn, dm, extra):
    sup = fn.support()
    if not sup.integral:
        raise ConfigError(f"{fn.label()} has no integrality bound")
    v11, v12, v21, v22 = (x.val for x in dm.entries())
    vdet = dm.det().val
    inner = set()
    for d in range(sup.det_lo, sup.det_hi + 1):
        for ka in range(-v21, d - vdet + v12 + 1):
            for kb in range(-v22, d - vdet + v11 + 1):
                kc = ka + kb - d + vdet
                if kc <= ka + v11 and kc <= kb + v12:
                    inner.add((ka, kb, kc))
    box = set(inner)
    if extra and inner:
        ranges = [range(min(t[i] for t in inner) - extra, max(t[i] for t in inner) + extra + 1)
                  for i in range(3)]
        for ka in ranges[0]:
            for kb in ranges[1]:
                for kc in ranges[2]:
                    box.add((ka, kb, kc))
    return inner, sorted(box)


def _triple(model, shifts, N):
    """Outer product of three F-unit batches at the given valuations."""
    U = [model.units_F(k, N) for k in shifts]
    n = U[0].n
    _check_rows(n ** 3)
    X = U[0].repeat(n * n)
    Y = U[1].repeat(n).tile(n)
    Z = U[2].tile(n * n)
    return X, Y, Z, n ** 3


def _split_view(model, e11, e12, e21, e22, det):
    v = MatView(e11, e12, e21, e22, det, 1, lambda x: SeriesBatch.constant(x))
    v.ext = model.E
    return v


def _split_s_brute(fn, s, ctx):
    E = ctx.E
    model = _Model(E)
    inner, box = _split_s_shells(fn, s, ctx.guard)
    cst = lambda x: SeriesBatch.constant(x)  # noqa: E731
    vol = ctx.measure.vol_OF() * ctx.measure.vol_OF() * ctx.measure.vol_OF()
    w = ctx.omega_power

    def compute(N):
        total = Value.zero(E.q)
        for c, i1, i2 in box:
            z, a1, a2, n = _triple(model, (c, i1, i2), N)
            za1 = z * a1
            e11 = za1 * a2 * cst(s.a)
            e12 = za1 * cst(s.b)
            e21 = z * a2 * cst(s.c)
            e22 = z * cst(s.d)
            det = z * z * a1 * a2 * cst(s.det())
            mask = fn.member(_split_view(model, e11, e12, e21, e22, det))
            frac = Fraction(int(mask.sum()), n)
            if (c, i1, i2) not in inner:
                if frac:
                    raise AssertionError(f"guard shell {(c, i1, i2)} does not vanish for {fn.label()}")
                continue
            if frac:
                total = total + vol * _split_weight(E.q, i1 + w * c, i2 + w * c) * frac
        return total

    return _adaptive(fn, ctx, compute)


def _split_s_fast(fn, s, ctx):
    E = ctx.E
    inner, _ = _split_s_shells(fn, s, 0)
    v11, v12, v21, v22 = (x.val for x in s.entries())
    vdet = s.det().val
    vol = ctx.measure.vol_OF() * ctx.measure.vol_OF() * ctx.measure.vol_OF()
    w = ctx.omega_power
    total = Value.zero(E.q)
    for c, i1, i2 in inner:
        vals = (c + i1 + i2 + v11, c + i1 + v12, c + i2 + v21, c + v22)
        if fn.member_vals(vals, 2 * c + i1 + i2 + vdet):
            total = total + vol * _split_weight(E.q, i1 + w * c, i2 + w * c)
    return total


def _split_g_brute(fn, dm, ctx):
    E = ctx.E
    model = _Model(E)
    inner, box = _split_g_shells(fn, dm, ctx.guard)
    cst = lambda x: SeriesBatch.constant(x)  # noqa: E731
    vol = ctx.measure.vol_OF() * ctx.measure.vol_OF() * ctx.measure.vol_OF()

    def compute(N):
        total = Value.zero(E.q)
        for ka, kb, kc in box:
            a, b, c, n = _triple(model, (ka, kb, kc), N)
            ci = c.inv_units()
            e11 = a * ci * cst(dm.a)
            e12 = b * ci * cst(dm.b)
            e21 = a * cst(dm.c)
            e22 = b * cst(dm.d)
            det = a * b * ci * cst(dm.det())
            mask = fn.member(_split_view(model, e11, e12, e21, e22, det))
            frac = Fraction(int(mask.sum()), n)
            if (ka, kb, kc) not in inner:
                if frac:
                    raise AssertionError(f"guard shell {(ka, kb, kc)} does not vanish for {fn.label()}")
                continue
            if frac:
                total = total + vol * _split_weight(E.q, ka - kc, kb) * frac
        return total

    return _adaptive(fn, ctx, compute)


def _split_g_fast(fn, dm, ctx):
    E = ctx.E
    inner, _ = _split_g_shells(fn, dm, 0)
    v11, v12, v21, v22 = (x.val for x in dm.entries())
    vdet = dm.det().val
    vol = ctx.measure.vol_OF() * ctx.measure.vol_OF() * ctx.measure.vol_OF()
    total = Value.zero(E.q)
    for ka, kb, kc in inner:
        vals = (ka - kc + v11, kb - kc + v12, ka + v21, kb + v22)
        if fn.member_vals(vals, ka + kb - kc + vdet):
            total = total + vol * _split_weight(E.q, ka - kc, kb)
    return total


def eval_orbital_split(side, f_or_phi, x_or_mat, ctx: EvalContext) -> Value:
    """Split-place orbital integrals; the S side is taken at s = 0."""
    E = ctx.E
    if E.flavor != "split":
        raise ConfigError("split orbital integrals need the split flavor")
    F = E.F
    if isinstance(x_or_mat, Mat2):
        mat = x_or_mat
    else:
        x = x_or_mat
        if x.is_zero_up_to_prec() or (x - 1).is_zero_up_to_prec():
            raise NonRegularX("x must lie outside {0, 1}")
        mat = split_gamma(F, x) if side == "S" else split_delta(F, x)
    if any(y.is_zero_up_to_prec() for y in mat.entries()) or mat.det().is_zero_up_to_prec():
        raise (NonRegularX if side == "S" else SingularDelta)("split element is not regular")
    total = Value.zero(E.q)
    for coef, fn in f_or_phi.terms():
        fast = ctx.strategy != "brute" and fn.valuation_only()
        if side == "S":
            v = _split_s_fast(fn, mat, ctx) if fast else _split_s_brute(fn, mat, ctx)
        else:
            v = _split_g_fast(fn, mat, ctx) if fast else _split_g_brute(fn, mat, ctx)
        total = total + v * coef
    return total


# ------------------------------------------------------------------ profile

def orbital_profile(f, vx_range, ctx: EvalContext, samples=2, near_one=4, seed=0):
    """Shape of x -> O(delta(x), f) over a valuation window (unramified E).

    Returns a dict of checked booleans with the computed witnesses:
    local constancy in the unit part, vanishing near 1, constancy near 0 and
    the behaviour near infinity (a monomial in xi times a constant, or zero).
    """
    from .errors import WindowTooSmall

    import random

    E = ctx.E
    if E.flavor != "unramified":
        raise ConfigError("orbital_profile samples the unramified flavor")
    vs = list(vx_range)
    if len(vs) < 3:
        raise WindowTooSmall("the window needs at least three valuations")
    F = E.F
    rng = random.Random(seed)
    eps_for = {0: LocalElem.one(F), 1: LocalElem.uniformizer(F, 1)}
    needs_eps1 = hasattr(f, "member_mat") or any(hasattr(g, "member_mat") for _, g in f.terms())

    def value(x):
        eps = eps_for[x.val % 2]
        if needs_eps1 and x.val % 2:
            return None
        return eval_orbital_G(f, x, ctx, eps=eps)

    table = {}
    plateau = True
    witnesses = []
    for v in vs:
        if v == 0:
            continue
        vals = []
        for _ in range(samples):
            u = [rng.randrange(1, F.order)] + [rng.randrange(F.order) for _ in range(3)]
            x = LocalElem(F, v, u)
            vals.append(value(x))
        if any(a is not None and not (a == vals[0]) for a in vals):
            plateau = False
            witnesses.append(("plateau", v, [a.render() for a in vals if a is not None]))
        table[v] = vals[0]
    ones = []
    for k in range(1, near_one + 1):
        x = LocalElem.one(F) + LocalElem(F, k, [1])
        if needs_eps1 and x.val % 2:
            continue
        ones.append((k, value(x)))
    tail = [(k, v) for k, v in ones if k >= near_one - 1]
    vanish_one = all(v is not None and v.is_zero() for _, v in tail)
    pos = [table[v] for v in vs if v > 0 and table.get(v) is not None]
    const0 = len(pos) < 2 or all(p == pos[-1] for p in pos[-2:])
    neg = [(v, table[v]) for v in vs if v < 0 and table.get(v) is not None]
    inf_shape = "zero" if all(t.is_zero() for _, t in neg) else (
        "monomial" if all(len(t.terms) <= 1 for _, t in neg) else "mixed")
    return {
        "table": {v: (t.render() if t is not None else None) for v, t in table.items()},
        "near_one": [(k, v.render() if v is not None else None) for k, v in ones],
        "locally_constant": plateau,
        "vanishes_near_one": vanish_one,
        "constant_near_zero": const0,
        "near_infinity": inf_shape,
        "witnesses": witnesses,
    }


__all__ = [
    "EvalContext", "OrbitalValue", "LogValue", "derivative_at_zero", "eval_orbital_S",
    "eval_orbital_G", "eval_orbital_split", "orbital_profile", "split_delta", "split_gamma",
]
