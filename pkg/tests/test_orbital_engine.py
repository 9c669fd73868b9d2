import pytest

from rtflab.engine import (EvalContext, eval_orbital_G, eval_orbital_S, eval_orbital_split, orbital_profile,
                           split_gamma)
from rtflab.errors import ConfigError, NonRegularX, WindowTooSmall
from rtflab.fields import residue_field
from rtflab.geometry import QuatElem
from rtflab.laurent import LocalElem, parse_local
from rtflab.quad_ext import QuadExt
from rtflab.testfns import Cm, IntegralDetM, IntegralDetMG, KcapS, KepsM, LinComb, RightTranslateW
from rtflab.values import Value, derivative_at_zero


def ctx(q, flavor="unramified", **kw):
    return EvalContext(QuadExt(q, flavor), **kw)


def test_kcaps_at_t_squared():
    c = ctx(5)
    x = parse_local(c.E.F, "t^2")
    assert eval_orbital_S(KcapS(), x, c).at_T1() == Value.const(5, 1)


@pytest.mark.parametrize("q", [2, 3])
@pytest.mark.parametrize("v", [-2, -1, 0, 1, 2])
def test_fast_path_agrees_with_enumeration(q, v):
    c = ctx(q)
    F = c.E.F
    x = LocalElem(F, v, [1, 1]) if v else LocalElem.one(F) + LocalElem(F, 1, [1])
    for fn in (KcapS(), IntegralDetM(2)):
        assert eval_orbital_S(fn, x, c) == eval_orbital_S(fn, x, c.with_strategy("brute"))


def test_hermitian_side_vanishes_off_norms_at_s0():
    c = ctx(3)
    F = c.E.F
    for v in (-3, -1, 1, 3):
        x = LocalElem(F, v, [1, 2])
        assert eval_orbital_S(IntegralDetM(2), x, c).at_T1().is_zero()


def test_linear_combinations():
    c = ctx(3)
    F = c.E.F
    x = LocalElem(F, 2, [1, 1])
    a = eval_orbital_S(KcapS(), x, c)
    b = eval_orbital_S(IntegralDetM(2), x, c)
    comb = LinComb([(3, KcapS()), (Value.mono(3, 1, xi=1), IntegralDetM(2))])
    assert eval_orbital_S(comb, x, c) == a * 3 + b * Value.mono(3, 1, xi=1)


def test_derivative_at_zero_grading():
    v = Value.mono(3, 2, tpow=1) + Value.mono(3, 1, tpow=-1)
    d = derivative_at_zero(v, 2)
    assert d.coeff == Value.const(3, 2)
    assert d.render() == "1 * (-logq^2)"


def test_quaternion_side_accepts_delta_or_x():
    c = ctx(3)
    F = c.E.F
    x = LocalElem(F, 2, [1, 2])
    d = QuatElem.delta(c.E, x, depth=12)
    assert eval_orbital_G(IntegralDetMG(2), d, c) == eval_orbital_G(IntegralDetMG(2), x, c)


def test_quaternion_side_rejects_non_norms():
    c = ctx(3)
    x = LocalElem(c.E.F, 1, [1])
    with pytest.raises(NonRegularX):
        eval_orbital_G(Cm(0), x, c)


def test_quaternion_side_congruence_subgroup_enumeration():
    c = ctx(2)
    F = c.E.F
    for v in (0, 2):
        x = LocalElem(F, v, [1, 1]) if v else LocalElem(F, 0, [1, 0, 1])
        fast = eval_orbital_G(KepsM(1), x, c)
        brute = eval_orbital_G(KepsM(1), x, c.with_strategy("brute"))
        assert fast == brute


def test_depth_stability_flag():
    c = ctx(3, strategy="brute", check_stability=True)
    x = LocalElem(c.E.F, 2, [1, 1])
    assert eval_orbital_S(KcapS(), x, c) == eval_orbital_S(KcapS(), x, ctx(3))


def test_split_matching_and_printed_representative():
    c = ctx(3, "split")
    F = c.E.F
    phi = KcapS()
    f = RightTranslateW(phi)
    for v in (-2, -1, 1, 2):
        x = LocalElem(F, v, [1, 2])
        assert eval_orbital_split("S", phi, x, c) == eval_orbital_split("G", f, x, c)
        # with [[x, 1], [1, 1]] on the G side one gets Omega_1(x) O(1/x, Phi)
        printed = eval_orbital_split("G", f, split_gamma(F, x), c)
        assert printed == eval_orbital_split("S", phi, x.inv(), c) * Value.mono(3, 1, xi1=-v)


def test_split_needs_split_flavor():
    with pytest.raises(ConfigError):
        eval_orbital_split("S", KcapS(), LocalElem.uniformizer(residue_field(3)), ctx(3))


def test_orbital_profile_shape():
    c = ctx(3)
    prof = orbital_profile(IntegralDetMG(2), range(-4, 5), c)
    assert prof["locally_constant"] and prof["vanishes_near_one"] and prof["constant_near_zero"]
    assert prof["near_infinity"] == "monomial"
    with pytest.raises(WindowTooSmall):
        orbital_profile(IntegralDetMG(2), [1, 2], c)


def test_context_description():
    d = ctx(3).describe()
    assert d["omega_convention"] == "restriction"
    assert d["psi_conductor"] == 0
    with pytest.raises(ConfigError):
        EvalContext(QuadExt(3), strategy="fastest")
