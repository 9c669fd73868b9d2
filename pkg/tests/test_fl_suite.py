import json
from fractions import Fraction

import pytest

from rtflab.engine import EvalContext, eval_orbital_G, eval_orbital_S
from rtflab.errors import AxiomFailure, ConfigError
from rtflab.fields import residue_field
from rtflab.geometry import Mat2, QuatElem
from rtflab.laurent import LocalElem
from rtflab.quad_ext import QuadExt
from rtflab.suites import (MultiplicityFn, XGrid, afl_closed_form, arith_orbital_i, bad_det_candidate,
                           combination_weights, eps_classes, fl_closed_form, parse_window,
                           phi_hat_eta_integral, trace_elements, unramified_candidate, level_pair,
                           verify_AFL, verify_FL, verify_matching_defs, verify_metric_at_infinity, verify_combination_matching,
                           verify_special_multiplicity_axioms, verify_split_matching, zero_candidate)
from rtflab.testfns import Cm, IntegralDetM, IntegralDetMG, KcapS
from rtflab.values import Value


def test_parse_window():
    assert parse_window("-2..2") == (-2, -1, 0, 1, 2)
    assert parse_window("1,3,5") == (1, 3, 5)
    assert parse_window("") == ()


def test_grid_hits_the_v_one_minus_x_cases():
    F = residue_field(3)
    pts = XGrid((0,), 3, 0).points(F, m=4)
    assert sorted((1 - x).val for x in pts) == [0, 1, 4]


def test_fl_small_grid_both_characteristics():
    for q in (3, 2):
        rep = verify_FL(q, m_list=(0, 2), x_grid=XGrid((-2, -1, 0, 1, 2), 2, 1))
        assert rep.passed, [c.to_dict() for c in rep.failures()]


def test_fl_brute_cross_check():
    rep = verify_FL(3, m_list=(0,), x_grid=XGrid((-2, 1, 2), 1, 0), cross_check=True)
    assert rep.passed
    assert all(c.passed for c in rep.cases)


def test_fl_rejects_bad_parameters():
    with pytest.raises(ConfigError):
        verify_FL(3, char_parity="even")
    with pytest.raises(ConfigError):
        verify_FL(3, m_list=(1,))


def test_fl_closed_form_table():
    F = residue_field(3)
    xi = lambda k: Value.mono(3, 1, xi=k)
    assert fl_closed_form(3, 0, LocalElem(F, -2, [1])) == xi(1)
    assert fl_closed_form(3, 2, LocalElem(F, 4, [1])) == xi(1)
    assert fl_closed_form(3, 2, LocalElem(F, 3, [1])).is_zero()
    # v(x) = 0 and v(1 - x) = 2 <= m
    assert fl_closed_form(3, 2, LocalElem.one(F) - LocalElem(F, 2, [1])) == xi(0)


def test_omega_equivariance():
    # substituting xi -> 2 xi rescales both sides identically
    c = EvalContext(QuadExt(3))
    F = c.E.F
    for v in (-4, -2, 2):
        x = LocalElem(F, v, [1, 1])
        s = eval_orbital_S(IntegralDetM(2), x, c).at_T1()
        g = eval_orbital_G(IntegralDetMG(2), x, c)
        two_xi = Value.mono(3, 2, xi=1)
        assert s.substitute(xi=two_xi) == g.substitute(xi=two_xi)


def test_multiplicity_function_values():
    E = QuadExt(3)
    F = E.F
    mult = MultiplicityFn(E)
    one = Mat2(LocalElem.one(F), LocalElem.zero(F), LocalElem.zero(F), LocalElem.one(F))
    for v in (1, 3, 5):
        d = QuatElem.delta(E, LocalElem(F, v, [1, 2]), eps=LocalElem.uniformizer(F), depth=12)
        assert mult(d, one) == Fraction(d.inv_prime().val + 1, 2)
        assert mult(d, mult.h(2)) == 0  # v(det) no longer cancels
    d = QuatElem.delta(E, LocalElem(F, 3, [1]), eps=LocalElem.uniformizer(F), depth=12)
    h = Mat2(LocalElem.uniformizer(F, 1), LocalElem.zero(F), LocalElem.zero(F), LocalElem.uniformizer(F, -1))
    assert mult(d, h) == Fraction(3) ** -1 / 4


def test_afl_values_and_closed_form():
    rep = verify_AFL(3, m_list=(0, 2), x_grid=XGrid((-1, 1, 3), 1, 0))
    assert rep.passed
    E = QuadExt(3)
    F = E.F
    c = EvalContext(E)
    x = LocalElem(F, 3, [1, 1])
    d = QuatElem.delta(E, x, eps=LocalElem.uniformizer(F), depth=12)
    assert arith_orbital_i(d, Cm(0), c) == afl_closed_form(3, 0, x) == Value.const(3, 2)
    with pytest.raises(ConfigError):
        verify_AFL(3, x_grid=XGrid((2,), 1))


@pytest.mark.parametrize("flavor", ["unramified", "ramified"])
def test_trace_elements_and_levels(flavor):
    E = QuadExt(3, flavor)
    xi, xi2 = trace_elements(E)
    assert E.eta(E.trace(xi)) == -E.eta(E.trace(xi2))
    l, l2 = level_pair(E, xi, xi2)
    assert l > l2


@pytest.mark.parametrize("flavor", ["unramified", "ramified"])
def test_combination_weights_solve_the_system(flavor):
    E = QuadExt(5, flavor)
    c = EvalContext(E)
    for eps in eps_classes(E):
        data = combination_weights(E, c.measure, 1, eps)
        assert not data.determinant.is_zero()
        assert data.x_l2 * c.measure.vol_add_ball_E(data.l2) == data.x_l * c.measure.vol_add_ball_E(data.l)


@pytest.mark.parametrize("flavor", ["unramified", "ramified"])
def test_combination_matching(flavor):
    rep = verify_combination_matching(3, flavor, m_list=(1,))
    assert rep.passed
    assert any(not c.lhs.is_zero() for c in rep.cases)


def test_matching_defs_purely_clause():
    # KcapS against 1_{K_1}: off the norms the Hermitian side must vanish
    F = residue_field(3)
    xs = [LocalElem(F, v, [1, 2]) for v in (-3, -2, -1, 1, 2, 3)]
    rep = verify_matching_defs("unramified", Cm(0), KcapS(), xs, purely=True)
    assert rep.passed
    assert len(rep.cases) == 6


def test_split_matching_small():
    rep = verify_split_matching((2, 3), pairs=12, seed=5)
    assert rep.passed and rep.total == 12


def test_gauss_constructions_nonzero():
    for q in (3, 5):
        for flavor in ("unramified", "ramified"):
            E = QuadExt(q, flavor)
            xi, xi2 = trace_elements(E)
            l, l2 = level_pair(E, xi, xi2)
            assert not phi_hat_eta_integral(E, xi, l, xi2, l2).is_zero()


def test_unramified_construction_value():
    # (q + 1) / (q - 1) with Vol(O^x) = 1
    for q in (3, 5, 9):
        E = QuadExt(q)
        xi, xi2 = trace_elements(E)
        l, l2 = level_pair(E, xi, xi2)
        assert phi_hat_eta_integral(E, xi, l, xi2, l2) == Fraction(q + 1, q - 1)


def test_metric_at_infinity_small():
    rep = verify_metric_at_infinity((2, 3), samples=20, seed=3)
    assert rep.passed and rep.total == 40


def test_axioms_unramified_candidate_passes():
    rep = verify_special_multiplicity_axioms(unramified_candidate(QuadExt(3)))
    assert rep.passed


def test_axioms_det_support_violation():
    with pytest.raises(AxiomFailure) as exc:
        verify_special_multiplicity_axioms(bad_det_candidate(QuadExt(3)))
    assert exc.value.clause == "b"


def test_axioms_zero_function_fails_local_constancy():
    # m = 0 leaves -(v(inv')/2) 1_{U'}, which is unbounded near the torus
    with pytest.raises(AxiomFailure) as exc:
        verify_special_multiplicity_axioms(zero_candidate(QuadExt(3)))
    assert exc.value.clause == "a"


def test_report_json_is_deterministic():
    a = verify_FL(3, m_list=(0,), x_grid=XGrid((-1, 0, 2), 2, 7)).to_dict()
    b = verify_FL(3, m_list=(0,), x_grid=XGrid((-1, 0, 2), 2, 7)).to_dict()
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
    assert set(a) == {"suite", "params", "cases", "summary", "provenance", "notes"}
    assert {"seed", "depth", "psi_conductor", "measure", "omega_convention"} <= set(a["provenance"])
    case = a["cases"][0]
    assert set(case["x"]) == {"valuation", "unit_repr"} and {"lhs", "rhs", "pass"} <= set(case)


def test_failed_case_carries_witness():
    from rtflab.suites import CaseResult

    F = residue_field(3)
    c = CaseResult("demo", LocalElem(F, 1, [2]), Value.const(3, 1), Value.const(3, 2), False)
    d = c.to_dict()
    assert d["witness"] == {"lhs": "1", "rhs": "2"}
    assert d["x"] == {"valuation": 1, "unit_repr": "g^1*t^0"}


@pytest.mark.parametrize("q,flavor", [(3, "unramified"), (5, "unramified"), (3, "ramified"), (5, "ramified")])
def test_trace_family_derivatives_on_the_cone(q, flavor):
    from rtflab.suites import klxin_derivative_on_cone
    from rtflab.testfns import KlxiN, KlxiNPrime
    from rtflab.values import derivative_at_zero

    E = QuadExt(q, flavor)
    c = EvalContext(E)
    F = E.F
    f = 2 if flavor == "unramified" else 1
    l, _ = level_pair(E, *trace_elements(E))
    for xi in trace_elements(E):
        for n in (1, 2):
            for v in range(-1, 5):
                x = LocalElem(F, v, [1, 1, 2 % q])
                for prime, fn in ((False, KlxiN(l, xi, n)), (True, KlxiNPrime(l, xi, n))):
                    got = derivative_at_zero(eval_orbital_S(fn, x, c), f)
                    assert got == klxin_derivative_on_cone(E, c.measure, l, xi, n, x, prime)
