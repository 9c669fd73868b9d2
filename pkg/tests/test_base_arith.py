import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rtflab.errors import ConfigError, InversionOfZero, PrecisionUnderflow, UncertainValuation
from rtflab.fields import prime_power, quad_residue_field, residue_field
from rtflab.laurent import LocalElem, parse_local

QS = [2, 3, 4, 5, 7, 8, 9]


def test_prime_power():
    assert prime_power(9) == (3, 2)
    assert prime_power(8) == (2, 3)
    with pytest.raises(ConfigError):
        prime_power(6)


@pytest.mark.parametrize("q", QS)
def test_field_tables_form_a_field(q):
    F = residue_field(q)
    els = list(F.elements())
    assert len(els) == q
    for a in els:
        assert F.add(a, F.neg(a)) == 0
        if a:
            assert F.mul(a, F.inv(a)) == 1
        for b in els:
            assert F.add(a, b) == F.add(b, a)
            assert F.mul(a, b) == F.mul(b, a)
    g = F.gen_pow(1)
    assert len({F.gen_pow(j) for j in range(q - 1)}) == q - 1
    assert F.pow(g, q - 1) == 1


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_quadratic_residue_field(q):
    K = quad_residue_field(q)
    assert K.order == q * q
    # the norm is onto F_q^x and conj has order two
    assert len({K.norm(c) for c in K.units()}) == q - 1
    assert 0 not in {K.norm(c) for c in K.units()}
    for c in K.elements():
        assert K.conj(K.conj(c)) == c


def elems(F, prec=st.one_of(st.none(), st.integers(6, 12))):
    q = F.order
    return st.builds(
        lambda v, d0, rest, p: LocalElem(F, v, [d0] + rest, None if p is None else v + p),
        st.integers(-3, 3), st.integers(1, q - 1), st.lists(st.integers(0, q - 1), max_size=5), prec)


@pytest.mark.parametrize("q", [2, 3, 4, 9])
def test_ring_axioms(q):
    F = residue_field(q)

    @given(elems(F), elems(F), elems(F))
    def check(a, b, c):
        assert ((a * b) * c).agrees(a * (b * c))
        assert (a * (b + c)).agrees(a * b + a * c)
        assert (a + b).agrees(b + a)
        assert (a - a).is_zero_up_to_prec()
        assert (a * b).val == a.val + b.val
        assert (a * a.inv()).agrees(LocalElem.one(F))

    check()


def test_precision_is_tracked():
    F = residue_field(3)
    a = LocalElem(F, 0, [1, 2], prec=4)
    b = LocalElem(F, 1, [1], prec=3)
    assert (a + b).prec == 3
    # min(v(a) + prec(b), v(b) + prec(a)) = min(0 + 3, 1 + 4)
    assert (a * b).prec == 3
    with pytest.raises(PrecisionUnderflow):
        a.coeff(5)
    z = LocalElem.zero(F, prec=5)
    assert z.is_zero_up_to_prec()
    with pytest.raises(UncertainValuation):
        z.val
    assert LocalElem.zero(F).val == math.inf


def test_inverse_of_zero():
    F = residue_field(5)
    with pytest.raises(InversionOfZero):
        LocalElem.zero(F).inv()


def test_parse_local():
    F = residue_field(5)
    x = parse_local(F, "2*t^-1 + 1 + g^2*t^3 + O(t^6)")
    assert x.val == -1 and x.prec == 6
    assert x.coeff(-1) == 2 and x.coeff(0) == 1 and x.coeff(3) == F.gen_pow(2)
    assert parse_local(F, "t^2") == LocalElem.uniformizer(F, 2)
    y = parse_local(F, "1 - t")
    assert (y + LocalElem.uniformizer(F)).agrees(LocalElem.one(F))


def test_char_two_signs():
    F = residue_field(4)
    one = LocalElem.one(F)
    assert (one + one).is_zero_up_to_prec()
    assert (-one).agrees(one)
