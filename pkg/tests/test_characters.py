from fractions import Fraction

import pytest

from rtflab.characters import (AdditiveCharacter, CycloValue, MeasureContext, MultiplicativeCharacter,
                               gauss_sum)
from rtflab.fields import residue_field
from rtflab.laurent import LocalElem
from rtflab.suites import characters_up_to


def test_cyclotomic_canonical_form():
    # M = p (q - 1) = 6 for q = 3, so z^2 is a primitive cube root of unity
    z3 = CycloValue.root(3, 3, 2)
    assert (CycloValue.root(3, 3, 0) + z3 + z3 * z3).is_zero()
    assert CycloValue.root(3, 3, 6) == 1
    assert CycloValue.root(3, 3, 1).abs2() == 1


@pytest.mark.parametrize("q", [3, 5, 9])
def test_support_law_ramified_characters(q):
    F = residue_field(q)
    for chi in characters_up_to(F, 2):
        if chi.conductor == 0:
            continue
        for c in range(3):
            psi = AdditiveCharacter(F, c)
            for n in range(-5, 6):
                assert (not gauss_sum(chi, psi, n).is_zero()) == (n == -(chi.conductor + c))


@pytest.mark.parametrize("q", [3, 5, 9])
def test_support_law_unramified_characters(q):
    # unramified chi: tau_n vanishes exactly for n < -c(psi) - 1
    F = residue_field(q)
    for chi in (MultiplicativeCharacter(F), MultiplicativeCharacter(F, sign=-1)):
        for c in range(3):
            psi = AdditiveCharacter(F, c)
            for n in range(-5, 6):
                assert gauss_sum(chi, psi, n).is_zero() == (n < -c - 1)


@pytest.mark.parametrize("q", [3, 5, 7])
def test_classical_gauss_sum_magnitude(q):
    # conductor one: q / (q - 1)^2 with Vol(O^x) = 1
    F = residue_field(q)
    chi = MultiplicativeCharacter(F, gen_exp=1)
    tau = gauss_sum(chi, AdditiveCharacter(F, 0), -1)
    assert tau.abs2() == Fraction(q, (q - 1) ** 2)


def test_unramified_value_with_measure():
    F = residue_field(5)
    chi = MultiplicativeCharacter(F, sign=-1)
    for c in (0, 1, 2):
        ms = MeasureContext(5, c)
        tau = gauss_sum(chi, AdditiveCharacter(F, c), -c, measure=ms)
        want = chi.value(LocalElem.uniformizer(F, -c))
        assert tau.abs2() == want.abs2() * Fraction(5) ** c


def test_character_values_multiplicative():
    F = residue_field(9)
    chi = MultiplicativeCharacter(F, gen_exp=2, mu_p=1, unif_exp=1)
    a = LocalElem(F, 1, [2, 1, 3])
    b = LocalElem(F, -2, [5, 0, 1])
    assert chi.value(a * b) == chi.value(a) * chi.value(b)
    assert chi.conductor == 2
