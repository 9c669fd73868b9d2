import pytest
from hypothesis import given
from hypothesis import strategies as st

from rtflab.errors import SingularElement
from rtflab.fields import residue_field
from rtflab.geometry import (HermMat, Mat2, QuatElem, cartan_coordinate, elementary_divisors,
                             hermite_cosets, hyperbolic_distance, inv_prime_gl2, torus_fixed_point)
from rtflab.laurent import LocalElem
from rtflab.quad_ext import QuadExt
from rtflab.values import Value


def unit(F, v=0):
    return st.builds(lambda d0, rest: LocalElem(F, v, [d0] + rest),
                     st.integers(1, F.order - 1), st.lists(st.integers(0, F.order - 1), max_size=3))


@pytest.mark.parametrize("q", [2, 3])
def test_hermite_coset_count(q):
    F = residue_field(q)
    # |M_2(O) with v(det) = m / GL_2(O)| = 1 + q + ... + q^m
    for m in range(4):
        assert len(hermite_cosets(F, m)) == sum(q ** j for j in range(m + 1))


def test_cartan_coordinates():
    F = residue_field(3)
    t = LocalElem.uniformizer
    one, zero = LocalElem.one(F), LocalElem.zero(F)
    g = Mat2(t(F, 2), one, zero, t(F, 1))
    assert elementary_divisors(g) == (0, 3)
    assert cartan_coordinate(g) == 3
    assert cartan_coordinate(Mat2(t(F, 1), zero, zero, t(F, 1))) == 0


@pytest.mark.parametrize("q", [3, 4])
def test_hermitian_invariant_on_orbits(q):
    E = QuadExt(q)
    F, K = E.F, E.K

    @given(st.integers(1, 4), unit(F), unit(K), st.integers(-1, 1), unit(F))
    def check(v, u, a, k, z):
        x = LocalElem(F, v, u.coeffs)
        g = HermMat.gamma(E, x)
        moved = g.act(a * LocalElem.uniformizer(K, k), z)
        assert moved.inv().agrees(g.inv())
        assert moved.is_hermitian()

    check()


@pytest.mark.parametrize("q", [3, 2])
def test_quaternion_invariant_on_orbits(q):
    E = QuadExt(q)
    F, K = E.F, E.K

    @given(st.integers(1, 3), unit(F), unit(K), unit(K))
    def check(v, u, h1, h2):
        x = LocalElem(F, 2 * v, u.coeffs)
        d = QuatElem.delta(E, x, depth=10)
        moved = d.left(h1.inv()) * h2
        assert moved.inv().agrees(d.inv())
        assert d.inv().agrees(x, prec=2 * v + 8)

    check()


def test_singular_quaternion():
    E = QuadExt(3)
    F = E.F
    d = QuatElem(E, LocalElem.one(F), E.one(), E.zero())
    with pytest.raises(SingularElement):
        d.inv_prime()


def test_metric_at_infinity_examples():
    E = QuadExt(3)
    F = E.F
    z = torus_fixed_point(E)
    t = LocalElem.uniformizer
    one, zero = LocalElem.one(F), LocalElem.zero(F)
    g = Mat2(one, t(F, 2), zero, one)
    ip = inv_prime_gl2(E, g)
    assert hyperbolic_distance(z, z.moved(g)) == Value.q_power(3, -2 * ip.val)
    assert hyperbolic_distance(z, z) == Value.zero(3)


def test_imag_part_by_search():
    E = QuadExt(3)
    z = torus_fixed_point(E)
    assert z.imag_val_bruteforce(M=2) == z.imag_val
