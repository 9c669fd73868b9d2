import pytest
from hypothesis import given
from hypothesis import strategies as st

from rtflab.errors import ConfigError
from rtflab.laurent import LocalElem
from rtflab.quad_ext import QuadExt

FLAVORS = [(2, "unramified"), (3, "unramified"), (4, "unramified"), (5, "unramified"),
           (3, "ramified"), (5, "ramified"), (9, "ramified")]


def local(F):
    q = F.order
    return st.builds(lambda v, d0, rest: LocalElem(F, v, [d0] + rest),
                     st.integers(-2, 3), st.integers(1, q - 1), st.lists(st.integers(0, q - 1), max_size=4))


@pytest.mark.parametrize("q,flavor", FLAVORS)
def test_conj_norm_trace(q, flavor):
    E = QuadExt(q, flavor)
    F = E.F

    @given(local(F), local(F), local(F), local(F))
    def check(a, b, c, d):
        y, z = E.make(a, b), E.make(c, d)
        assert E.conj(E.conj(y)) == y
        assert E.conj(y * z) == E.conj(y) * E.conj(z)
        assert E.norm(y * z).agrees(E.norm(y) * E.norm(z))
        assert E.trace(y + z).agrees(E.trace(y) + E.trace(z))
        assert E.trace(y).agrees(E.restrict(y + E.conj(y)))
        assert E.eta(E.norm(y)) == 1

    check()


@pytest.mark.parametrize("q", [2, 4])
def test_norm_valuation_char_two(q):
    # v(Nm(a + b w)) = min(2 v(a), 2 v(b)) in the unramified extension
    E = QuadExt(q)
    F = E.F

    @given(local(F), local(F))
    def check(a, b):
        assert E.norm(E.make(a, b)).val == min(2 * a.val, 2 * b.val)

    check()


@pytest.mark.parametrize("q,flavor", FLAVORS)
def test_norm_preimage(q, flavor):
    E = QuadExt(q, flavor)
    F = E.F

    @given(local(F))
    def check(x):
        y = E.norm_preimage(x, depth=6)
        if y is None:
            assert E.eta(x) == -1
        else:
            assert E.eta(x) == 1
            assert E.norm(y).agrees(x, prec=x.val + 6)

    check()


def test_eta_values():
    E = QuadExt(3)
    F = E.F
    assert E.eta(LocalElem.uniformizer(F)) == -1
    assert E.eta(LocalElem.const(F, 2)) == 1
    R = QuadExt(3, "ramified")
    # s^2 = t, so t = -Nm(s) and eta(t) = eta(-1) = -1 for q = 3
    assert R.eta(LocalElem.uniformizer(F)) == -1
    assert R.eta(LocalElem.const(F, 2)) == -1


def test_ramified_needs_odd_p():
    with pytest.raises(ConfigError):
        QuadExt(2, "ramified")
    with pytest.raises(ConfigError):
        QuadExt(3, "bogus")


def test_embed_restrict_round_trip():
    for q, flavor in FLAVORS:
        E = QuadExt(q, flavor)
        x = LocalElem(E.F, -1, [1, 1, 2 % q])
        assert E.restrict(E.embed(x)).agrees(x)
