from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from floerfam.exponents import ExponentBasis, sign_of
from floerfam.linalg import rank_q
from floerfam.monoid import (_enumerate, extend_to_free, genericity_test, independent,
                             membership)

B = ExponentBasis.make([
    ("one", "energy", 1),
    ("r2", "energy", F(14142136, 10 ** 7), F(1, 10 ** 6), "sqrt(2)"),
    ("r3", "energy", F(17320508, 10 ** 7), F(1, 10 ** 6), "sqrt(3)"),
])


def x(a, b=0, c=0):
    return B.vec([a, b, c])


def coords(gs):
    return [g.coords for g in gs]


def test_single_generator():
    assert coords(extend_to_free([x(2)])) == [x(2).coords]


def test_three_and_two():
    gens = extend_to_free([x(3), x(2)])
    assert coords(gens) == [x(1).coords]
    # bounded search is an independent check of the certificates
    assert _enumerate(gens, x(3), 10).coeffs == (3,)
    assert _enumerate(gens, x(2), 10).coeffs == (2,)


def test_root_two_example():
    gens = extend_to_free([x(1), x(0, 1), x(-1, 3)])
    assert coords(gens) == [x(F(-1, 3), 1).coords, x(F(1, 3)).coords]
    assert membership(gens, x(1)).coeffs == (0, 3)
    assert membership(gens, x(0, 1)).coeffs == (1, 1)
    assert membership(gens, x(-1, 3)).coeffs == (3, 0)
    for target in (x(1), x(0, 1), x(-1, 3)):
        assert _enumerate(gens, target, 10) is not None


def test_membership_examples():
    assert membership([x(1)], x(5)).coeffs == (5,)
    assert membership([x(2)], x(3)) is None


def test_zero_is_rejected():
    with pytest.raises(ValueError):
        extend_to_free([x(0)])


def test_genericity():
    gb = ExponentBasis.make([
        ("E1", "energy", 1),
        ("E2", "energy", F(14142136, 10 ** 7), F(1, 10 ** 6), "sqrt(2)"),
        ("a1", "flux", F(17320508, 10 ** 7), F(1, 10 ** 6), "sqrt(3)"),
    ])
    assert genericity_test(gb).passed
    v = genericity_test(gb, relations=[[1, -1, -1]])
    assert not v.passed and v.witness == (0, 0, 1)


def test_rational_rotation_is_not_generic():
    # flux period declared as one third of the area
    gb = ExponentBasis.make([
        ("A", "energy", F(3, 2), F(1, 10 ** 6), "3/2"),
        ("rho", "flux", F(1, 2), F(1, 10 ** 6), "1/2"),
    ])
    assert not genericity_test(gb, relations=[[1, -3]]).passed


pos = st.tuples(st.integers(-3, 6), st.integers(0, 3), st.integers(0, 3))


@settings(max_examples=100, deadline=None)
@given(st.lists(pos, min_size=1, max_size=5))
def test_extension_properties(raw):
    xs = [x(*t) for t in raw]
    xs = [v for v in xs if not v.is_zero() and sign_of(v) > 0]
    if not xs:
        return
    gens = extend_to_free(xs)
    assert rank_q([list(c) for c in coords(gens)]) == len(gens)
    assert independent(gens)
    assert len(gens) <= len(xs)
    assert all(sign_of(g) > 0 for g in gens)
    for v in xs:
        cert = membership(gens, v)
        assert cert is not None and cert.verify()
