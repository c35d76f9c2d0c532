from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from floerfam.exponents import (INF, ExponentBasis, FamilySeries, NovikovSeries, compare, ev_at,
                                nov_ring, nov_val, window_nonvanishing)

B = ExponentBasis.make([
    ("E", "energy", 1),
    ("s", "energy", F(14142136, 10 ** 7), F(1, 10 ** 6), "sqrt(2)"),
    ("phi", "flux", F(17320508, 10 ** 7), F(1, 10 ** 6), "sqrt(3)"),
])


def T(*coords):
    return B.vec(list(coords) + [0] * (len(B) - len(coords)))


def series(*pairs, cutoff=None):
    return NovikovSeries(B, [(c, e) for c, e in pairs], cutoff)


def test_half_plus_half():
    assert nov_ring("mul", series((1, T(F(1, 2)))), series((1, T(F(1, 2))))) == series((1, T(1)))


def test_cancellation_leaves_T():
    assert nov_ring("add", series((1, T()), (1, T(1))), series((-1, T()))) == series((1, T(1)))


def test_geometric_series_inverse():
    # (1 - T^a)(1 + T^a + ... ) = 1 modulo T^(5a), checked against the expanded product
    a = T(0, 1)
    cut = a.scale(5)
    x = series((1, T()), (-1, a), cutoff=cut)
    inv = series(*[(1, a.scale(i)) for i in range(8)], cutoff=cut)
    prod = x * inv
    assert prod.terms == ((F(1), T()),)
    assert not prod.polynomial


def test_valuations():
    assert nov_val(series((1, T(F(3, 2))), (-1, T(2)))).coords == T(F(3, 2)).coords
    assert nov_val(series()) is INF
    assert nov_val(series((1, T(1))) + series((-1, T(1)))) is INF


def fam(*monos, window=(-1, 1)):
    return FamilySeries(B, [(c, b, r) for c, b, r in monos], window)


def test_ev_at_examples():
    z1, z2 = T(0, 0, 1), T(0, 0, 2)
    assert ev_at(fam((1, T(), z1), (-1, T(), z2)), 0).is_zero()
    # z^1 - z^2 at z = T^(1/2) with unit flux r = 1 coded on E
    f = fam((1, T(), T(1)), (-1, T(), T(2)))
    v = ev_at(f, F(1, 2))
    assert v == series((1, T(F(1, 2))), (-1, T(1)))
    assert nov_val(v).coords == T(F(1, 2)).coords
    assert ev_at(fam((1, T(1), T(-1))), F(1, 2)) == series((1, T(F(1, 2))))


def test_window_examples():
    assert window_nonvanishing(fam((1, T(), T()))) == 1
    f = fam((1, T(), T()), (1, T(1), T(-1)))
    d = window_nonvanishing(f)
    assert d == 1
    # grid oracle: 1 + T^(1-t) has a constant term, so it never vanishes
    for j in range(-50, 50):
        t = F(j, 51)
        assert not ev_at(f, t).is_zero()
    with pytest.raises(ValueError):
        window_nonvanishing(fam((1, T(), T(1)), (-1, T(), T(2))))


coef = st.integers(-3, 3)
exp_coord = st.fractions(min_value=0, max_value=3, max_denominator=3)
flux_coord = st.integers(-2, 2)


@st.composite
def nov(draw, cutoff=None):
    n = draw(st.integers(0, 3))
    return series(*[(draw(coef), T(draw(exp_coord), draw(st.integers(0, 2))))
                    for _ in range(n)], cutoff=cutoff)


CUT = T(4)


@settings(max_examples=60, deadline=None)
@given(nov(CUT), nov(CUT), nov(CUT))
def test_ring_axioms_mod_cutoff(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)


@st.composite
def famseries(draw):
    n = draw(st.integers(0, 3))
    return fam(*[(draw(coef), T(draw(exp_coord), draw(st.integers(0, 1))),
                  T(0, 0, draw(flux_coord))) for _ in range(n)])


@settings(max_examples=100, deadline=None)
@given(famseries(), famseries(), st.fractions(min_value=-1, max_value=1, max_denominator=7))
def test_ev_at_is_multiplicative(f, g, a):
    assert ev_at(f * g, a) == ev_at(f, a) * ev_at(g, a)
    assert ev_at(f + g, a) == ev_at(f, a) + ev_at(g, a)


@settings(max_examples=40, deadline=None)
@given(famseries())
def test_window_samples_nonzero(f):
    if ev_at(f, 0).is_zero():
        return
    d = window_nonvanishing(f)
    assert d > 0
    for j in range(1, 11):
        for sgn in (1, -1):
            assert not ev_at(f, sgn * d * F(j, 11)).is_zero()


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(exp_coord, st.integers(0, 2), flux_coord), min_size=3, max_size=3))
def test_compare_is_a_total_order(cs):
    a, b, c = (T(*x) for x in cs)
    assert compare(a, b) == -compare(b, a)
    if compare(a, b) <= 0 and compare(b, c) <= 0:
        assert compare(a, c) <= 0
    assert (compare(a, b) == 0) == (a.coords == b.coords)
