import random
from fractions import Fraction as F
from math import comb

from hypothesis import given, settings
from hypothesis import strategies as st

from floerfam.exponents import ExponentBasis, NovikovSeries
from floerfam.padics import (PadicNumber, TateSeries, binom_exp_at, binom_exp_series,
                             binom_precision_floor, build_embedding, embed_exponent,
                             embed_family_weight, embed_novikov, qp_ring, strassman_bound,
                             tate_ops)


def P(x, p=5, N=10):
    return PadicNumber.from_rational(F(x), p, N)


def test_qp_examples():
    assert qp_ring("mul", P(5), P(5)).val == 2
    one_p = P(6)
    assert qp_ring("mul", qp_ring("inv", one_p), one_p) == 1
    s = qp_ring("add", P(1, 5, 4), P(4, 5, 4))
    assert s.val == 1 and s == 5


def test_binom_series_basics():
    one = binom_exp_series(P(1))
    assert one.degree() == 0 and one.eval(F(7)) == 1
    v = P(6, 5, 8)
    s = binom_exp_series(v)
    floor = binom_precision_floor(5, 8, s.D)
    # integer power oracle
    assert (s.eval(3) - P(6 ** 3, 5, 8)).val >= floor
    assert s.eval(0) == 1
    half = s.eval(F(1, 2))
    assert (half * half - v).val >= floor


def test_binom_exp_at_powers():
    v = P(1 + 5 * 7, 5, 12)
    assert binom_exp_at(v, 0) == 1
    for n in range(1, 8):
        assert binom_exp_at(v, n) == P((1 + 5 * 7) ** n, 5, 12)
    c = binom_exp_at(v, F(1, 3))
    assert c * c * c == v


def test_two_variable_law_against_substitution():
    # oracle: expand sum_j c_j (t1 + t2)^j directly
    v = P(1 + 5 * 3, 5, 8)
    s = binom_exp_series(v)
    prod = s.to_var(0) * s.to_var(1)
    floor = binom_precision_floor(5, 8, s.D)
    mod = 5 ** 8
    want = {}
    for (j,), c in s.coeffs.items():
        for i in range(j + 1):
            k = (i, j - i)
            want[k] = (want.get(k, 0) + c * comb(j, i)) % mod
    for idx, c in prod.coeffs.items():
        if sum(idx) <= s.D:
            assert (c - want.get(idx, 0)) % 5 ** floor == 0


def test_strassman_examples():
    one_plus_t = TateSeries(5, 1, 4, {(0,): 1, (1,): 1}, 0, 10)
    assert strassman_bound(one_plus_t) == 1
    s = binom_exp_series(P(6, 5, 10)) - 1
    assert strassman_bound(s) == 1
    # t (t - 1) * 3 = 3 t^2 - 3 t
    assert strassman_bound(TateSeries(5, 1, 4, {(1,): -3, (2,): 3}, 0, 10)) == 2


BASIS = ExponentBasis.make([
    ("E1", "energy", 1),
    ("E2", "energy", F(14142136, 10 ** 7), F(1, 10 ** 6), "sqrt(2)"),
    ("a", "flux", F(17320508, 10 ** 7), F(1, 10 ** 6), "sqrt(3)"),
])


def test_embedding_modes():
    m = build_embedding(BASIS, "monotone", 5, 8, 3)
    assert all(x.val == 0 and (x.unit - 1) % 5 == 0 for x in m.images)
    g = build_embedding(BASIS, "generic", 5, 8, 3)
    assert g.image("E1").val == 1 and g.image("E2").val == 1
    assert g.image("a").val == 0
    assert build_embedding(BASIS, "generic", 5, 8, 3).images == g.images


def test_embed_examples():
    g = build_embedding(BASIS, "generic", 5, 8, 1)
    z = BASIS.zero()
    assert embed_novikov(g, NovikovSeries.const(BASIS, 1)) == 1
    e12 = BASIS.vec([1, 1, 0])
    assert embed_exponent(g, e12).val == 2
    m = build_embedding(BASIS, "monotone", 5, 8, 1)
    g1, g2 = BASIS.vec([1, 0, 2]), BASIS.vec([F(1, 2), 1, -1])
    assert embed_exponent(m, g1 + g2) == embed_exponent(m, g1) * embed_exponent(m, g2)
    w = embed_family_weight(g, z)
    assert w.degree() == 0 and w.eval(3) == 1
    a = BASIS.unit("a")
    assert embed_family_weight(g, a).eval(1) == embed_exponent(g, a)
    inv = embed_family_weight(g, a, "t1") * embed_family_weight(g, a.scale(-1), "t1")
    assert inv.equals(TateSeries.const(P(1, 5, 8), 2, inv.D)._with_radius(0),
                      binom_precision_floor(5, 8, inv.D))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(0, 10 ** 6), st.integers(-20, 20),
       st.integers(-20, 20))
def test_eval_commutes_with_mul(u, w, a, b):
    p, N = 5, 8
    f = binom_exp_series(P(1 + 5 * u, p, N))
    g = binom_exp_series(P(1 + 5 * w, p, N))
    floor = binom_precision_floor(p, N, f.D)
    x = F(a, 1 + 5 * abs(b))
    assert (tate_ops("eval", f * g, x) - f.eval(x) * g.eval(x)).val >= floor


@st.composite
def nov_pair(draw):
    def one():
        n = draw(st.integers(0, 3))
        return NovikovSeries(BASIS, [(draw(st.integers(-4, 4)),
                                      BASIS.vec([draw(st.integers(0, 3)), draw(st.integers(0, 2)),
                                                 draw(st.integers(-2, 2))])) for _ in range(n)])
    return one(), one()


EMB = build_embedding(BASIS, "generic", 7, 10, 5)


@settings(max_examples=100, deadline=None)
@given(nov_pair())
def test_embed_novikov_is_a_ring_map(pair):
    a, b = pair
    assert embed_novikov(EMB, a * b) == embed_novikov(EMB, a) * embed_novikov(EMB, b)
    assert embed_novikov(EMB, a + b) == embed_novikov(EMB, a) + embed_novikov(EMB, b)


def test_strassman_sound_on_planted_roots():
    rng = random.Random(11)
    for _ in range(50):
        roots = [rng.randint(-30, 30) for _ in range(rng.randint(1, 5))]
        cs = [rng.choice([1, 2, 3, 4])]
        for r in roots:
            nxt = [0] * (len(cs) + 1)
            for k, c in enumerate(cs):
                nxt[k + 1] += c
                nxt[k] -= r * c
            cs = nxt
        f = TateSeries(5, 1, 10, {(k,): c for k, c in enumerate(cs)}, 0, 30)
        assert len(set(roots)) <= strassman_bound(f)
