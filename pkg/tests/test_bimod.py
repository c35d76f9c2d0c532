from fractions import Fraction as F

import pytest

from floerfam.ainf import Weight, seeded_category
from floerfam.bimod import (FAMILY, FamilyBimodule, Realization, check_closed, cone, convolve,
                            deformed_yoneda, diagonal, family_novikov, family_padic,
                            grouplike_morphism, identity_morphism, rank_composition, ranks,
                            specialize, truncation_stability, yoneda, zero_morphism)
from floerfam.cli import flux_is_generic, square_commutes
from floerfam.exponents import ev_at
from floerfam.padics import build_embedding, embed_novikov
from floerfam.torus import (bigon_pair, geometric_rank_oracle, irrational_bigon, rational_bigon,
                            regenerate)

SEEDS = range(20)


def nov(cat):
    return Realization("novikov", cat.basis)


def pairs(cat):
    return [(x, y) for x in cat.objects for y in cat.objects]


def test_family_equations_hold_on_seeded_categories():
    for seed in range(5):
        cat = seeded_category(seed)
        assert diagonal(cat).check() == []
        assert FamilyBimodule(cat, FAMILY).check() == []


def test_unit_fiber_is_the_diagonal():
    for seed in SEEDS:
        cat = seeded_category(seed)
        one = specialize(family_novikov(cat), 0)
        assert one.structure_constants() == diagonal(cat, nov(cat)).structure_constants()
        for x, y in pairs(cat):
            assert one.fiber_complex(x, y).d0 == diagonal(cat, nov(cat)).fiber_complex(x, y).d0


def embedding_for(cat, p=5, N=12):
    mode = "generic" if flux_is_generic(cat) else "monotone"
    return build_embedding(cat.basis, mode, p, N, 0)


POINTS = [F(0), F(1), F(-1), F(5), F(-5), F(1, 3), F(-1, 3)]


def test_specialisation_square():
    cats = [seeded_category(s) for s in SEEDS]
    cats += [bigon_pair(rational_bigon()), bigon_pair(irrational_bigon())]
    for cat in cats:
        e = embedding_for(cat)
        for f in POINTS:
            a = specialize(family_novikov(cat, window=(-6, 6)), f).structure_constants()
            b = specialize(family_padic(cat, e), f).structure_constants()
            assert square_commutes({k: embed_novikov(e, v) for k, v in a.items()}, b)


def test_specialisation_checks_its_point():
    cat = seeded_category(0)
    with pytest.raises(ValueError):
        specialize(family_novikov(cat), 2)
    with pytest.raises(ValueError):
        specialize(family_padic(cat, embedding_for(cat)), F(1, 5))


def test_bigon_family_differential():
    cfg = rational_bigon(F(1, 4), F(3, 4))
    cat = bigon_pair(cfg)
    cx = family_novikov(cat, window=(-2, 2)).fiber_complex("L0", "L1")
    assert cx.sizes == (1, 1)
    for f in (F(0), F(1, 3), F(-1, 2), F(1, 7)):
        s1, s2 = cfg.shifted_areas(f)
        got = ev_at(cx.d0[0][0], f)
        want = {s1.coords: 1}
        want[s2.coords] = want.get(s2.coords, 0) - 1
        assert {e.coords: c for c, e in got.terms} == {k: v for k, v in want.items() if v}


def test_bigon_fiber_ranks_match_geometry():
    for cfg in (rational_bigon(), irrational_bigon()):
        cat = bigon_pair(cfg)
        for k in range(-6, 7):
            # move by whole periods into the chart where both strips have positive area
            f, _ = regenerate(cfg, k * cfg.step)
            fib = FamilyBimodule(cat, (f, 0, 0), nov(cat)).fiber_complex("L0", "L1")
            assert ranks(fib) == [geometric_rank_oracle(cfg, k) // 2] * 2


def test_deformed_yoneda_at_zero():
    for seed in range(5):
        cat = seeded_category(seed)
        obj = cat.objects[-1]
        plain = yoneda(cat, obj)
        plain.real = nov(cat)
        at0 = deformed_yoneda(cat, obj, 0)
        for x in cat.objects:
            assert at0.differential(x) == plain.differential(x)
        assert deformed_yoneda(cat, obj).check() == []


def test_convolution_of_diagonals_has_the_hom_ranks():
    for seed in range(8):
        cat = seeded_category(seed)
        d = diagonal(cat, nov(cat))
        conv = convolve(d, d)
        assert conv.exact and conv.check() == []
        for x, y in pairs(cat):
            assert ranks(conv.fiber_complex(x, y)) == ranks(d.fiber_complex(x, y))


def test_truncation_stability():
    cat = seeded_category(3)
    d = diagonal(cat, nov(cat))
    longest = max(len(p) for p in cat.paths())
    for x, y in pairs(cat):
        rs = truncation_stability(convolve(d, d), x, y, range(longest + 2, longest + 5))
        assert all(r == rs[0] for r in rs)


def test_closedness():
    for seed in range(5):
        cat = seeded_category(seed)
        g = grouplike_morphism(family_padic(cat, embedding_for(cat)))
        assert check_closed(g).passed
        d = diagonal(cat)
        assert check_closed(zero_morphism(d, d)).passed
        assert check_closed(identity_morphism(FamilyBimodule(cat, FAMILY))).passed
    # a perturbed structure coefficient is caught
    cat = seeded_category(0)
    g = grouplike_morphism(family_padic(cat, embedding_for(cat)))
    names, ts = next((k, v) for k, v in sorted(cat.terms.items()) if len(k) == 2)
    g.rule.perturb = {(names, ts[0].output): Weight.one(cat.n)}
    assert not check_closed(g).passed


def test_identity_cone_is_acyclic():
    for seed in range(5):
        cat = seeded_category(seed)
        c = cone(identity_morphism(diagonal(cat, nov(cat))))
        for x, y in pairs(cat):
            assert ranks(c.fiber_complex(x, y)) == [0, 0]


def test_zero_cone_doubles_the_ranks():
    cat = seeded_category(2)
    d = diagonal(cat, nov(cat))
    c = cone(zero_morphism(d, d))
    for x, y in pairs(cat):
        h = ranks(d.fiber_complex(x, y))
        assert ranks(c.fiber_complex(x, y)) == [h[0] + h[1]] * 2


def test_rank_composition_on_seeded_categories():
    for seed in range(5):
        cat = seeded_category(seed)
        for f1, f2 in [(F(0), F(0)), (F(5), F(10)), (F(-25), F(5))]:
            for x, y in pairs(cat):
                conv, single = rank_composition(cat, f1, f2, x, y)
                assert conv == single
