from fractions import Fraction as F

import pytest

from floerfam.ainf import validate_ainf
from floerfam.bimod import FamilyBimodule, Realization, diagonal, ranks
from floerfam.torus import (LineConfig, bigon_pair, geometric_rank_oracle, intersection_points,
                            irrational_bigon, lattice_triangle_oracle, line_triangles, mu2_table,
                            rational_bigon, regenerate, torus_lines)

THREE = ((0, 1), (1, 1), (1, 0))


def test_bigon_examples():
    r = rational_bigon()
    assert r.period() == 1
    assert [geometric_rank_oracle(r, k) for k in range(-3, 4)] == [2, 0, 0, 2, 0, 0, 2]
    i = irrational_bigon()
    assert i.period() is None
    assert [geometric_rank_oracle(i, k) for k in range(-3, 4)] == [0, 0, 0, 2, 0, 0, 0]


def test_regeneration_keeps_areas_positive():
    for cfg in (rational_bigon(), rational_bigon(F(1, 4), F(3, 4), F(1, 4)),
                rational_bigon(F(2, 3), F(1, 3), F(1, 5), (1,), (-1,))):
        P = cfg.period()
        for k in range(-12, 13):
            f, turns = regenerate(cfg, k * cfg.step)
            assert f == k * cfg.step - turns * P
            assert all(s.sign() > 0 for s in cfg.shifted_areas(f))


@pytest.mark.parametrize("cfg", [
    rational_bigon(),
    rational_bigon(F(1, 4), F(3, 4), F(1, 4)),
    rational_bigon(F(1, 4), F(3, 4), F(1, 6)),
    irrational_bigon(),
])
def test_novikov_fiber_against_geometry(cfg):
    cat = bigon_pair(cfg)
    real = Realization("novikov", cat.basis)
    for k in range(-8, 9):
        f, _ = regenerate(cfg, k * cfg.step)
        fib = FamilyBimodule(cat, (f, 0, 0), real).fiber_complex("L0", "L1")
        assert sum(ranks(fib)) == geometric_rank_oracle(cfg, k)


def test_intersection_counts():
    cfg = LineConfig(((0, 1), (1, 2), (1, 0)))
    assert len(intersection_points(cfg, 0, 1)) == 1
    assert len(intersection_points(cfg, 1, 2)) == 2
    assert len(intersection_points(cfg, 0, 2)) == 1


def test_two_lines_have_rank_one():
    cat = torus_lines(LineConfig(((0, 1), (1, 1))))
    assert validate_ainf(cat).passed
    assert not cat.terms
    cx = diagonal(cat, Realization("novikov", cat.basis)).fiber_complex("L0", "L1")
    assert ranks(cx) == [1, 0]


def test_small_cutoff_kills_products():
    cfg = LineConfig(THREE)
    smallest = min(a for _, _, _, a, _ in line_triangles(cfg, 0, 1, 2))
    cat = torus_lines(LineConfig(THREE, emax=smallest))
    assert not cat.terms
    assert validate_ainf(cat).passed


@pytest.mark.parametrize("slopes", [THREE, ((0, 1), (1, 2), (1, 0)), ((-1, 1), (0, 1), (1, 1))])
@pytest.mark.parametrize("emax", [2, 5])
def test_mu2_matches_lattice_enumeration(slopes, emax):
    cfg = LineConfig(slopes, emax=emax)
    cat = torus_lines(cfg)
    assert mu2_table(cat) == lattice_triangle_oracle(cfg, 0, 1, 2)
    assert validate_ainf(cat).passed


def test_four_lines_are_associative():
    cfg = LineConfig(((0, 1), (1, 2), (1, 1), (1, 0)), emax=3)
    cat = torus_lines(cfg)
    assert validate_ainf(cat).passed
    for i, j, k in ((0, 1, 2), (1, 2, 3), (0, 2, 3), (0, 1, 3)):
        want = lattice_triangle_oracle(cfg, i, j, k)
        got = {key: v for key, v in mu2_table(cat).items()
               if key[0].startswith(f"x{i}{j}_") and key[1].startswith(f"x{j}{k}_")}
        assert got == want


def test_bad_line_configs():
    with pytest.raises(ValueError):
        LineConfig(((0, 2), (1, 1)))
    with pytest.raises(ValueError):
        LineConfig(((1, 1), (0, 1)))
