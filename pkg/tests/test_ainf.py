import json
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from floerfam.ainf import (INF, CategoryError, DiscTerm, Generator, bar_length_bound,
                           category_to_json, check_degrees, check_energy_positivity,
                           empty_category, load_category, make_category, seeded_category,
                           validate_ainf)
from floerfam.exponents import ExponentBasis
from floerfam.torus import bigon_pair, rational_bigon

B = ExponentBasis.make([("E", "energy", 1)])


def chain(terms, gens=None, validate=True):
    # X0 -a-> X1 -b-> X2 with c: X0 -> X2 and an odd partner e of c
    gens = gens or [Generator("a", "X0", "X1", 0), Generator("b", "X1", "X2", 0),
                    Generator("c", "X0", "X2", 0), Generator("e", "X0", "X2", 1)]
    return make_category(("X0", "X1", "X2"), gens, terms, B, validate=validate)


def test_product_category_validates():
    cat = chain([DiscTerm(("a", "b"), "c", F(1), (F(1),))])
    rep = validate_ainf(cat)
    assert rep.passed and rep.checked > 0


def test_differential_must_square_to_zero():
    # c -> e and e -> c would give mu1 mu1 != 0
    with pytest.raises(CategoryError):
        make_category(("X0", "X2"), [Generator("c", "X0", "X2", 0),
                                     Generator("e", "X0", "X2", 1)],
                      [DiscTerm(("c",), "e", F(1), (F(1),)),
                       DiscTerm(("e",), "c", F(1), (F(1),))], B)


def test_sign_flip_breaks_leibniz():
    gens = [Generator("a", "X0", "X1", 0), Generator("a1", "X0", "X1", 1),
            Generator("b", "X1", "X2", 0), Generator("c", "X0", "X2", 0),
            Generator("c1", "X0", "X2", 1)]
    good = [DiscTerm(("a",), "a1", F(1), (F(1),)), DiscTerm(("c",), "c1", F(1), (F(1),)),
            DiscTerm(("a", "b"), "c", F(1), (F(1),)), DiscTerm(("a1", "b"), "c1", F(-1), (F(1),))]
    cat = chain(good, gens)
    assert validate_ainf(cat).passed
    bad = good[:3] + [DiscTerm(("a1", "b"), "c1", F(1), (F(1),))]
    rep = validate_ainf(chain(bad, gens, validate=False))
    assert not rep.passed and rep.failures


def test_degree_parity_checked():
    cat = chain([DiscTerm(("a", "b"), "e", F(1), (F(1),))], validate=False)
    assert check_degrees(cat)
    assert not validate_ainf(cat).passed


def test_zero_energy_rejected():
    with pytest.raises(CategoryError):
        chain([DiscTerm(("a", "b"), "c", F(1), (F(0),))])


def test_backward_morphism_rejected():
    with pytest.raises(CategoryError):
        make_category(("X0", "X1"), [Generator("a", "X1", "X0", 0)], [], B)


def test_empty_category():
    cat = empty_category()
    assert validate_ainf(cat).passed
    assert check_energy_positivity(cat) is INF
    assert bar_length_bound(cat) == 0


def test_energy_positivity_bigon():
    cat = bigon_pair(rational_bigon(F(1, 4), F(3, 4)))
    d = check_energy_positivity(cat)
    assert d.coords == cat.basis.vec([F(1, 4)]).coords
    units_only = make_category(("X0", "X1"), [Generator("a", "X0", "X1", 0)], [], B)
    assert check_energy_positivity(units_only) is INF


def test_bar_length_bound():
    cat = chain([DiscTerm(("a", "b"), "c", F(1, 2), (F(1, 3),))])
    assert bar_length_bound(cat) == 2
    # every product costs 1/3: the bound is min(longest path, ceil(emax / (1/3)))
    assert bar_length_bound(cat, B.vec([F(1)])) == 2
    assert bar_length_bound(cat, B.vec([F(1, 2)])) == 2
    assert bar_length_bound(cat, B.vec([F(1, 3)])) == 1


def test_round_trip(tmp_path):
    cat = seeded_category(7)
    doc = category_to_json(cat)
    again = load_category(json.loads(json.dumps(doc)))
    assert category_to_json(again) == doc
    assert again.digest() == cat.digest()
    path = tmp_path / "cat.json"
    path.write_text(json.dumps(doc))
    assert load_category(str(path)).digest() == cat.digest()


def test_schema_errors():
    doc = category_to_json(seeded_category(1))
    doc["mu"][0]["arity"] = 9
    with pytest.raises(CategoryError):
        load_category(doc)
    with pytest.raises(CategoryError):
        load_category({"objects": ["X"], "homs": [{"source": "X"}]})


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_seeded_categories_satisfy_relations(seed):
    cat = seeded_category(seed)
    assert len(cat.objects) <= 3
    assert all(len(v) <= 4 for v in cat.homs.values())
    assert validate_ainf(cat).passed
    assert check_energy_positivity(cat) is not INF
