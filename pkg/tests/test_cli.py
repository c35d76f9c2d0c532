import json
from fractions import Fraction as F

import pytest
from click.testing import CliRunner

from floerfam.ainf import category_to_json, seeded_category
from floerfam.cli import EXIT_FAIL, EXIT_OK, ScanRequest, dml_scan, flux_is_generic, main
from floerfam.exponents import ExponentBasis
from floerfam.torus import LineConfig, geometric_rank_oracle, rational_bigon, torus_lines


def run(*args):
    return CliRunner().invoke(main, list(args), catch_exceptions=False)


def test_scan_is_deterministic():
    a = dml_scan(ScanRequest("bigon-rational"))
    b = dml_scan(ScanRequest("bigon-rational"))
    assert a.digest == b.digest and a.to_json() == b.to_json()


def test_rational_scan_matches_geometry():
    cfg = rational_bigon(F(1, 4), F(3, 4), F(1, 4))
    res = dml_scan(ScanRequest(cfg, k_range=(-8, 8)))
    assert res.ranks == [geometric_rank_oracle(cfg, k) for k in range(-8, 9)]
    assert res.verdict == "periodic, period 4"
    assert res.novikov_match is not False


def test_generic_scan_classes_are_constant_off_exceptions():
    res = dml_scan(ScanRequest("bigon-irrational", k_range=(-10, 10)))
    for c in res.classes:
        members = [k for k in res.ks if k % c["modulus"] == c["residue"]]
        vals = {r for k, r in zip(res.ks, res.ranks) if k in members and k not in c["exceptional"]}
        assert len(vals) <= 1
        assert len(c["exceptional"]) <= c["bound"]
    assert res.exceptional == [0]


def test_seeded_scan_is_constant():
    res = dml_scan(ScanRequest("seed:5", objects=("X0", "X2"), k_range=(-4, 4)))
    assert len(set(res.ranks)) == 1 and res.exceptional == []


def test_rational_flux_without_period_is_refused():
    basis = ExponentBasis.make([("E", "energy", 1), ("phi", "flux", F(1, 2))])
    cat = torus_lines(LineConfig(((0, 1), (1, 1)), basis=basis))
    assert not flux_is_generic(cat)
    with pytest.raises(ValueError):
        dml_scan(ScanRequest(cat, objects=("L0", "L1")))


def test_validate_command(tmp_path):
    path = tmp_path / "cat.json"
    path.write_text(json.dumps(category_to_json(seeded_category(2))))
    r = run("validate", str(path))
    assert r.exit_code == EXIT_OK and "pass" in r.output
    doc = category_to_json(seeded_category(2))
    doc["mu"][0]["coefficient"] = "7"
    path.write_text(json.dumps(doc))
    assert run("validate", str(path)).exit_code != EXIT_OK


def test_dml_scan_command(tmp_path):
    out = tmp_path / "scan.json"
    r = run("dml-scan", "bigon-rational", "--json-out", str(out))
    assert r.exit_code == EXIT_OK
    assert "periodic, period 3" in r.output
    assert json.loads(out.read_text())["oracle_match"] is True


def test_specialize_and_profile_commands():
    r = run("specialize", "seed:2", "--f", "1/3")
    assert r.exit_code == EXIT_OK and "commutes" in r.output
    assert run("rank-profile", "seed:4", "--k-range", "-3..3").exit_code == EXIT_OK


def test_group_like_command():
    assert run("group-like-check", "seed:1").exit_code == EXIT_OK
    assert run("group-like-check", "bigon-rational").exit_code == EXIT_FAIL


def test_monoid_command(tmp_path):
    path = tmp_path / "m.json"
    path.write_text(json.dumps({"basis": {"symbols": [{"name": "E", "role": "energy",
                                                       "midpoint": "1"}]},
                                "elements": [["3"], ["2"]]}))
    r = run("monoid-extend", str(path))
    assert r.exit_code == EXIT_OK, r.output


def test_bad_input_is_a_usage_error():
    r = CliRunner().invoke(main, ["dml-scan", "no-such-source"])
    assert r.exit_code == EXIT_FAIL and "Error" in r.output


def test_step_must_be_a_p_adic_integer():
    cfg = rational_bigon(F(1, 2), F(1, 2), F(2, 5))
    with pytest.raises(ValueError):
        dml_scan(ScanRequest(cfg, p=5))
    res = dml_scan(ScanRequest(cfg, p=7, k_range=(-10, 10)))
    assert res.verdict == "periodic, period 5" and res.oracle_match
