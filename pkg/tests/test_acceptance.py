"""One test per acceptance criterion; each reports a single PASS/FAIL line."""

import random
import time
from fractions import Fraction as F

import pytest

from floerfam.ainf import bar_length_bound, seeded_category, validate_ainf
from floerfam.bimod import (check_closed, diagonal, family_novikov, family_padic,
                            grouplike_morphism, radius_search, rank_composition, Realization,
                            specialize)
from floerfam.cli import ScanRequest, dml_scan, flux_is_generic, square_commutes
from floerfam.exponents import ExponentBasis, sign_of
from floerfam.linalg import (exceptional_report, rank_q, rank_window_novikov,
                             seeded_family_complex, seeded_tate_complex)
from floerfam.monoid import extend_to_free, independent, membership
from floerfam.padics import (PadicNumber, binom_exp_at, binom_exp_series, binom_precision_floor,
                             build_embedding, embed_novikov)
from floerfam.torus import (LineConfig, bigon_pair, geometric_rank_oracle, irrational_bigon,
                            lattice_triangle_oracle, mu2_table, rational_bigon, torus_lines)


@pytest.fixture
def report(request):
    tr = request.config.pluginmanager.get_plugin("terminalreporter")

    def emit(n, ok, detail):
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})"
        print(line)
        if tr is not None:
            tr.write_line("")
            tr.write_line(line)
    return emit


def embedding_for(cat, p=5, N=12, seed=0):
    mode = "generic" if flux_is_generic(cat) else "monotone"
    return build_embedding(cat.basis, mode, p, N, seed)


def test_criterion_1_exponential_law(report):
    t0 = time.perf_counter()
    N, D = 12, 24
    bad = []
    for p in (3, 5, 7):
        rng = random.Random(f"exp-law:{p}")
        floor = binom_precision_floor(p, N, D)
        for _ in range(200):
            v = PadicNumber.from_rational(F(1 + p * rng.randint(0, p ** 6)), p, N)
            w = PadicNumber.from_rational(F(1 + p * rng.randint(0, p ** 6)), p, N)
            t = F(rng.randint(-40, 40), rng.choice([c for c in range(1, 9) if c % p]))
            u = F(rng.randint(-40, 40), rng.choice([c for c in range(1, 9) if c % p]))
            sv, sw, svw = binom_exp_series(v, D), binom_exp_series(w, D), binom_exp_series(v * w, D)
            if (sv.eval(t + u) - sv.eval(t) * sv.eval(u)).val < floor:
                bad.append(("add", p, t, u))
            if (svw.eval(t) - sv.eval(t) * sw.eval(t)).val < floor:
                bad.append(("mul", p, t))
        v = PadicNumber.from_rational(F(1 + p * 7), p, N)
        prod = PadicNumber.from_rational(F(1), p, N)
        for n in range(1, 11):
            prod = prod * v
            if binom_exp_at(v, n) != prod:
                bad.append(("power", p, n))
    dt = time.perf_counter() - t0
    ok = not bad and dt < 1
    report(1, ok, f"600 law instances and 30 powers, {len(bad)} failures, {dt:.2f}s")
    assert not bad
    assert dt < 1


def test_criterion_2_diagonal_and_square(report):
    t0 = time.perf_counter()
    cats = [seeded_category(s) for s in range(20)]
    cats += [bigon_pair(rational_bigon()), bigon_pair(irrational_bigon())]
    bad = []
    points = [F(0), F(1), F(-1), F(5), F(-5), F(1, 3), F(-1, 3)]
    for cat in cats:
        nov = Realization("novikov", cat.basis)
        one = specialize(family_novikov(cat), 0)
        if one.structure_constants() != diagonal(cat, nov).structure_constants():
            bad.append((cat.name, "diagonal"))
        e = embedding_for(cat)
        padic0 = specialize(family_padic(cat, e), 0).structure_constants()
        diag = {k: embed_novikov(e, v) for k, v in diagonal(cat, nov).structure_constants().items()}
        if not square_commutes(diag, padic0):
            bad.append((cat.name, "t=0 diagonal"))
        for f in points:
            a = specialize(family_novikov(cat, window=(-6, 6)), f).structure_constants()
            b = specialize(family_padic(cat, e), f).structure_constants()
            if not square_commutes({k: embed_novikov(e, v) for k, v in a.items()}, b):
                bad.append((cat.name, f))
    dt = time.perf_counter() - t0
    ok = not bad and dt < 10
    report(2, ok, f"{len(cats)} categories x {len(points)} points, {len(bad)} failures, "
                  f"{dt:.2f}s")
    assert not bad
    assert dt < 10


def test_criterion_3_grouplike_evidence(report):
    t0 = time.perf_counter()
    cats = [(f"seed:{s}", seeded_category(s)) for s in range(20)]
    cats += [("bigon-rational", bigon_pair(rational_bigon())),
             ("bigon-irrational", bigon_pair(irrational_bigon()))]
    bad = []
    rng = random.Random("rank-composition")
    for name, cat in cats:
        e = embedding_for(cat)
        lmax = bar_length_bound(cat)
        g = grouplike_morphism(family_padic(cat, e), lmax)
        closed = check_closed(g, lmax)
        if not closed.passed:
            bad.append(f"{name} not closed")
        rr = radius_search(g, n_max=3)
        n = rr.n
        if n is None:
            bad.append(f"{name} no radius")
            n = 0
        for _ in range(10):
            f1 = F(e.p ** n * rng.randint(-4, 4))
            f2 = F(e.p ** n * rng.randint(-4, 4))
            for x in cat.objects:
                for y in cat.objects:
                    conv, single = rank_composition(cat, f1, f2, x, y)
                    if conv != single:
                        bad.append(f"{name} ranks at ({f1}, {f2}) on {x},{y}")
    dt = time.perf_counter() - t0
    ok = not bad and dt < 60
    report(3, ok, f"{len(cats)} categories, {dt:.2f}s" + (f"; {'; '.join(bad)}" if bad else ""))
    assert not bad
    assert dt < 60


def test_criterion_4_torus_scan(report):
    t0 = time.perf_counter()
    rat = dml_scan(ScanRequest("bigon-rational", k_range=(-6, 6)))
    irr = dml_scan(ScanRequest("bigon-irrational", k_range=(-6, 6)))
    dt = time.perf_counter() - t0
    ks = list(range(-6, 7))
    want_rat = [geometric_rank_oracle(rational_bigon(), k) for k in ks]
    want_irr = [geometric_rank_oracle(irrational_bigon(), k) for k in ks]
    checks = [
        rat.ranks == want_rat,
        [rat.ranks[ks.index(k)] for k in (0, 1, 2)] == [2, 0, 0],
        rat.verdict == "periodic, period 3",
        irr.ranks == want_irr,
        irr.verdict == "constant 0, exceptional set {0}",
        irr.exceptional == [0],
        dt < 5,
    ]
    ok = all(checks)
    report(4, ok, f"rational '{rat.verdict}', irrational '{irr.verdict}', {dt:.2f}s")
    assert ok


def test_criterion_5_rank_constancy(report):
    t0 = time.perf_counter()
    bad = []
    ks = list(range(-50, 51))
    for seed in range(50):
        cx, planted = seeded_tate_complex(seed)
        rep = exceptional_report(cx, ks)
        if len(rep.exceptional) > rep.bound:
            bad.append((seed, "bound"))
        off = {tuple(h) for k, h in zip(ks, rep.ranks) if k not in rep.exceptional}
        if len(off) > 1:
            bad.append((seed, "constancy"))
        if rep.exceptional != planted:
            bad.append((seed, "planted"))
    dt = time.perf_counter() - t0
    ok = not bad and dt < 30
    report(5, ok, f"50 complexes, {len(bad)} failures, {dt:.2f}s")
    assert not bad
    assert dt < 30


BASIS3 = ExponentBasis.make([
    ("one", "energy", 1),
    ("r2", "energy", F(14142136, 10 ** 7), F(1, 10 ** 6), "sqrt(2)"),
    ("r3", "energy", F(17320508, 10 ** 7), F(1, 10 ** 6), "sqrt(3)"),
])


def test_criterion_6_monoid(report):
    bad = []
    worst = 0.0
    for seed in range(100):
        rng = random.Random(f"monoid:{seed}")
        xs = []
        while not xs:
            for _ in range(rng.randint(1, 5)):
                v = BASIS3.vec([F(rng.randint(-6, 6), rng.randint(1, 3)),
                                rng.randint(0, 3), rng.randint(0, 3)])
                if not v.is_zero() and sign_of(v) > 0:
                    xs.append(v)
        t0 = time.perf_counter()
        gens = extend_to_free(xs)
        worst = max(worst, time.perf_counter() - t0)
        if rank_q([list(g.coords) for g in gens]) != len(gens) or not independent(gens):
            bad.append((seed, "independence"))
        if len(gens) > len(xs):
            bad.append((seed, "cardinality"))
        for v in xs:
            cert = membership(gens, v)
            if cert is None or not cert.verify():
                bad.append((seed, "membership"))
    ok = not bad and worst < 1
    report(6, ok, f"100 inputs, {len(bad)} failures, slowest {worst:.3f}s")
    assert not bad
    assert worst < 1


def test_criterion_7_semicontinuity_window(report):
    t0 = time.perf_counter()
    cfg = rational_bigon(F(1, 4), F(3, 4))
    cat = bigon_pair(cfg)
    complexes = [family_novikov(cat).fiber_complex("L0", "L1")]
    complexes += [seeded_family_complex(seed) for seed in range(20)]
    bad = []
    for i, cx in enumerate(complexes):
        at_one = rank_window_novikov(cx, [0])
        if at_one.ranks[0] != [0, 0]:
            bad.append((i, "not acyclic at z=1"))
            continue
        rep = rank_window_novikov(cx, grid=20)
        if rep.delta is None or rep.delta <= 0:
            bad.append((i, "no window"))
        if len(rep.samples) != 20 or any(h != [0, 0] for h in rep.ranks):
            bad.append((i, "sample"))
        if any(abs(s) >= rep.delta for s in rep.samples):
            bad.append((i, "outside"))
    dt = time.perf_counter() - t0
    ok = not bad and dt < 5
    report(7, ok, f"{len(complexes)} complexes x 20 samples, {len(bad)} failures, {dt:.2f}s")
    assert not bad
    assert dt < 5


def test_criterion_8_line_category(report):
    t0 = time.perf_counter()
    bad = []
    for emax in (2, 5):
        cfg = LineConfig(((0, 1), (1, 1), (1, 0)), emax=emax)
        cat = torus_lines(cfg)
        if not validate_ainf(cat).passed:
            bad.append((emax, "associativity"))
        if mu2_table(cat) != lattice_triangle_oracle(cfg, 0, 1, 2):
            bad.append((emax, "oracle"))
        if not cat.terms:
            bad.append((emax, "no products"))
    dt = time.perf_counter() - t0
    ok = not bad and dt < 10
    report(8, ok, f"E_max in {{2, 5}}, {len(bad)} failures, {dt:.2f}s")
    assert not bad
    assert dt < 10
