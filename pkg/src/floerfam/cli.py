"""Command line front end and the end-to-end rank scan.

dml_scan takes a category with a flux form, two objects and a range of
iterates k, and reports the rank of the family fiber at parameter k * step
for every k, grouped into residue classes. With a generic flux the ranks in
each class are governed by one Tate series and can only jump at its zeros;
with a flux that is a rational multiple of the total area the isotopy is
periodic and each class is a single point.
"""

from __future__ import annotations

import hashlib
import json
import math
import sys
from dataclasses import asdict, dataclass
from fractions import Fraction

import click

from .ainf import AinfCategory, load_category, seeded_category, validate_ainf
from .bimod import (FAMILY, FamilyBimodule, Realization, check_closed, family_novikov,
                    family_padic, grouplike_morphism, radius_search, ranks, specialize)
from .exponents import CutoffError, PrecisionError, frac
from .linalg import FreeComplex, cohomology_rank, exceptional_report, nullspace_q
from .monoid import extend_to_free, genericity_test, membership
from .padics import build_embedding, embed_novikov
from .torus import (BigonConfig, LineConfig, bigon_pair, geometric_rank_oracle,
                    irrational_bigon, rational_bigon, regenerate, torus_lines)

EXIT_OK, EXIT_FAIL, EXIT_PRECISION = 0, 1, 2


# ---------------------------------------------------------------- sources


def load_source(source):
    """(category, bigon config or None) from a built-in name, a config or a document path.

    Built-in names: seed:N, bigon-rational, bigon-irrational, lines,
    lines:p/q,p/q,... (slopes as p/q with q >= 0).
    """
    if isinstance(source, AinfCategory):
        return source, None
    if isinstance(source, BigonConfig):
        return bigon_pair(source), source
    if isinstance(source, LineConfig):
        return torus_lines(source), None
    s = str(source)
    if s.startswith("seed:"):
        return seeded_category(int(s[5:])), None
    if s == "bigon-rational":
        cfg = rational_bigon()
        return bigon_pair(cfg), cfg
    if s == "bigon-irrational":
        cfg = irrational_bigon()
        return bigon_pair(cfg), cfg
    if s == "lines":
        return torus_lines(LineConfig(((0, 1), (1, 1), (1, 0)))), None
    if s.startswith("lines:"):
        slopes = [tuple(int(v) for v in x.split("/")) for x in s[6:].split(",")]
        return torus_lines(LineConfig(tuple(slopes))), None
    return load_category(s), None


def flux_is_generic(cat: AinfCategory) -> bool:
    """No nonzero rational combination of flux periods lies in the energy span."""
    basis = cat.basis
    if not genericity_test(basis).passed:
        return False
    alphas = list(cat.flux_form)
    if not alphas:
        return True
    flux = basis.indices("flux")
    # combinations c with zero flux part
    M = [[a.coords[i] for a in alphas] for i in flux] or [[Fraction(0)] * len(alphas)]
    for c in nullspace_q(M, len(alphas)):
        total = basis.zero()
        for ci, a in zip(c, alphas):
            total = total + a.scale(ci)
        if not total.is_zero():
            return False
    return True


def square_commutes(a: dict, b: dict) -> bool:
    """Two dicts of p-adic structure constants agree, a missing key meaning zero."""
    for k in set(a) | set(b):
        if k not in a or k not in b:
            if not (a.get(k) or b.get(k)).is_zero():
                return False
        elif not (a[k] - b[k]).is_zero():
            return False
    return True


# ---------------------------------------------------------------- scan


@dataclass
class ScanRequest:
    source: object = "bigon-rational"
    objects: tuple = ("L0", "L1")
    p: int = 5
    N: int = 12
    D: int | None = None
    k_range: tuple = (-6, 6)
    seed: int = 0
    step: Fraction | None = None
    p2: int | None = None
    n_max: int = 3
    emax: Fraction | None = None
    lmax: int | None = None


@dataclass
class ScanResult:
    ks: list
    ranks: list
    fiber_ranks: list
    exceptional: list
    classes: list
    verdict: str
    radius: int
    radius_flag: str
    route: str
    oracle: list | None = None
    oracle_match: bool | None = None
    novikov_match: bool | None = None
    cross_check: dict | None = None
    digest: str = ""

    def to_json(self):
        d = asdict(self)
        d["exceptional"] = [int(k) for k in self.exceptional]
        return d

    def table(self) -> str:
        lines = [f"route: {self.route}; radius n = {self.radius} ({self.radius_flag})",
                 f"{'k':>4} {'H0':>4} {'H1':>4} {'rank':>5}" + ("  oracle" if self.oracle else "")]
        for i, k in enumerate(self.ks):
            h = self.fiber_ranks[i]
            row = f"{k:>4} {h[0]:>4} {h[1]:>4} {self.ranks[i]:>5}"
            if self.oracle:
                row += f"  {self.oracle[i]:>6}"
            if k in self.exceptional:
                row += "  *"
            lines.append(row)
        for c in self.classes:
            lines.append(f"class {c['residue']} mod {c['modulus']}: {c['verdict']}")
        lines.append(f"verdict: {self.verdict}")
        if self.cross_check:
            lines.append(f"cross-check p={self.cross_check['p']}: "
                         f"{'agrees' if self.cross_check['agrees'] else 'DISAGREES'}")
        lines.append(f"digest {self.digest[:16]}")
        return "\n".join(lines)


def _empty(cx: FreeComplex) -> bool:
    return sum(cx.sizes) == 0


def _least_period(seq):
    n = len(seq)
    for q in range(1, n + 1):
        if n % q == 0 and all(seq[i] == seq[i % q] for i in range(n)):
            return q
    return n


def _class_fiber(cat, emb, x, y, n, f0, D):
    real = Realization("tate", cat.basis, emb, 1, n, shift=(frac(f0), Fraction(0)), D=D)
    return FamilyBimodule(cat, FAMILY, real).fiber_complex(x, y)


def _point_fiber(cat, emb, x, y, f):
    real = Realization("padic", cat.basis, emb, 1, point=(frac(f), Fraction(0)))
    return FamilyBimodule(cat, FAMILY, real).fiber_complex(x, y)


def _periodic_scan(cat, cfg, emb, x, y, ks, step):
    """Each k is moved by whole periods; a class is one regenerated point."""
    P = cfg.period()
    Q = P / step
    if Q.denominator != 1:
        # the orbit returns only after numerator(Q) steps
        Q = Fraction(Q.numerator)
    Q = int(Q)
    per_class = {}
    for i in range(Q):
        f, _ = regenerate(cfg, i * step)
        h = cohomology_rank(_point_fiber(cat, emb, x, y, f))
        per_class[i] = (f, h)
    fiber = [per_class[k % Q][1] for k in ks]
    seq = [sum(per_class[i][1]) for i in range(Q)]
    period = _least_period(seq)
    classes = [{"residue": i, "modulus": Q, "point": str(per_class[i][0]),
                "rank": sum(per_class[i][1]), "bound": 0, "exceptional": [],
                "verdict": f"constant {sum(per_class[i][1])} (single regenerated point)"}
               for i in range(Q)]
    if period == 1:
        verdict = f"constant {seq[0]}, exceptional set {{}}"
    else:
        verdict = f"periodic, period {period}"
    regen = {k: regenerate(cfg, k * step)[0] for k in ks}
    return fiber, [], classes, verdict, regen


def _generic_scan(cat, emb, x, y, ks, step, n, D):
    """Residue classes mod p^n, each controlled by one Tate series in s."""
    p = emb.p
    m = p ** n
    fiber = {}
    exceptional = []
    classes = []
    generic_all = set()
    for i in sorted({k % m for k in ks}):
        members = [k for k in ks if k % m == i]
        cx = _class_fiber(cat, emb, x, y, n, i * step, D)
        if _empty(cx):
            for k in members:
                fiber[k] = [0, 0]
            classes.append({"residue": i, "modulus": m, "rank": 0, "bound": 0,
                            "exceptional": [], "verdict": "constant 0 (empty fiber)"})
            generic_all.add(0)
            continue
        samples = [frac((k - i) * step) / m for k in members]
        rep = exceptional_report(cx, samples)
        bound = rep.bound
        exc = [k for k, s in zip(members, samples) if s in rep.exceptional]
        for k, h in zip(members, rep.ranks):
            fiber[k] = h
        g = sum(rep.generic_ranks)
        generic_all.add(g)
        if bound != math.inf and len(exc) > bound:
            raise PrecisionError(f"class {i}: {len(exc)} exceptional points exceed the "
                                 f"Strassman bound {bound}")
        exceptional += exc
        classes.append({"residue": i, "modulus": m, "rank": g,
                        "bound": None if bound == math.inf else bound,
                        "exceptional": exc,
                        "verdict": f"constant {g} off {sorted(exc)}"})
    if len(generic_all) == 1:
        g = generic_all.pop()
        verdict = f"constant {g}, exceptional set {{{', '.join(str(k) for k in sorted(exceptional))}}}"
    else:
        verdict = "constant on residue classes mod p^n: " + ", ".join(
            f"{c['residue']}->{c['rank']}" for c in classes)
    return [fiber[k] for k in ks], sorted(exceptional), classes, verdict


def _novikov_check(cat, x, y, ks, step, regen):
    """Compare with the Novikov specialisation wherever the window allows."""
    fam = family_novikov(cat)
    lo, hi = fam.real.window
    out = {}
    for k in ks:
        f = regen.get(k, frac(k * step)) if regen else frac(k * step)
        if lo < f < hi:
            out[k] = sum(ranks(specialize(fam, f).fiber_complex(x, y)))
    return out


def dml_scan(req: ScanRequest) -> ScanResult:
    cat, cfg = load_source(req.source)
    x, y = req.objects
    for o in (x, y):
        if o not in cat.objects:
            raise ValueError(f"unknown object {o!r}")
    step = frac(req.step) if req.step is not None else (cfg.step if cfg else Fraction(1))
    for q in (req.p, req.p2):
        if q and step.denominator % q == 0:
            raise ValueError(f"step {step} is not a {q}-adic integer; choose another prime")
    ks = list(range(req.k_range[0], req.k_range[1] + 1))
    generic = flux_is_generic(cat)
    periodic = cfg is not None and cfg.period() is not None
    if not generic and not periodic:
        raise ValueError("flux is not generic and no period is known: nothing to certify")
    mode = "generic" if generic and not periodic else "monotone"
    emb = build_embedding(cat.basis, mode, req.p, req.N, req.seed)

    # group-like radius
    fam = family_padic(cat, emb, D=req.D)
    rr = radius_search(grouplike_morphism(fam, req.lmax), req.n_max)
    if rr.n is None:
        n, flag = 0, f"fallback: no certified radius ({rr.reason})"
    else:
        n, flag = rr.n, "certified"

    if periodic:
        fiber, exc, classes, verdict, regen = _periodic_scan(cat, cfg, emb, x, y, ks, step)
        route = f"periodic (period {cfg.period()} in the parameter), {mode} embedding"
    else:
        fiber, exc, classes, verdict = _generic_scan(cat, emb, x, y, ks, step, n, req.D)
        regen = {}
        route = f"residue classes mod {req.p}^{n}, {mode} embedding"
    rk = [sum(h) for h in fiber]

    oracle = match = None
    if cfg is not None:
        oracle = [geometric_rank_oracle(cfg, k) for k in ks]
        match = oracle == rk
    nov = _novikov_check(cat, x, y, ks, step, regen)
    nov_match = all(nov[k] == rk[ks.index(k)] for k in nov) if nov else None

    cross = None
    if req.p2:
        other = dml_scan(ScanRequest(req.source, req.objects, req.p2, req.N, req.D, req.k_range,
                                     req.seed, req.step, None, req.n_max, req.emax, req.lmax))
        cross = {"p": req.p2, "verdict": other.verdict, "ranks": other.ranks,
                 "agrees": other.ranks == rk and other.verdict == verdict}
    res = ScanResult(ks, rk, fiber, exc, classes, verdict, n, flag, route, oracle, match,
                     nov_match, cross)
    res.digest = hashlib.sha256(json.dumps(res.to_json(), sort_keys=True,
                                           default=str).encode()).hexdigest()
    return res


# ---------------------------------------------------------------- command line


def _k_range(text):
    a, _, b = text.partition("..")
    return int(a), int(b)


def _emit(obj, json_out):
    if json_out:
        with open(json_out, "w") as fh:
            json.dump(obj, fh, indent=2, sort_keys=True, default=str)


@click.group()
def main():
    """Families of A-infinity bimodules, p-adic interpolation and rank scans."""


def _guard(fn):
    """Map precision problems to exit code 2 and bad input to click errors."""
    import functools

    @functools.wraps(fn)
    def run(*a, **kw):
        try:
            code = fn(*a, **kw)
        except (PrecisionError, CutoffError) as e:
            click.echo(f"precision: {e}", err=True)
            sys.exit(EXIT_PRECISION)
        except (ValueError, KeyError, FileNotFoundError) as e:
            raise click.ClickException(str(e))
        sys.exit(code or EXIT_OK)
    return run


@main.command()
@click.argument("doc")
@click.option("--emax", default=None, help="energy cutoff (in units of the first energy symbol)")
@click.option("--json-out", default=None)
@_guard
def validate(doc, emax, json_out):
    """Check the A-infinity relations of a category document or built-in."""
    cat, _ = load_source(doc)
    cut = None
    if emax is not None:
        cut = cat.basis.unit(cat.basis.symbols[cat.basis.indices("energy")[0]].name, frac(emax))
    rep = validate_ainf(cat, cut)
    click.echo(f"{cat.name}: {rep.summary()}")
    _emit(rep.to_json(), json_out)
    return EXIT_OK if rep.passed else EXIT_FAIL


@main.command("monoid-extend")
@click.argument("doc")
@click.option("--json-out", default=None)
@_guard
def monoid_extend(doc, json_out):
    """Free generators for the monoid spanned by a list of positive formal reals.

    The document holds {"basis": ..., "elements": [[coords...], ...]}.
    """
    from .exponents import ExponentBasis
    with open(doc) as fh:
        d = json.load(fh)
    basis = ExponentBasis.from_json(d["basis"])
    xs = [basis.vec(v) for v in d["elements"]]
    gens = extend_to_free(xs)
    certs = [membership(gens, xv) for xv in xs]
    for g in gens:
        click.echo(f"generator {g}")
    for xv, c in zip(xs, certs):
        click.echo(f"{xv} = " + " + ".join(f"{k}*g{i}" for i, k in enumerate(c.coeffs) if k))
    _emit({"generators": [g.to_json() for g in gens],
           "certificates": [list(map(int, c.coeffs)) for c in certs]}, json_out)
    return EXIT_OK if all(c is not None and c.verify() for c in certs) else EXIT_FAIL


@main.command()
@click.argument("doc", default="seed:0")
@click.option("--mode", type=click.Choice(["monotone", "generic"]), default="generic")
@click.option("--p", default=5)
@click.option("--N", "N", default=12)
@click.option("--seed", default=0)
@click.option("--json-out", default=None)
@_guard
def embed(doc, mode, p, N, seed, json_out):
    """Images of the basis symbols in Q_p."""
    cat, _ = load_source(doc)
    e = build_embedding(cat.basis, mode, p, N, seed)
    for name, v in e.table().items():
        click.echo(f"{name:>8} -> {v.digits()}")
    _emit({"embedding": e.to_json(), "images": {k: v.to_json() for k, v in e.table().items()}},
          json_out)


@main.command("specialize")
@click.argument("doc", default="seed:0")
@click.option("--f", "point", default="0", help="rational parameter value")
@click.option("--p", default=5)
@click.option("--N", "N", default=12)
@click.option("--seed", default=0)
@click.option("--json-out", default=None)
@_guard
def specialize_cmd(doc, point, p, N, seed, json_out):
    """Fiber ranks at z = T^f and t = f, and the embedding square on structure maps."""
    cat, _ = load_source(doc)
    f = frac(point)
    mode = "generic" if flux_is_generic(cat) else "monotone"
    e = build_embedding(cat.basis, mode, p, N, seed)
    nov = specialize(family_novikov(cat, window=(-abs(f) - 1, abs(f) + 1)), f)
    pad = specialize(family_padic(cat, e), f)
    a = {k: embed_novikov(e, v) for k, v in nov.structure_constants().items()}
    b = pad.structure_constants()
    square = square_commutes(a, b)
    rows = {}
    for x in cat.objects:
        for y in cat.objects:
            rows[f"{x},{y}"] = {"novikov": ranks(nov.fiber_complex(x, y)),
                                "padic": ranks(pad.fiber_complex(x, y))}
            click.echo(f"{x:>4} {y:>4}  novikov {rows[f'{x},{y}']['novikov']}"
                       f"  padic {rows[f'{x},{y}']['padic']}")
    click.echo(f"embedding square {'commutes' if square else 'FAILS'} on {len(a)} structure maps")
    _emit({"f": str(f), "ranks": rows, "square": square}, json_out)
    agree = all(r["novikov"] == r["padic"] for r in rows.values())
    return EXIT_OK if square and agree else EXIT_FAIL


@main.command("rank-profile")
@click.argument("doc", default="seed:0")
@click.option("--p", default=5)
@click.option("--N", "N", default=12)
@click.option("--D", "D", default=None, type=int)
@click.option("--seed", default=0)
@click.option("--k-range", "k_range", default="-5..5")
@click.option("--json-out", default=None)
@_guard
def rank_profile(doc, p, N, D, seed, k_range, json_out):
    """Fiber ranks of the p-adic family at integer t, per object pair."""
    cat, _ = load_source(doc)
    mode = "generic" if flux_is_generic(cat) else "monotone"
    e = build_embedding(cat.basis, mode, p, N, seed)
    fam = family_padic(cat, e, D=D)
    a, b = _k_range(k_range)
    out = {}
    ok = True
    for x in cat.objects:
        for y in cat.objects:
            cx = fam.fiber_complex(x, y)
            if _empty(cx):
                continue
            rep = exceptional_report(cx, list(range(a, b + 1)))
            click.echo(f"[{x}, {y}]")
            click.echo(rep.table())
            if rep.bound != math.inf and len(rep.exceptional) > rep.bound:
                ok = False
            out[f"{x},{y}"] = rep.to_json()
    _emit(out, json_out)
    return EXIT_OK if ok else EXIT_FAIL


@main.command("group-like-check")
@click.argument("doc", default="seed:0")
@click.option("--p", default=5)
@click.option("--N", "N", default=12)
@click.option("--seed", default=0)
@click.option("--lmax", default=None, type=int)
@click.option("--json-out", default=None)
@_guard
def group_like_check(doc, p, N, seed, lmax, json_out):
    """Closedness of the comparison map and the radius of its invertibility."""
    cat, _ = load_source(doc)
    mode = "generic" if flux_is_generic(cat) else "monotone"
    e = build_embedding(cat.basis, mode, p, N, seed)
    g = grouplike_morphism(family_padic(cat, e), lmax)
    closed = check_closed(g, lmax)
    click.echo(closed.summary())
    rr = radius_search(g) if closed.passed else None
    if rr is not None:
        click.echo(f"radius n = {rr.n} ({rr.samples_checked} grid samples) {rr.reason}")
    _emit({"closed": closed.passed, "radius": None if rr is None else rr.to_json()}, json_out)
    return EXIT_OK if closed.passed and rr is not None and rr.n is not None else EXIT_FAIL


@main.command("dml-scan")
@click.argument("doc", default="bigon-rational")
@click.option("--objects", default="L0,L1")
@click.option("--p", default=5)
@click.option("--p2", default=None, type=int)
@click.option("--N", "N", default=12)
@click.option("--D", "D", default=None, type=int)
@click.option("--seed", default=0)
@click.option("--k-range", "k_range", default="-6..6")
@click.option("--step", default=None)
@click.option("--lmax", default=None, type=int)
@click.option("--json-out", default=None)
@_guard
def dml_scan_cmd(doc, objects, p, p2, N, D, seed, k_range, step, lmax, json_out):
    """Ranks of the fibers along the orbit k = a..b, with the exceptional set."""
    req = ScanRequest(doc, tuple(objects.split(",")), p, N, D, _k_range(k_range), seed,
                      None if step is None else frac(step), p2, lmax=lmax)
    res = dml_scan(req)
    click.echo(res.table())
    _emit(res.to_json(), json_out)
    bad = res.oracle_match is False or res.novikov_match is False or (
        res.cross_check is not None and not res.cross_check["agrees"])
    return EXIT_FAIL if bad else EXIT_OK


