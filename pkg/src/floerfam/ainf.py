"""Finite directed A-infinity categories with energy and boundary-flux decorations.

Objects are totally ordered and non-unit morphisms only go from an earlier
object to a later one, so every bar word has bounded length. Identity
morphisms are strict and implicit. Inputs are written in path order: x_1
runs from X_0 to X_1, x_2 from X_1 to X_2 and so on, the output runs from
X_0 to X_k.

Sign convention: with reduced degree ||x|| = |x| - 1, the bar differential
    b(w) = sum over blocks w[i:j] of (-1)^(||w_0|| + ... + ||w_{i-1}||) w[:i] op(w[i:j]) w[j:]
squares to zero exactly when the structure maps satisfy the A-infinity
relations. Every other structure in the package (bimodules, convolutions,
morphisms, cones) is checked through the same identity.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction

from .exponents import (INF, Exponent, ExponentBasis, PrecisionError, compare, frac,
                        frac_str, sign_of)

UNIT_PREFIX = "1@"


def unit_name(obj: str) -> str:
    return UNIT_PREFIX + obj


def is_unit(name: str) -> bool:
    return name.startswith(UNIT_PREFIX)


# ---------------------------------------------------------------- weights


def _vzero(n):
    return (Fraction(0),) * n


def _vadd(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _vscale(c, a):
    return tuple(c * x for x in a)


class Weight:
    """Finite sum of c * T^beta * t1^r1 * t2^r2 with exponent vectors over a basis.

    t1 and t2 stand for the two family parameters; a one-parameter family
    only uses r1. Keys are (beta, r1, r2) coordinate tuples.
    """

    __slots__ = ("terms", "n")

    def __init__(self, n: int, terms=None):
        self.n = n
        self.terms = {k: v for k, v in (terms or {}).items() if v != 0}

    @classmethod
    def mono(cls, n, coeff, beta=None, r1=None, r2=None):
        z = _vzero(n)
        key = (tuple(beta) if beta is not None else z, tuple(r1) if r1 is not None else z,
               tuple(r2) if r2 is not None else z)
        return cls(n, {key: frac(coeff)})

    @classmethod
    def one(cls, n):
        return cls.mono(n, 1)

    def is_zero(self):
        return not self.terms

    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return Weight(self.n, out)

    def __neg__(self):
        return Weight(self.n, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Weight(self.n, {k: v * other for k, v in self.terms.items()})
        out = {}
        for (b1, s1, u1), c1 in self.terms.items():
            for (b2, s2, u2), c2 in other.terms.items():
                k = (_vadd(b1, b2), _vadd(s1, s2), _vadd(u1, u2))
                out[k] = out.get(k, 0) + c1 * c2
        return Weight(self.n, out)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, Weight) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def only_t1(self) -> bool:
        return all(not any(r2) for (_, _, r2) in self.terms)

    def constant(self) -> bool:
        return all(not any(r1) and not any(r2) for (_, r1, r2) in self.terms)

    def truncate(self, basis: ExponentBasis, emax: Exponent | None):
        """Drop monomials whose energy is certified to be >= emax."""
        if emax is None:
            return self
        keep = {k: v for k, v in self.terms.items()
                if compare(Exponent(basis, k[0]), emax) < 0}
        return Weight(self.n, keep)

    def min_energy(self, basis: ExponentBasis):
        if not self.terms:
            return INF
        best = None
        for (b, _, _) in self.terms:
            e = Exponent(basis, b)
            if best is None or compare(e, best) < 0:
                best = e
        return best

    def __repr__(self):
        parts = []
        for (b, r1, r2), c in sorted(self.terms.items()):
            s = frac_str(c)
            if any(b):
                s += f"*T^{[frac_str(x) for x in b]}"
            if any(r1):
                s += f"*t1^{[frac_str(x) for x in r1]}"
            if any(r2):
                s += f"*t2^{[frac_str(x) for x in r2]}"
            parts.append(s)
        return " + ".join(parts) or "0"


# ---------------------------------------------------------------- category data


@dataclass(frozen=True)
class Generator:
    name: str
    source: str
    target: str
    degree: int


@dataclass(frozen=True)
class DiscTerm:
    """One structure-constant contribution mu(inputs) -> coefficient T^energy output.

    Boundary fluxes are given either as arcs (one integer vector per boundary
    arc: arc 0 runs from the output to input 1, arc j from input j to input
    j+1, arc k from input k back to the output) or as segment fluxes
    {dh, d1, d2} used for every choice of module input. With neither, the
    category's per-generator path classes are used.
    """

    inputs: tuple
    output: str
    coefficient: Fraction
    energy: tuple
    arcs: tuple | None = None
    fluxes: dict | None = field(default=None, compare=False, hash=False)
    morse: bool = False

    def segment_h(self, pos: int, cat: "AinfCategory"):
        """Flux of the boundary from the module input at pos to the output."""
        if self.arcs is not None:
            return _vsum(self.arcs[pos + 1:], cat.flux_rank)
        if self.fluxes is not None:
            return tuple(self.fluxes.get("dh", (0,) * cat.flux_rank))
        return cat.gauge_segment(self.inputs, self.output, pos)

    def segments_12(self, a: int, b: int, cat: "AinfCategory"):
        """Fluxes of the boundary from the inputs at a and at b to the output."""
        if self.arcs is not None:
            return (_vsum(self.arcs[a + 1:], cat.flux_rank),
                    _vsum(self.arcs[b + 1:], cat.flux_rank))
        if self.fluxes is not None:
            z = (0,) * cat.flux_rank
            return tuple(self.fluxes.get("d1", z)), tuple(self.fluxes.get("d2", z))
        return (cat.gauge_segment(self.inputs, self.output, a),
                cat.gauge_segment(self.inputs, self.output, b))


def _vsum(vs, b):
    out = [0] * b
    for v in vs:
        for i, x in enumerate(v):
            out[i] += x
    return tuple(out)


class CategoryError(ValueError):
    pass


@dataclass
class AinfCategory:
    objects: tuple
    generators: dict
    homs: dict
    terms: dict
    basis: ExponentBasis
    flux_form: tuple
    potential: dict = field(default_factory=dict)
    arity_cap: int = 4
    emax: Exponent | None = None
    name: str = "category"

    @property
    def flux_rank(self) -> int:
        return len(self.flux_form)

    @property
    def n(self) -> int:
        return len(self.basis)

    def order(self, obj: str) -> int:
        return self.objects.index(obj)

    def degree(self, name: str) -> int:
        return 0 if is_unit(name) else self.generators[name].degree

    def ends(self, name: str):
        if is_unit(name):
            o = name[len(UNIT_PREFIX):]
            return o, o
        g = self.generators[name]
        return g.source, g.target

    def hom(self, x: str, y: str):
        return list(self.homs.get((x, y), ()))

    def module_basis(self, x: str, y: str):
        """Generators of the diagonal bimodule at (x, y): the hom plus the unit."""
        out = [unit_name(x)] if x == y else []
        return out + self.hom(x, y)

    def flux_exponent(self, vec) -> tuple:
        out = [Fraction(0)] * self.n
        for c, row in zip(vec, self.flux_form):
            if c:
                for i, x in enumerate(row.coords):
                    out[i] += c * x
        return tuple(out)

    def path_class(self, name: str):
        if is_unit(name):
            return (0,) * self.flux_rank
        return tuple(self.potential.get(name, (0,) * self.flux_rank))

    def gauge_segment(self, inputs, output, pos):
        a, b = self.path_class(output), self.path_class(inputs[pos])
        return tuple(x - y for x, y in zip(a, b))

    def mu(self, names):
        """Terms of mu(names) including strict unit rules; list of (DiscTerm)."""
        names = tuple(names)
        if any(is_unit(x) for x in names):
            return _unit_terms(self, names)
        return self.terms.get(names, ())

    def composable(self, names) -> bool:
        for u, v in zip(names, names[1:]):
            if self.ends(u)[1] != self.ends(v)[0]:
                return False
        return True

    def paths(self, max_len: int | None = None):
        """All composable words of non-unit generators."""
        gens = sorted(self.generators)
        out = [(g,) for g in gens]
        frontier = list(out)
        length = 1
        while frontier and (max_len is None or length < max_len):
            nxt = []
            for w in frontier:
                tail = self.ends(w[-1])[1]
                for g in gens:
                    if self.generators[g].source == tail:
                        nxt.append(w + (g,))
            out.extend(nxt)
            frontier = nxt
            length += 1
        return out

    def digest(self) -> str:
        blob = json.dumps(category_to_json(self), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def _unit_terms(cat, names):
    if len(names) != 2:
        return ()
    a, b = names
    z = _vzero(cat.n)
    if is_unit(a):
        other, sign = b, 1
    else:
        other, sign = a, (-1) ** cat.degree(a)
    return (DiscTerm(names, other, Fraction(sign), z, morse=True),)


# ---------------------------------------------------------------- bar engine


# letters with this tag sit in the shifted source summand of a cone
SHIFTED_TAG = "S"


def reduced(cat: AinfCategory, letter) -> int:
    return (cat.degree(letter[1]) - (0 if letter[0] == SHIFTED_TAG else 1)) % 2


def apply_b(cat: AinfCategory, ops, word, within=None):
    """Bar differential of a word of (tag, name) letters.

    ops(block) returns a list of (output letter, Weight). If within is a pair
    (lo, hi), only blocks inside word[lo:hi] are used.
    """
    out: dict = {}
    n = len(word)
    lo, hi = within or (0, n)
    prefix = [0] * (n + 1)
    for i, l in enumerate(word):
        prefix[i + 1] = prefix[i] + reduced(cat, l)
    for i in range(lo, hi):
        sign = -1 if prefix[i] % 2 else 1
        for j in range(i + 1, hi + 1):
            for letter, w in ops(word[i:j]):
                key = word[:i] + (letter,) + word[j:]
                val = w * sign
                if key in out:
                    out[key] = out[key] + val
                else:
                    out[key] = val
    return {k: v for k, v in out.items() if not v.is_zero()}


def apply_b_chain(cat, ops, chain, within=None):
    out: dict = {}
    for word, c in chain.items():
        for k, v in apply_b(cat, ops, word, within).items():
            val = c * v
            out[k] = out[k] + val if k in out else val
    return {k: v for k, v in out.items() if not v.is_zero()}


def category_ops(cat: AinfCategory):
    """Operations on blocks of A-letters: the undeformed structure maps."""
    cache = {}

    def ops(block):
        if any(t != "A" for t, _ in block):
            return []
        names = tuple(x for _, x in block)
        if names not in cache:
            cache[names] = [(("A", t.output), Weight.mono(cat.n, t.coefficient, t.energy))
                            for t in cat.terms.get(names, ())]
        return cache[names]

    return ops


# ---------------------------------------------------------------- validation


@dataclass
class ValidationReport:
    passed: bool
    checked: int
    failures: list = field(default_factory=list)
    degree_errors: list = field(default_factory=list)
    min_residual_energy: object = None

    def to_json(self):
        return {"passed": self.passed, "checked": self.checked,
                "failures": [{"word": list(w), "residue": r} for w, r in self.failures],
                "degree_errors": self.degree_errors,
                "min_residual_energy": None if self.min_residual_energy in (None, INF)
                else str(self.min_residual_energy)}

    def summary(self) -> str:
        if self.passed:
            return f"pass: {self.checked} relation instances vanish"
        w, r = self.failures[0]
        return f"fail: {len(self.failures)} residues, first at {list(w)}: {r}"


def check_degrees(cat: AinfCategory):
    errs = []
    for names, ts in cat.terms.items():
        k = len(names)
        want = (sum(cat.degree(x) for x in names) + 2 - k) % 2
        for t in ts:
            if cat.degree(t.output) % 2 != want:
                errs.append(f"mu^{k}{list(names)} -> {t.output} has degree "
                            f"{cat.degree(t.output)}, expected parity {want}")
    return errs


def validate_ainf(cat: AinfCategory, emax: Exponent | None = None, arity: int | None = None):
    """Check every A-infinity relation on composable words, modulo T^emax."""
    emax = emax if emax is not None else cat.emax
    arity = arity or cat.arity_cap
    ops = category_ops(cat)
    failures = []
    worst = INF
    checked = 0
    for path in cat.paths(max_len=2 * arity - 1):
        word = tuple(("A", x) for x in path)
        first = apply_b(cat, ops, word)
        second = apply_b_chain(cat, ops, first)
        checked += 1
        for key, w in second.items():
            w = w.truncate(cat.basis, emax)
            if w.is_zero():
                continue
            failures.append((tuple(x for _, x in word), f"{[x for _, x in key]}: {w}"))
            e = w.min_energy(cat.basis)
            if worst == INF or compare(e, worst) < 0:
                worst = e
    degree_errors = check_degrees(cat)
    return ValidationReport(not failures and not degree_errors, checked, failures,
                            degree_errors, worst)


def check_energy_positivity(cat: AinfCategory):
    """Least energy over non-Morse terms; INF when there are none."""
    best = None
    for names, ts in cat.terms.items():
        for t in ts:
            e = Exponent(cat.basis, t.energy)
            if t.morse:
                if sign_of(e) < 0:
                    raise CategoryError(f"negative energy on Morse term mu{list(names)}")
                continue
            try:
                s = sign_of(e)
            except PrecisionError as exc:
                raise CategoryError(f"energy of mu{list(names)} -> {t.output} has "
                                    f"undetermined sign") from exc
            if s <= 0:
                raise CategoryError(f"non-positive energy {e} on mu{list(names)} -> {t.output}")
            if best is None or compare(e, best) < 0:
                best = e
    return INF if best is None else best


def bar_length_bound(cat: AinfCategory, emax: Exponent | None = None):
    """Words with more non-unit letters than this carry energy >= emax."""
    longest = max((len(p) for p in cat.paths()), default=0)
    emax = emax if emax is not None else cat.emax
    delta = check_energy_positivity(cat)
    if emax is None or delta == INF:
        return longest
    lo_e = emax.interval()[1]
    lo_d = delta.interval()[0]
    return min(longest, -(-lo_e // lo_d))


# ---------------------------------------------------------------- construction and I/O


def make_category(objects, generators, terms, basis, flux_form=(), potential=None,
                  arity_cap=4, emax=None, name="category", rescale=None,
                  validate=True) -> AinfCategory:
    """Assemble, normalise and (optionally) validate a category.

    generators: iterable of Generator. terms: iterable of DiscTerm.
    rescale maps generator names to Exponents g(x); the data is rewritten for
    the basis x -> T^g(x) x.
    """
    objects = tuple(objects)
    if len(set(objects)) != len(objects):
        raise CategoryError("object names must be unique")
    gens = {}
    homs: dict = {}
    for g in generators:
        if g.name in gens or is_unit(g.name):
            raise CategoryError(f"bad or duplicate generator name {g.name!r}")
        if g.source not in objects or g.target not in objects:
            raise CategoryError(f"generator {g.name} has unknown objects")
        if objects.index(g.source) >= objects.index(g.target):
            raise CategoryError(f"generator {g.name}: morphisms must go from an earlier to "
                                f"a later object")
        gens[g.name] = g
        homs.setdefault((g.source, g.target), []).append(g.name)
    homs = {k: tuple(v) for k, v in homs.items()}
    flux_form = tuple(f if isinstance(f, Exponent) else basis.vec(f) for f in flux_form)
    cat = AinfCategory(objects, gens, homs, {}, basis, flux_form,
                       {k: tuple(v) for k, v in (potential or {}).items()},
                       arity_cap, emax, name)
    table: dict = {}
    for t in terms:
        t = _normalise_term(cat, t, rescale)
        table.setdefault(t.inputs, []).append(t)
    cat.terms = {k: tuple(v) for k, v in table.items()}
    if validate:
        report = validate_ainf(cat)
        if not report.passed:
            raise CategoryError(f"A-infinity relations fail: {report.summary()}; "
                                f"{report.degree_errors[:1]}")
        check_energy_positivity(cat)
    return cat


def _normalise_term(cat, t: DiscTerm, rescale):
    if not t.inputs:
        raise CategoryError("curved terms (no inputs) are not supported")
    if len(t.inputs) > cat.arity_cap:
        raise CategoryError(f"term of arity {len(t.inputs)} exceeds the cap {cat.arity_cap}")
    for x in t.inputs + (t.output,):
        if x not in cat.generators:
            raise CategoryError(f"term refers to unknown generator {x!r}")
    if not cat.composable(t.inputs):
        raise CategoryError(f"inputs {list(t.inputs)} are not composable")
    if cat.ends(t.inputs[0])[0] != cat.ends(t.output)[0] or \
            cat.ends(t.inputs[-1])[1] != cat.ends(t.output)[1]:
        raise CategoryError(f"output {t.output} does not match inputs {list(t.inputs)}")
    energy = tuple(frac(x) for x in t.energy)
    if len(energy) != cat.n:
        raise CategoryError("energy vector has the wrong length")
    if rescale:
        e = cat.basis.vec(energy)
        for x in t.inputs:
            if x in rescale:
                e = e + rescale[x]
        if t.output in rescale:
            e = e - rescale[t.output]
        energy = e.coords
    arcs = t.arcs
    if arcs is not None:
        arcs = tuple(tuple(int(c) for c in a) for a in arcs)
        if len(arcs) != len(t.inputs) + 1 or any(len(a) != cat.flux_rank for a in arcs):
            raise CategoryError(f"term {list(t.inputs)} needs {len(t.inputs) + 1} arcs "
                                f"of length {cat.flux_rank}")
    return DiscTerm(tuple(t.inputs), t.output, frac(t.coefficient), energy, arcs,
                    t.fluxes, t.morse)


def category_to_json(cat: AinfCategory):
    homs = []
    for (s, t), names in sorted(cat.homs.items()):
        homs.append({"source": s, "target": t, "generators": [
            {"name": x, "degree": cat.generators[x].degree} for x in names]})
    mu = []
    for names in sorted(cat.terms):
        for t in cat.terms[names]:
            d = {"arity": len(names), "inputs": list(names), "output": t.output,
                 "coefficient": frac_str(t.coefficient),
                 "energy_coords": [frac_str(x) for x in t.energy]}
            if t.arcs is not None:
                d["arcs"] = [list(a) for a in t.arcs]
            if t.fluxes is not None:
                d["fluxes"] = {k: list(v) for k, v in t.fluxes.items()}
            if t.morse:
                d["morse"] = True
            mu.append(d)
    return {"name": cat.name, "basis": cat.basis.to_json(), "objects": list(cat.objects),
            "homs": homs, "mu": mu,
            "flux_form": [[frac_str(x) for x in f.coords] for f in cat.flux_form],
            "potential": {k: list(v) for k, v in sorted(cat.potential.items())},
            "arity_cap": cat.arity_cap,
            "E_max": None if cat.emax is None else [frac_str(x) for x in cat.emax.coords]}


def load_category(doc, validate=True) -> AinfCategory:
    """Build and validate a category from its JSON document (dict or path)."""
    if isinstance(doc, str):
        with open(doc) as fh:
            doc = json.load(fh)
    try:
        basis = ExponentBasis.from_json(doc.get("basis", {"symbols": []}))
        objects = doc.get("objects", [])
        gens = []
        rescale = {}
        for h in doc.get("homs", []):
            for g in h["generators"]:
                gens.append(Generator(g["name"], h["source"], h["target"], int(g["degree"])))
                if g.get("path_rescale"):
                    rescale[g["name"]] = basis.vec([Fraction(x) for x in g["path_rescale"]])
        terms = []
        for m in doc.get("mu", []):
            if "arity" in m and m["arity"] != len(m["inputs"]):
                raise CategoryError(f"arity {m['arity']} does not match inputs {m['inputs']}")
            fluxes = m.get("fluxes")
            if fluxes is not None:
                fluxes = {k: tuple(int(c) for c in v) for k, v in fluxes.items()}
            terms.append(DiscTerm(tuple(m["inputs"]), m["output"], Fraction(m["coefficient"]),
                                  tuple(Fraction(x) for x in m["energy_coords"]),
                                  m.get("arcs"), fluxes, bool(m.get("morse", False))))
        flux_form = [basis.vec([Fraction(x) for x in row]) for row in doc.get("flux_form", [])]
        emax = doc.get("E_max")
        emax = None if emax is None else basis.vec([Fraction(x) for x in emax])
        potential = {k: tuple(int(c) for c in v) for k, v in doc.get("potential", {}).items()}
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, CategoryError):
            raise
        raise CategoryError(f"schema violation: {exc}") from exc
    return make_category(objects, gens, terms, basis, flux_form, potential,
                         int(doc.get("arity_cap", 4)), emax, doc.get("name", "category"),
                         rescale, validate)


def empty_category(basis: ExponentBasis | None = None) -> AinfCategory:
    basis = basis or ExponentBasis.make([("E", "energy", 1)])
    return make_category((), (), (), basis)


def words_between(cat: AinfCategory, x: str, y: str, max_len: int | None = None):
    """Composable non-unit paths from x to y (possibly empty when x == y)."""
    out = [()] if x == y else []
    for p in cat.paths(max_len):
        if cat.ends(p[0])[0] == x and cat.ends(p[-1])[1] == y:
            out.append(p)
    return out



# ---------------------------------------------------------------- seeded examples


def default_basis() -> ExponentBasis:
    """One exact unit energy, one irrational energy and one irrational flux period."""
    return ExponentBasis.make([
        ("E", "energy", 1),
        ("s", "energy", Fraction(141421356, 10 ** 8), Fraction(1, 10 ** 6), "sqrt(2)"),
        ("phi", "flux", Fraction(173205081, 10 ** 8), Fraction(1, 10 ** 6), "sqrt(3)"),
    ])


def seeded_category(seed: int, n_objects: int = 3, max_gens: int = 4,
                    basis: ExponentBasis | None = None, differential: bool = True,
                    name: str | None = None) -> AinfCategory:
    """A random directed dg path category with coboundary energies and gauge fluxes.

    Morphisms are paths in a random quiver on ordered objects; mu^2 is
    concatenation and mu^1 extends a differential on arrows by the Leibniz
    rule. Energies come from a superadditive potential on paths, so every
    product has energy at least the pair weight W > 0. Fluxes come from
    random integer path classes.
    """
    import random

    rng = random.Random(f"category:{seed}")
    basis = basis or default_basis()
    n = len(basis)
    energy_idx = basis.indices("energy")
    objs = tuple(f"X{i}" for i in range(n_objects))

    def rand_energy(lo=0):
        c = [Fraction(0)] * n
        for i in energy_idx:
            c[i] = Fraction(rng.randint(lo, 2))
        if not any(c):
            c[energy_idx[0]] = Fraction(1)
        return tuple(c)

    arrows = {}
    for i in range(n_objects):
        for j in range(i + 1, n_objects):
            if j == i + 1:
                k = rng.randint(1, 2 if n_objects > 2 else max_gens)
            else:
                k = rng.randint(0, 1)
            arrows[(i, j)] = [f"a{i}{j}{c}" for c in "uvwxyz"[:k]]
    # keep every hom within max_gens generators
    def hom_size(i, j):
        total = len(arrows[(i, j)])
        for m in range(i + 1, j):
            total += len(arrows[(i, m)]) * len(arrows[(m, j)])
        return total
    for (i, j) in sorted(arrows, key=lambda k: k[1] - k[0], reverse=True):
        while hom_size(i, j) > max_gens and arrows[(i, j)]:
            arrows[(i, j)].pop()
    adeg = {a: rng.randint(0, 1) for lst in arrows.values() for a in lst}
    aen = {a: rand_energy() for a in adeg}
    # differential on arrows: pairs a -> a' inside one hom with |a'| = |a| + 1
    dmap = {}
    if differential:
        for lst in arrows.values():
            if len(lst) >= 2 and rng.random() < 0.7:
                a, b = lst[0], lst[1]
                adeg[b] = (adeg[a] + 1) % 2
                coef = Fraction(rng.choice([1, -1, 2, -2]))
                extra = rand_energy(0)
                aen[b] = tuple(x + y for x, y in zip(aen[a], extra))
                if not any(extra):
                    aen[b] = tuple(x + (1 if i == energy_idx[0] else 0)
                                   for i, x in enumerate(aen[a]))
                dmap[a] = (b, coef)
    W = [Fraction(0)] * n
    W[energy_idx[0]] = Fraction(rng.randint(1, 2))
    W = tuple(W)

    paths = []  # tuples of arrows
    for (i, j), lst in arrows.items():
        paths.extend((a,) for a in lst)
    for i in range(n_objects):
        for m in range(i + 1, n_objects):
            for j in range(m + 1, n_objects):
                for a in arrows[(i, m)]:
                    for b in arrows[(m, j)]:
                        paths.append((a, b))
    ends = {}
    for (i, j), lst in arrows.items():
        for a in lst:
            ends[a] = (i, j)

    def pname(p):
        return ".".join(p)

    def pdeg(p):
        return sum(adeg[a] for a in p) % 2

    def psi(p):
        e = [Fraction(0)] * n
        for a in p:
            e = [x + y for x, y in zip(e, aen[a])]
        pairs = len(p) * (len(p) - 1) // 2
        return tuple(x + pairs * w for x, w in zip(e, W))

    scale = {pname(p): Fraction(rng.choice([1, -1, 2, -2, 1, 1])) * Fraction(1, rng.choice([1, 1, 2]))
             for p in paths}
    pot = {pname(p): tuple(rng.randint(-2, 2) for _ in range(1)) for p in paths}

    gens = [Generator(pname(p), objs[ends[p[0]][0]], objs[ends[p[-1]][1]], pdeg(p))
            for p in paths]
    terms = []
    pset = {pname(p) for p in paths}

    def emit(inputs, out_path, sign):
        names = tuple(pname(x) for x in inputs)
        o = pname(out_path)
        if o not in pset:
            return
        coef = Fraction(sign)
        for x in names:
            coef *= scale[x]
        coef /= scale[o]
        energy = tuple(a - sum(b) for a, b in zip(psi(out_path), zip(*[psi(x) for x in inputs])))
        terms.append(DiscTerm(names, o, coef, energy))

    # mu^2: concatenation with sign (-1)^(reduced degree of the first factor)
    for p in paths:
        for q in paths:
            if ends[p[-1]][1] == ends[q[0]][0]:
                emit((p, q), p + q, (-1) ** ((pdeg(p) - 1) % 2))
    # mu^1: Leibniz extension; the sign on the k-th arrow is (-1) to the
    # reduced degree of the part before it, which matches the bar convention
    for p in paths:
        for k, a in enumerate(p):
            if a in dmap:
                b, c = dmap[a]
                before = sum(adeg[x] for x in p[:k])
                sign = c * (-1) ** before
                emit((p,), p[:k] + (b,) + p[k + 1:], sign)
    flux_form = [basis.unit("phi")] if "phi" in basis.names else [basis.zero()]
    return make_category(objs, gens, terms, basis, flux_form, pot,
                         name=name or f"seeded-{seed}")
