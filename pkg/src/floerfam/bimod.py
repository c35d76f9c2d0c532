"""Family bimodules, deformed Yoneda modules, convolutions, morphisms and cones.

All structures share one representation: letters (tag, generator) and block
operations returning Weights, so that every structure equation is the single
identity b o b = 0 of the bar engine in ainf. A letter tagged "A" is a
morphism of the category; any other tag names a module or bimodule slot.

A slot carries a flux scaling (a0, c1, c2): a term whose boundary segment
from the slot's input to the output has flux h contributes
T^(a0 h) t1^(c1 h) t2^(c2 h). The diagonal is (0, 0, 0), the one-parameter
family is (0, 1, 0), its pullbacks to the two factors are (0, 1, 0) and
(0, 0, 1), the pullback along addition is (0, 1, 1), and specialising the
family at z = T^f gives (f, 0, 0).

Weights are realised in a concrete ring only when a fiber complex is built:
exactly as Weights, as Novikov series, as Novikov families in z, as Tate
series in t (or t1, t2) after a p-adic embedding, or as p-adic numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .ainf import (SHIFTED_TAG, AinfCategory, Weight, apply_b, apply_b_chain, category_ops,
                   is_unit, reduced)
from .exponents import Exponent, FamilySeries, NovikovSeries, frac
from .linalg import FreeComplex, cohomology_rank, padic_rank
from .padics import (Embedding, PadicNumber, TateSeries, binom_exp_at, binom_exp_series,
                     embed_exponent, min_degree)

DIAGONAL = (Fraction(0), Fraction(0), Fraction(0))
FAMILY = (Fraction(0), Fraction(1), Fraction(0))
FAMILY_T2 = (Fraction(0), Fraction(0), Fraction(1))
SUM = (Fraction(0), Fraction(1), Fraction(1))


def scaled(scaling, h, n):
    """The Weight factor T^(a0 h) t1^(c1 h) t2^(c2 h) for a flux exponent h."""
    a0, c1, c2 = scaling
    return Weight.mono(n, 1, tuple(a0 * x for x in h), tuple(c1 * x for x in h),
                       tuple(c2 * x for x in h))


# ---------------------------------------------------------------- realisations


@dataclass
class Realization:
    """How Weights become ring elements.

    kind: weight | novikov | novikov-family | tate | padic.
    For tate, radius n means the family variables are rescaled t = p^n s and
    shift (f1, f2) means the family is recentred at t = f (so the series is
    in s with t = f + p^n s). For padic, point holds rational values of
    (t1, t2).
    """

    kind: str
    basis: object
    embedding: Embedding | None = None
    nvars: int = 1
    radius: int = 0
    point: tuple = (Fraction(0), Fraction(0))
    shift: tuple = (Fraction(0), Fraction(0))
    window: tuple = (Fraction(-1), Fraction(1))
    D: int | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def ring(self) -> str:
        return {"weight": "weight", "novikov": "novikov", "novikov-family": "family",
                "tate": "tate", "padic": "padic"}[self.kind]

    def zero(self):
        return self(Weight(len(self.basis)))

    def __call__(self, w: Weight):
        k = self.kind
        if k == "weight":
            return w
        if k == "novikov":
            terms = []
            for (b, r1, r2), c in w.terms.items():
                if any(r1) or any(r2):
                    raise ValueError("Novikov point realisation needs a specialised weight")
                terms.append((c, Exponent(self.basis, b)))
            return NovikovSeries(self.basis, terms)
        if k == "novikov-family":
            monos = {}
            for (b, r1, r2), c in w.terms.items():
                if any(r2):
                    raise ValueError("Novikov family realisation is one-parameter")
                monos[(b, r1)] = monos.get((b, r1), 0) + c
            return FamilySeries(self.basis, [(c, Exponent(self.basis, b), Exponent(self.basis, r))
                                             for (b, r), c in monos.items() if c],
                                self.window)
        if k == "tate":
            return self._tate(w)
        if k == "padic":
            return self._padic(w)
        raise ValueError(f"unknown realisation {k!r}")

    def _embed(self, b):
        key = ("e", b)
        if key not in self._cache:
            self._cache[key] = embed_exponent(self.embedding, Exponent(self.basis, b))
        return self._cache[key]

    def _series(self, r, which):
        key = ("s", r, which, self.radius, self.nvars, self.shift[which])
        if key not in self._cache:
            base = self._embed(r)
            s = binom_exp_series(base, self.D)
            f = self.shift[which]
            if f:
                # v^(f + t) = v^f v^t
                s = s * TateSeries.const(binom_exp_at(base, f), 1, s.D)
            if self.radius:
                s = s.restrict(self.radius)
            if self.nvars == 2:
                s = s.to_var(which)
            self._cache[key] = s
        return self._cache[key]

    def _const(self, x):
        e = self.embedding
        D = self.D if self.D is not None else min_degree(e.p, e.N)
        return TateSeries.const(x, self.nvars, D)._with_radius(self.radius)

    def _tate(self, w: Weight):
        e = self.embedding
        total = None
        for (b, r1, r2), c in w.terms.items():
            if self.nvars == 1 and any(r2):
                raise ValueError("one-variable realisation met a t2 weight")
            coeff = PadicNumber.from_rational(c, e.p, e.N + 4) * self._embed(b)
            term = None
            for which, r in ((0, r1), (1, r2)):
                if any(r):
                    s = self._series(r, which)
                    term = s if term is None else term * s
            term = self._const(coeff) if term is None else term * self._const(coeff)
            total = term if total is None else total + term
        if total is None:
            return self._const(PadicNumber(e.p, e.N, 0, e.N))
        return total

    def _padic(self, w: Weight):
        e = self.embedding
        total = PadicNumber(e.p, e.N, 0, e.N)
        for (b, r1, r2), c in w.terms.items():
            x = PadicNumber.from_rational(c, e.p, e.N + 4) * self._embed(b)
            for r, f in ((r1, self.point[0]), (r2, self.point[1])):
                if any(r) and f:
                    x = x * binom_exp_at(self._embed(r), f)
            total = total + x
        return total


# ---------------------------------------------------------------- total structures


class TotalStructure:
    """Block operations for a category together with module slots and morphisms.

    modules: tag -> flux scaling. morphisms: tuple of source tags ->
    Morphism rule. Blocks containing exactly one module letter get that
    module's operation, blocks containing exactly the source tags of a
    morphism get the morphism's components.
    """

    def __init__(self, cat: AinfCategory, modules=None, morphisms=None, right_only=()):
        self.cat = cat
        self.modules = dict(modules or {})
        self.morphisms = dict(morphisms or {})
        self.right_only = set(right_only)
        self._aops = category_ops(cat)
        self._cache: dict = {}

    def ops(self, block):
        hit = self._cache.get(block)
        if hit is not None:
            return hit
        slots = [i for i, (t, _) in enumerate(block) if t != "A"]
        if not slots:
            out = self._aops(block)
        else:
            out = []
            tags = tuple(block[i][0] for i in slots)
            if len(slots) == 1 and tags[0] in self.modules:
                out = self._module_op(block, slots[0], self.modules[tags[0]])
            rule = self.morphisms.get(tags)
            if rule is not None:
                out = out + rule.components(self, block, slots)
        self._cache[block] = out
        return out

    def _module_op(self, block, pos, scaling):
        tag = block[pos][0]
        if tag in self.right_only and pos != len(block) - 1:
            return []
        cat = self.cat
        names = tuple(x for _, x in block)
        # a shifted module picks up the parity of the letters to its right
        sign = 1
        if tag == SHIFTED_TAG and sum(reduced(cat, l) for l in block[pos + 1:]) % 2:
            sign = -1
        out = []
        for t in cat.mu(names):
            h = cat.flux_exponent(t.segment_h(pos, cat))
            w = Weight.mono(cat.n, sign * t.coefficient, t.energy) * scaled(scaling, h, cat.n)
            out.append(((tag, t.output), w))
        return out

    def b(self, word):
        return apply_b(self.cat, self.ops, word)

    def b2(self, word):
        return apply_b_chain(self.cat, self.ops, self.b(word))


@dataclass
class MorphismRule:
    """Components of a (pre-)morphism on blocks containing its source letters.

    kind: identity (F(m) = m, single source), structure (F = the category's
    structure maps with boundary segments weighted by scalings), or zero.
    perturb maps (input names, output name) to an extra Weight, used for
    planted failures.
    """

    kind: str
    target: str
    scalings: tuple = ()
    perturb: dict = field(default_factory=dict)

    def components(self, st: TotalStructure, block, slots):
        cat = st.cat
        names = tuple(x for _, x in block)
        out = []
        if self.kind == "identity":
            if len(block) == 1:
                sign = -1 if cat.degree(names[0]) % 2 else 1
                out.append(((self.target, names[0]), Weight.one(cat.n) * sign))
        elif self.kind == "structure":
            for t in cat.mu(names):
                w = Weight.mono(cat.n, t.coefficient, t.energy)
                if len(slots) == 1:
                    h = cat.flux_exponent(t.segment_h(slots[0], cat))
                    w = w * scaled(self.scalings[0], h, cat.n)
                else:
                    h1, h2 = t.segments_12(slots[0], slots[1], cat)
                    w = w * scaled(self.scalings[0], cat.flux_exponent(h1), cat.n)
                    w = w * scaled(self.scalings[1], cat.flux_exponent(h2), cat.n)
                out.append(((self.target, t.output), w))
        elif self.kind != "zero":
            raise ValueError(f"unknown morphism kind {self.kind!r}")
        for (inp, o), w in self.perturb.items():
            if inp == names:
                out.append(((self.target, o), w))
        return out


# ---------------------------------------------------------------- bimodules


@dataclass
class FamilyBimodule:
    """A bimodule over cat whose generators at (X, Y) are the diagonal ones."""

    cat: AinfCategory
    scaling: tuple = DIAGONAL
    real: Realization | None = None
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.real is None:
            self.real = Realization("weight", self.cat.basis)
        self.scaling = tuple(frac(x) for x in self.scaling)

    def structure(self, tag="M"):
        return TotalStructure(self.cat, {tag: self.scaling})

    def basis_words(self, x, y, tag="M"):
        return [((tag, g),) for g in self.cat.module_basis(x, y)]

    def fiber_complex(self, x, y) -> FreeComplex:
        check_objects(self.cat, x, y)
        return build_complex(self.structure(), self.basis_words(x, y), self.real,
                             {"kind": "bimodule", "objects": [x, y]})

    def structure_constants(self):
        """Realised structure maps keyed by (word, module position, output)."""
        st = self.structure()
        out = {}
        for word, pos in module_words(self.cat, "M"):
            for (tag, o), w in st.ops(word):
                key = (tuple(x for _, x in word), pos, o)
                out[key] = out.get(key, Weight(self.cat.n)) + w
        return {k: self.real(v) for k, v in out.items() if not v.is_zero()}

    def check(self):
        """Residues of the bimodule equations, exact in the weight ring."""
        st = self.structure()
        bad = []
        for word, _ in module_words(self.cat, "M"):
            for k, w in st.b2(word).items():
                bad.append((word, k, w))
        return bad

    def to_json(self):
        return {"category": self.cat.digest(), "scaling": [str(x) for x in self.scaling],
                "realisation": self.real.kind, "provenance": self.provenance}


def check_objects(cat, *objs):
    for o in objs:
        if o not in cat.objects:
            raise KeyError(f"unknown object {o!r}")


def module_words(cat: AinfCategory, tag: str, max_len: int | None = None):
    """Composable words a_1..a_r m b_1..b_s with a single module letter m."""
    objs = cat.objects
    out = []
    paths_to = {o: [()] for o in objs}
    paths_from = {o: [()] for o in objs}
    for p in cat.paths(max_len):
        paths_to.setdefault(cat.ends(p[-1])[1], []).append(p)
        paths_from.setdefault(cat.ends(p[0])[0], []).append(p)
    for x in objs:
        for y in objs:
            for m in cat.module_basis(x, y):
                for left in paths_to[x]:
                    for right in paths_from[y]:
                        word = tuple(("A", a) for a in left) + ((tag, m),) + \
                            tuple(("A", a) for a in right)
                        out.append((word, len(left)))
    return out


def diagonal(cat: AinfCategory, real: Realization | None = None) -> FamilyBimodule:
    return FamilyBimodule(cat, DIAGONAL, real or Realization("weight", cat.basis),
                          {"op": "diagonal"})


def _require_flux(cat: AinfCategory):
    if cat.flux_rank == 0:
        return
    for ts in cat.terms.values():
        for t in ts:
            if t.arcs is None and t.fluxes is None and not cat.potential:
                raise ValueError(f"term mu{list(t.inputs)} carries no boundary flux data")


def family_novikov(cat: AinfCategory, window=(Fraction(-1), Fraction(1))) -> FamilyBimodule:
    """The bimodule over Lambda{z^R} with terms weighted by z^(alpha . dh)."""
    _require_flux(cat)
    return FamilyBimodule(cat, FAMILY, Realization("novikov-family", cat.basis,
                                                   window=tuple(frac(x) for x in window)),
                          {"op": "family_novikov", "category": cat.digest()})


def family_padic(cat: AinfCategory, emb: Embedding, variables: int = 1, radius: int = 0,
                 D: int | None = None) -> FamilyBimodule:
    """The bimodule over Q_p<t> with terms weighted by embed(T^E) T_mu^(t alpha . dh)."""
    _require_flux(cat)
    if emb.basis.names != cat.basis.names:
        raise ValueError("embedding and category bases differ")
    real = Realization("tate", cat.basis, emb, variables, radius, D=D)
    return FamilyBimodule(cat, FAMILY, real,
                          {"op": "family_padic", "category": cat.digest(),
                           "embedding": emb.to_json(), "radius": radius})


def specialize(fam: FamilyBimodule, point) -> FamilyBimodule:
    """Base change of a one-parameter family to a point.

    A Novikov family at rational f becomes the bimodule over Lambda at
    z = T^f; a p-adic family at rational f in Z_(p) becomes a Q_p bimodule
    at t = f.
    """
    f = frac(point)
    a0, c1, c2 = fam.scaling
    r = fam.real
    if r.kind in ("novikov-family", "weight"):
        lo, hi = r.window
        if r.kind == "novikov-family" and not lo < f < hi:
            raise ValueError(f"point {f} outside the window ({lo}, {hi})")
        new = (a0 + c1 * f, Fraction(0), c2)
        return FamilyBimodule(fam.cat, new, Realization("novikov", fam.cat.basis),
                              dict(fam.provenance, point=str(f)))
    if r.kind == "tate":
        p = r.embedding.p
        if f.denominator % p == 0:
            raise ValueError(f"point {f} has denominator divisible by {p}")
        real = Realization("padic", fam.cat.basis, r.embedding, r.nvars,
                           point=(f, Fraction(0)))
        return FamilyBimodule(fam.cat, fam.scaling, real, dict(fam.provenance, point=str(f)))
    raise ValueError(f"cannot specialise a {r.kind} bimodule")


# ---------------------------------------------------------------- one-sided modules


@dataclass
class FamilyModule:
    """The right module hom(-, obj) with terms weighted along the obj boundary."""

    cat: AinfCategory
    obj: str
    scaling: tuple = DIAGONAL
    real: Realization | None = None

    def __post_init__(self):
        if self.real is None:
            self.real = Realization("weight", self.cat.basis)
        self.scaling = tuple(frac(x) for x in self.scaling)

    def structure(self, tag="N"):
        return TotalStructure(self.cat, {tag: self.scaling}, right_only=(tag,))

    def fiber_complex(self, x) -> FreeComplex:
        check_objects(self.cat, x)
        words = [(("N", g),) for g in self.cat.module_basis(x, self.obj)]
        return build_complex(self.structure(), words, self.real,
                             {"kind": "module", "objects": [x, self.obj]})

    def differential(self, x):
        """Realised differential as {(input, output): value}."""
        st = self.structure()
        out = {}
        for g in self.cat.module_basis(x, self.obj):
            for (tag, o), w in st.ops((("N", g),)):
                out[(g, o)] = out.get((g, o), Weight(self.cat.n)) + w
        return {k: self.real(v) for k, v in out.items() if not v.is_zero()}

    def check(self):
        st = self.structure()
        bad = []
        for word, pos in module_words(self.cat, "N"):
            if pos != len(word) - 1 or self.cat.ends(word[-1][1])[1] != self.obj:
                continue
            for k, w in st.b2(word).items():
                bad.append((word, k, w))
        return bad


def yoneda(cat: AinfCategory, obj: str) -> FamilyModule:
    check_objects(cat, obj)
    return FamilyModule(cat, obj)


def deformed_yoneda(cat: AinfCategory, obj: str, f=None) -> FamilyModule:
    """Yoneda module of obj with terms weighted by T^(f alpha . d2).

    With f None the result is the family over z (scaling in t1).
    """
    check_objects(cat, obj)
    _require_flux(cat)
    if f is None:
        return FamilyModule(cat, obj, FAMILY, Realization("novikov-family", cat.basis))
    f = frac(f)
    return FamilyModule(cat, obj, (f, 0, 0), Realization("novikov", cat.basis))


# ---------------------------------------------------------------- convolution


@dataclass
class Convolution:
    """Reduced two-sided bar convolution M1 (x)_A M2, truncated to l_max letters."""

    cat: AinfCategory
    scalings: tuple
    real: Realization
    l_max: int | None = None
    exact: bool = True

    def structure(self, morphisms=None):
        return TotalStructure(self.cat, {"M1": self.scalings[0], "M2": self.scalings[1]},
                              morphisms)

    def basis_words(self, x, y):
        cat = self.cat
        out = []
        for z1 in cat.objects:
            for m1 in cat.module_basis(x, z1):
                for z2 in cat.objects:
                    for mid in _paths_between(cat, z1, z2):
                        for m2 in cat.module_basis(z2, y):
                            word = (("M1", m1),) + tuple(("A", a) for a in mid) + (("M2", m2),)
                            if self.l_max is None or _nonunit(word) <= self.l_max:
                                out.append(word)
        return out

    def fiber_complex(self, x, y) -> FreeComplex:
        check_objects(self.cat, x, y)
        return build_complex(self.structure(), self.basis_words(x, y), self.real,
                             {"kind": "convolution", "objects": [x, y]})

    def check(self):
        st = self.structure()
        bad = []
        for x in self.cat.objects:
            for y in self.cat.objects:
                for word in self.basis_words(x, y):
                    for k, w in st.b2(word).items():
                        bad.append((word, k, w))
        return bad


def _nonunit(word):
    return sum(1 for _, g in word if not is_unit(g))


def _paths_between(cat, x, y):
    out = [()] if x == y else []
    for p in cat.paths():
        if cat.ends(p[0])[0] == x and cat.ends(p[-1])[1] == y:
            out.append(p)
    return out


def convolve(m1: FamilyBimodule, m2: FamilyBimodule, l_max: int | None = None,
             emax=None) -> Convolution:
    """Convolution of two bimodules over the same category.

    Two one-parameter families become a two-parameter family: the second
    factor's parameter is renamed t2. l_max below the longest path flags the
    result approximate.
    """
    if m1.cat is not m2.cat and m1.cat.digest() != m2.cat.digest():
        raise ValueError("convolution needs a common category")
    cat = m1.cat
    s1, s2 = m1.scaling, m2.scaling
    k1, k2 = m1.real.kind, m2.real.kind
    if s1[1] and s2[1] and not s2[2]:
        s2 = (s2[0], Fraction(0), s2[1])
    if k1 == k2 == "novikov":
        real = Realization("novikov", cat.basis)
    elif "tate" in (k1, k2):
        src = m1.real if k1 == "tate" else m2.real
        real = Realization("tate", cat.basis, src.embedding, 2, src.radius, D=src.D)
    elif "padic" in (k1, k2):
        src = m1.real if k1 == "padic" else m2.real
        real = Realization("padic", cat.basis, src.embedding, 2,
                           point=(m1.real.point[0], m2.real.point[0]))
    else:
        real = Realization("weight", cat.basis)
    longest = max((len(p) for p in cat.paths()), default=0)
    exact = l_max is None or l_max >= longest + 2
    return Convolution(cat, (s1, s2), real, l_max, exact)


# ---------------------------------------------------------------- morphisms and cones


@dataclass
class PreMorphism:
    """A pre-morphism from a bimodule or convolution to a bimodule."""

    source: object
    target: FamilyBimodule
    rule: MorphismRule
    real: Realization
    report: dict = field(default_factory=dict)

    @property
    def cat(self):
        return self.target.cat

    def source_tags(self):
        return ("M1", "M2") if isinstance(self.source, Convolution) else ("S",)

    def structure(self):
        cat = self.cat
        mods = {"D": self.target.scaling}
        if isinstance(self.source, Convolution):
            mods.update({"M1": self.source.scalings[0], "M2": self.source.scalings[1]})
        else:
            mods["S"] = self.source.scaling
        return TotalStructure(cat, mods, {self.source_tags(): self.rule})

    def source_words(self, x, y):
        if isinstance(self.source, Convolution):
            return self.source.basis_words(x, y)
        return [(("S", g),) for g in self.cat.module_basis(x, y)]

    def cone_words(self, x, y):
        return self.source_words(x, y) + [(("D", g),) for g in self.cat.module_basis(x, y)]


def identity_morphism(m: FamilyBimodule) -> PreMorphism:
    return PreMorphism(m, m, MorphismRule("identity", "D"), m.real)


def zero_morphism(src, m: FamilyBimodule) -> PreMorphism:
    return PreMorphism(src, m, MorphismRule("zero", "D"), m.real)


def grouplike_morphism(fam: FamilyBimodule, l_max=None) -> PreMorphism:
    """The comparison map pi1*M (x) pi2*M -> Delta*M for a one-parameter family.

    Terms are weighted by t1^(alpha . d1) t2^(alpha . d2), where d1 and d2 are
    the boundary segments from the two bimodule inputs to the output.
    """
    cat = fam.cat
    r = fam.real
    if r.kind == "tate":
        real = Realization("tate", cat.basis, r.embedding, 2, r.radius, D=r.D)
    else:
        real = Realization("weight", cat.basis)
    src = Convolution(cat, (FAMILY, FAMILY_T2), real, l_max)
    tgt = FamilyBimodule(cat, SUM, real, {"op": "pullback along addition"})
    rule = MorphismRule("structure", "D", (FAMILY, FAMILY_T2))
    return PreMorphism(src, tgt, rule, real)


def convolution_map(m: FamilyBimodule) -> PreMorphism:
    """The undecorated map M (x) M -> M given by the structure maps (specialised)."""
    cat = m.cat
    src = Convolution(cat, (m.scaling, m.scaling), m.real)
    rule = MorphismRule("structure", "D", (m.scaling, m.scaling))
    return PreMorphism(src, m, rule, m.real)


def with_real(m: PreMorphism, real: Realization) -> PreMorphism:
    src = m.source
    if isinstance(src, Convolution):
        src = Convolution(src.cat, src.scalings, real, src.l_max, src.exact)
    tgt = FamilyBimodule(m.target.cat, m.target.scaling, real, m.target.provenance)
    return PreMorphism(src, tgt, m.rule, real, m.report)


def at_point(m: PreMorphism, f1, f2) -> PreMorphism:
    """Specialise a two-parameter morphism at z1 = T^f1, z2 = T^f2 (Novikov)."""
    f1, f2 = frac(f1), frac(f2)

    def spec(s):
        return (s[0] + s[1] * f1 + s[2] * f2, Fraction(0), Fraction(0))

    real = Realization("novikov", m.cat.basis)
    src = m.source
    if isinstance(src, Convolution):
        src = Convolution(src.cat, tuple(spec(s) for s in src.scalings), real, src.l_max)
    else:
        src = FamilyBimodule(src.cat, spec(src.scaling), real)
    tgt = FamilyBimodule(m.cat, spec(m.target.scaling), real)
    rule = MorphismRule(m.rule.kind, m.rule.target, tuple(spec(s) for s in m.rule.scalings),
                        m.rule.perturb)
    return PreMorphism(src, tgt, rule, real)


@dataclass
class ClosedReport:
    passed: bool
    checked: int
    failures: list = field(default_factory=list)

    def summary(self):
        if self.passed:
            return f"closed: {self.checked} input words, all residues vanish"
        w, k, r = self.failures[0]
        return (f"not closed: {len(self.failures)} residues, first on "
                f"{[g for _, g in w]} -> {[g for _, g in k]}: {r}")


def check_closed(m: PreMorphism, l_max=None, emax=None) -> ClosedReport:
    """Residues of the morphism equation on every input word, exact in weights.

    The cone structure squares to zero on source words exactly when the
    source is a bimodule and the morphism is closed; the residues with a
    target letter are the morphism's defect.
    """
    st = m.structure()
    cat = m.cat
    failures = []
    checked = 0
    for x in cat.objects:
        for y in cat.objects:
            for core in m.source_words(x, y):
                for left in _paths_between_any(cat, x, "to"):
                    for right in _paths_between_any(cat, y, "from"):
                        word = tuple(("A", a) for a in left) + core + \
                            tuple(("A", a) for a in right)
                        if l_max is not None and _nonunit(word) > l_max:
                            continue
                        checked += 1
                        for k, w in st.b2(word).items():
                            if emax is not None:
                                w = w.truncate(cat.basis, emax)
                            if w.is_zero():
                                continue
                            failures.append((word, k, w))
    return ClosedReport(not failures, checked, failures)


def _paths_between_any(cat, obj, direction):
    out = [()]
    for p in cat.paths():
        if direction == "to" and cat.ends(p[-1])[1] == obj:
            out.append(p)
        if direction == "from" and cat.ends(p[0])[0] == obj:
            out.append(p)
    return out


@dataclass
class Cone:
    morphism: PreMorphism

    def fiber_complex(self, x, y, real: Realization | None = None) -> FreeComplex:
        m = self.morphism
        check_objects(m.cat, x, y)
        return build_complex(m.structure(), m.cone_words(x, y), real or m.real,
                             {"kind": "cone", "objects": [x, y]}, shift_source=True)


def cone(m: PreMorphism, require_closed=True) -> Cone:
    if require_closed:
        rep = check_closed(m)
        if not rep.passed:
            raise ValueError(f"cone of a non-closed morphism: {rep.summary()}")
    return Cone(m)


# ---------------------------------------------------------------- complexes


def word_degree(cat, word, shift=0):
    """Parity of a bar word: reduced degrees plus one per module letter."""
    modules = sum(1 for tag, _ in word if tag != "A")
    return (sum(reduced(cat, l) for l in word) + modules + shift) % 2


def build_complex(st: TotalStructure, words, real: Realization, meta=None,
                  shift_source=False) -> FreeComplex:
    """The free complex spanned by words with differential b restricted to them."""
    cat = st.cat
    words = list(words)
    # in a cone the source sits one degree down; S letters carry this already
    degs = [word_degree(cat, w, 1 if shift_source and any(t in ("M1", "M2") for t, _ in w)
                        else 0) for w in words]
    index = {w: i for i, w in enumerate(words)}
    c0 = [i for i, d in enumerate(degs) if d == 0]
    c1 = [i for i, d in enumerate(degs) if d == 1]
    pos = {}
    for lst in (c0, c1):
        for j, i in enumerate(lst):
            pos[i] = j
    zero_w = Weight(cat.n)
    d0 = [[zero_w] * len(c0) for _ in c1]
    d1 = [[zero_w] * len(c1) for _ in c0]
    for i, w in enumerate(words):
        for k, val in st.b(w).items():
            if k not in index:
                raise ValueError(f"differential leaves the truncated span: {k}")
            j = index[k]
            if degs[j] == degs[i]:
                raise ValueError(f"differential preserves degree on {w} -> {k}")
            if degs[i] == 0:
                d0[pos[j]][pos[i]] = d0[pos[j]][pos[i]] + val
            else:
                d1[pos[j]][pos[i]] = d1[pos[j]][pos[i]] + val
    meta = dict(meta or {})
    meta["words"] = [[[t, g] for t, g in w] for w in words]
    meta["degrees"] = degs
    cx = FreeComplex((len(c0), len(c1)), d0, d1, "weight", meta)
    if real.kind == "weight":
        return cx
    ring = {"novikov": "novikov", "novikov-family": "family", "tate": "tate",
            "padic": "padic"}[real.kind]
    return cx.map_entries(real, ring)


def fiber_complex(x, X, Y=None) -> FreeComplex:
    if isinstance(x, FamilyModule):
        return x.fiber_complex(X)
    return x.fiber_complex(X, Y)


def ranks(cx: FreeComplex, min_floor=1):
    return cohomology_rank(cx, min_floor)


# ---------------------------------------------------------------- group-like radius search


@dataclass
class RadiusReport:
    n: int | None
    per_pair: dict = field(default_factory=dict)
    samples_checked: int = 0
    reason: str = ""

    def to_json(self):
        return {"n": self.n, "per_pair": {f"{k[0]},{k[1]}": v for k, v in self.per_pair.items()},
                "samples_checked": self.samples_checked, "reason": self.reason}


def _perturbation_margin(mat, rows, cols, n):
    """Certificate data for a pivot block of a two-variable Tate matrix.

    Returns (v_det, w, v_e): the valuation of the block's determinant at
    t = 0, the least valuation of any coefficient in the block, and the least
    valuation of any non-constant coefficient after restriction to radius n.
    """
    p = mat[0][0].p
    v_e = math.inf
    w = math.inf
    const = []
    for i in rows:
        row = []
        for j in cols:
            s = mat[i][j]
            r = s.restrict(n) if n else s
            vals = r.coeff_vals()
            zero = (0,) * r.nvars
            for idx, v in vals.items():
                if idx != zero and v < r.prec:
                    v_e = min(v_e, v)
            if r.decay is not None:
                v_e = min(v_e, r.tail_bound(0))
            c0 = r.coeff(zero)
            row.append(c0)
            if not c0.is_zero():
                w = min(w, c0.val)
        const.append(row)
    det_val = _padic_det_val(const, p)
    w = min(w, v_e)
    return det_val, w, v_e


def _padic_det_val(M, p):
    A = [list(r) for r in M]
    n = len(A)
    v = 0
    for c in range(n):
        piv = None
        for i in range(c, n):
            if not A[i][c].is_zero() and (piv is None or A[i][c].val < A[piv][c].val):
                piv = i
        if piv is None:
            return math.inf
        A[c], A[piv] = A[piv], A[c]
        v += A[c][c].val
        inv = A[c][c].inv()
        for i in range(c + 1, n):
            if A[i][c].is_zero():
                continue
            f = A[i][c] * inv
            A[i] = [a - f * b for a, b in zip(A[i], A[c])]
    return v


def certify_cone_acyclic(cx: FreeComplex, n: int):
    """True when the two-variable cone complex is acyclic on the radius-n polydisc.

    At t = 0 the complex must be acyclic; each differential's pivot block
    then stays invertible on the polydisc when every non-constant coefficient
    is smaller than the determinant divided by the other entries.
    """
    origin = cx.map_entries(lambda s: s.eval((0, 0)), "padic")
    h = cohomology_rank(origin)
    if h != [0, 0]:
        return False, f"fiber at the origin has cohomology {h}"
    for m, mo in zip(cx.matrices(), origin.matrices()):
        if not m or not m[0]:
            continue
        r, _, prow, pcol = padic_rank(mo)
        if not r:
            continue
        v_det, w, v_e = _perturbation_margin(m, prow, pcol, n)
        if v_e == math.inf:
            continue
        if not v_e + (r - 1) * w > v_det:
            return False, f"pivot block margin {v_e} + {r - 1}*{w} <= {v_det}"
    return True, "certified"


def radius_search(m: PreMorphism, n_max: int = 6, grid=(0, 1, -1, 2, -2)) -> RadiusReport:
    """Smallest n with the comparison cone acyclic on the radius-n polydisc.

    The morphism must be realised over two-variable Tate series. Each object
    pair is certified by the pivot-block perturbation bound and checked at a
    grid of points t = p^n (a, b).
    """
    cat = m.cat
    if m.real.kind != "tate":
        raise ValueError("radius search needs a Tate realisation")
    closed = check_closed(m)
    if not closed.passed:
        return RadiusReport(None, reason=closed.summary())
    c = Cone(m)
    samples = 0
    per_pair = {}
    for n in range(n_max + 1):
        ok = True
        for x in cat.objects:
            for y in cat.objects:
                if not m.cone_words(x, y):
                    continue
                real = Realization("tate", cat.basis, m.real.embedding, 2, n, D=m.real.D)
                cx = c.fiber_complex(x, y, real)
                good, why = certify_cone_acyclic(cx, 0)
                per_pair[(x, y)] = why
                if not good:
                    ok = False
                    break
                for a in grid:
                    for b in grid:
                        fib = cx.map_entries(lambda s, a=a, b=b: s.eval((a, b)), "padic")
                        samples += 1
                        if cohomology_rank(fib) != [0, 0]:
                            ok = False
                            per_pair[(x, y)] = f"cohomology at p^{n}*({a},{b})"
                            break
                    if not ok:
                        break
            if not ok:
                break
        if ok:
            return RadiusReport(n, per_pair, samples)
    return RadiusReport(None, per_pair, samples, f"no radius up to {n_max}")


def rank_composition(fam_cat: AinfCategory, f1, f2, x, y):
    """Fiber ranks of M_f1 (x) M_f2 and of M_(f1+f2) at (x, y), over Lambda."""
    f1, f2 = frac(f1), frac(f2)
    real = Realization("novikov", fam_cat.basis)
    conv = Convolution(fam_cat, ((f1, 0, 0), (f2, 0, 0)), real)
    single = FamilyBimodule(fam_cat, (f1 + f2, 0, 0), real)
    return ranks(conv.fiber_complex(x, y)), ranks(single.fiber_complex(x, y))


def truncation_stability(conv: Convolution, x, y, lengths):
    out = []
    for l in lengths:
        c = Convolution(conv.cat, conv.scalings, conv.real, l)
        out.append(ranks(c.fiber_complex(x, y)))
    return out

