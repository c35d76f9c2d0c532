"""Exponent group, truncated Novikov series and the family ring Lambda{z^R}.

Real exponents are rational vectors over a declared basis of named reals.
Each basis symbol carries a certified interval (midpoint, radius); symbols
with a positive radius may also carry a closed-form expression that is used
to shrink the interval when two exponents cannot yet be told apart.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key

import mpmath

INF = math.inf

ROLES = ("energy", "flux")

# how many times the comparison may shrink symbol intervals before giving up
MAX_REFINE = 8
REFINE_BITS = 6


class PrecisionError(ArithmeticError):
    """Raised when a result cannot be certified at the available precision."""


class CutoffError(ArithmeticError):
    """Raised when a truncated value would leak below the truncation cutoff."""


def frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not accepted, use strings or Fractions")
    return Fraction(x)


def frac_str(x: Fraction) -> str:
    x = frac(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class Symbol:
    name: str
    role: str
    midpoint: Fraction
    radius: Fraction = Fraction(0)
    expr: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "midpoint", frac(self.midpoint))
        object.__setattr__(self, "radius", frac(self.radius))
        if self.role not in ROLES:
            raise ValueError(f"unknown role {self.role!r} for symbol {self.name}")
        if self.radius < 0:
            raise ValueError(f"negative radius for symbol {self.name}")
        if self.role == "energy" and self.midpoint - self.radius <= 0:
            raise ValueError(f"energy symbol {self.name} is not certifiably positive")

    def interval(self, level: int = 0) -> tuple[Fraction, Fraction]:
        if self.radius == 0:
            return self.midpoint, self.midpoint
        if level == 0 or self.expr is None:
            return self.midpoint - self.radius, self.midpoint + self.radius
        return _refined_interval(self.expr, self.radius, level)


_refine_cache: dict = {}


def _refined_interval(expr: str, radius: Fraction, level: int):
    key = (expr, radius, level)
    if key not in _refine_cache:
        rad = radius / 2 ** (REFINE_BITS * level)
        digits = 30 + 2 * REFINE_BITS * level
        with mpmath.workdps(digits + 10):
            val = mpmath.mpf(_eval_expr(expr))
            mid = Fraction(mpmath.nstr(val, digits, min_fixed=-math.inf, max_fixed=math.inf))
        # the decimal rounding error is far below rad
        _refine_cache[key] = (mid - rad, mid + rad)
    return _refine_cache[key]


def _eval_expr(expr: str):
    allowed = {k: getattr(mpmath, k) for k in ("sqrt", "pi", "e", "log", "exp", "cbrt")}
    return eval(expr, {"__builtins__": {}}, allowed)


@dataclass(frozen=True)
class ExponentBasis:
    symbols: tuple[Symbol, ...]
    independence_declared: bool = True

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))
        names = [s.name for s in self.symbols]
        if len(set(names)) != len(names):
            raise ValueError("symbol names must be unique")

    @classmethod
    def make(cls, specs, independence_declared=True) -> "ExponentBasis":
        """specs: iterable of (name, role, midpoint[, radius[, expr]])."""
        return cls(tuple(Symbol(*s) for s in specs), independence_declared)

    def __len__(self):
        return len(self.symbols)

    @property
    def names(self):
        return [s.name for s in self.symbols]

    def index(self, name: str) -> int:
        for i, s in enumerate(self.symbols):
            if s.name == name:
                return i
        raise KeyError(name)

    def indices(self, role: str) -> list[int]:
        return [i for i, s in enumerate(self.symbols) if s.role == role]

    def zero(self) -> "Exponent":
        return Exponent(self, (Fraction(0),) * len(self))

    def unit(self, name: str, scale=1) -> "Exponent":
        coords = [Fraction(0)] * len(self)
        coords[self.index(name)] = frac(scale)
        return Exponent(self, tuple(coords))

    def vec(self, coords) -> "Exponent":
        return Exponent(self, tuple(frac(c) for c in coords))

    def rational(self, value) -> "Exponent":
        """Exponent equal to a rational number, using the first exact symbol of value 1."""
        for i, s in enumerate(self.symbols):
            if s.radius == 0 and s.midpoint != 0:
                coords = [Fraction(0)] * len(self)
                coords[i] = frac(value) / s.midpoint
                return Exponent(self, tuple(coords))
        raise ValueError("basis has no exact symbol to express rationals")

    def to_json(self):
        out = []
        for s in self.symbols:
            d = {"name": s.name, "role": s.role,
                 "midpoint": frac_str(s.midpoint), "radius": frac_str(s.radius)}
            if s.expr is not None:
                d["expr"] = s.expr
            out.append(d)
        return {"symbols": out, "independence_declared": self.independence_declared}

    @classmethod
    def from_json(cls, doc) -> "ExponentBasis":
        if isinstance(doc, list):
            doc = {"symbols": doc}
        syms = tuple(Symbol(d["name"], d["role"], Fraction(d["midpoint"]),
                            Fraction(d.get("radius", "0")), d.get("expr"))
                     for d in doc["symbols"])
        return cls(syms, doc.get("independence_declared", True))


@dataclass(frozen=True)
class Exponent:
    basis: ExponentBasis = field(compare=False, hash=False, repr=False)
    coords: tuple[Fraction, ...]

    def _check(self, other):
        if self.basis is not other.basis and self.basis != other.basis:
            raise ValueError("exponent basis mismatch")

    def __add__(self, other):
        self._check(other)
        return Exponent(self.basis, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other):
        self._check(other)
        return Exponent(self.basis, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self):
        return Exponent(self.basis, tuple(-a for a in self.coords))

    def scale(self, c) -> "Exponent":
        c = frac(c)
        return Exponent(self.basis, tuple(c * a for a in self.coords))

    def is_zero(self) -> bool:
        return not any(self.coords)

    def interval(self, level: int = 0) -> tuple[Fraction, Fraction]:
        lo = hi = Fraction(0)
        for c, s in zip(self.coords, self.basis.symbols):
            if c == 0:
                continue
            a, b = s.interval(level)
            if c > 0:
                lo += c * a
                hi += c * b
            else:
                lo += c * b
                hi += c * a
        return lo, hi

    def is_exact(self) -> bool:
        return all(c == 0 or s.radius == 0 for c, s in zip(self.coords, self.basis.symbols))

    def exact_value(self) -> Fraction:
        if not self.is_exact():
            raise PrecisionError("exponent has no exact rational value")
        return self.interval()[0]

    def sign(self) -> int:
        return sign_of(self)

    def part(self, role: str) -> "Exponent":
        idx = set(self.basis.indices(role))
        return Exponent(self.basis, tuple(c if i in idx else Fraction(0)
                                          for i, c in enumerate(self.coords)))

    def denominators(self) -> list[int]:
        return [c.denominator for c in self.coords]

    def __lt__(self, other):
        return compare(self, other) < 0

    def __le__(self, other):
        return compare(self, other) <= 0

    def __gt__(self, other):
        return compare(self, other) > 0

    def __ge__(self, other):
        return compare(self, other) >= 0

    def to_json(self):
        return [frac_str(c) for c in self.coords]

    def __str__(self):
        parts = []
        for c, s in zip(self.coords, self.basis.symbols):
            if c:
                parts.append(f"{frac_str(c)}*{s.name}")
        return " + ".join(parts) if parts else "0"


_sign_cache: dict = {}


def sign_of(e: Exponent) -> int:
    """Certified sign of the real value of e, shrinking intervals as needed."""
    if e.is_zero():
        return 0
    key = (e.basis.symbols, e.coords)
    hit = _sign_cache.get(key)
    if hit is not None:
        return hit
    result = None
    for level in range(MAX_REFINE + 1):
        lo, hi = e.interval(level)
        if lo > 0:
            result = 1
        elif hi < 0:
            result = -1
        elif lo == hi == 0:
            result = 0
        if result is not None:
            break
        if e.is_exact():
            break
    if result is None:
        raise PrecisionError(f"cannot separate {e} from zero after {MAX_REFINE} refinements")
    _sign_cache[key] = result
    return result


def positive_lower_bound(e: Exponent) -> Fraction:
    """A positive rational below the value of e, which must be certifiably positive."""
    for level in range(MAX_REFINE + 1):
        lo = e.interval(level)[0]
        if lo > 0:
            return lo
    raise PrecisionError(f"cannot certify {e} > 0")


def compare(a: Exponent, b: Exponent) -> int:
    if a.coords == b.coords:
        return 0
    return sign_of(a - b)


def _certified_sort(items, exp_of):
    """Sort by value; disjoint level-0 intervals settle the order without refinement."""
    keyed = [(exp_of(x).interval(), x) for x in items]
    keyed.sort(key=lambda t: t[0][0])
    if all(a[0][1] < b[0][0] for a, b in zip(keyed, keyed[1:])):
        return [x for _, x in keyed]
    return sorted(items, key=cmp_to_key(lambda x, y: compare(exp_of(x), exp_of(y))))


def sort_exponents(exps):
    return _certified_sort(list(exps), lambda e: e)


# ---------------------------------------------------------------- Novikov series


class NovikovSeries:
    """Finite sum of rational multiples of T^g, exact modulo T^cutoff.

    cutoff None means no truncation. polynomial is True when the sum is exact.
    """

    __slots__ = ("basis", "terms", "cutoff", "polynomial")

    def __init__(self, basis: ExponentBasis, terms=(), cutoff: Exponent | None = None,
                 polynomial: bool = True):
        acc: dict = {}
        for c, g in terms:
            c = frac(c)
            if c:
                acc[g.coords] = acc.get(g.coords, Fraction(0)) + c
        kept = []
        for coords, c in acc.items():
            if c == 0:
                continue
            g = Exponent(basis, coords)
            if cutoff is not None and compare(g, cutoff) >= 0:
                polynomial = False
                continue
            kept.append((g, c))
        kept = _certified_sort(kept, lambda x: x[0])
        self.basis = basis
        self.terms = tuple((c, g) for g, c in kept)
        self.cutoff = cutoff
        self.polynomial = polynomial

    @classmethod
    def monomial(cls, basis, coeff, exp: Exponent, cutoff=None):
        return cls(basis, [(coeff, exp)], cutoff)

    @classmethod
    def const(cls, basis, c, cutoff=None):
        return cls(basis, [(c, basis.zero())], cutoff)

    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other):
        if self.basis != other.basis:
            raise ValueError("Novikov series basis mismatch")
        if self.cutoff is None or other.cutoff is None:
            if self.cutoff is not other.cutoff:
                raise ValueError("Novikov series cutoff mismatch")
        elif self.cutoff.coords != other.cutoff.coords:
            raise ValueError("Novikov series cutoff mismatch")

    def __add__(self, other):
        if not isinstance(other, NovikovSeries):
            other = NovikovSeries.const(self.basis, other, self.cutoff)
        self._check(other)
        return NovikovSeries(self.basis, self.terms + other.terms, self.cutoff,
                             self.polynomial and other.polynomial)

    __radd__ = __add__

    def __neg__(self):
        return NovikovSeries(self.basis, [(-c, g) for c, g in self.terms], self.cutoff,
                             self.polynomial)

    def __sub__(self, other):
        if not isinstance(other, NovikovSeries):
            other = NovikovSeries.const(self.basis, other, self.cutoff)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, NovikovSeries):
            c = frac(other)
            return NovikovSeries(self.basis, [(c * a, g) for a, g in self.terms], self.cutoff,
                                 self.polynomial)
        self._check(other)
        _check_leak(self, other)
        _check_leak(other, self)
        prod = [(a * b, g + h) for a, g in self.terms for b, h in other.terms]
        return NovikovSeries(self.basis, prod, self.cutoff,
                             self.polynomial and other.polynomial)

    __rmul__ = __mul__

    def scale_exp(self, g: Exponent) -> "NovikovSeries":
        """Multiply by T^g."""
        if not self.polynomial and sign_of(g) < 0:
            raise CutoffError("shifting a truncated series down loses exactness")
        return NovikovSeries(self.basis, [(c, h + g) for c, h in self.terms], self.cutoff,
                             self.polynomial)

    def val(self):
        return nov_val(self)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = NovikovSeries.const(self.basis, other, self.cutoff)
        if not isinstance(other, NovikovSeries):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        return hash(tuple((c, g.coords) for c, g in self.terms))

    def at_one(self) -> Fraction:
        """Sum of coefficients (only meaningful for exact sums)."""
        return sum((c for c, _ in self.terms), Fraction(0))

    def to_json(self):
        return [[frac_str(c), g.to_json()] for c, g in self.terms]

    @classmethod
    def from_json(cls, basis, doc, cutoff=None):
        return cls(basis, [(Fraction(c), basis.vec([Fraction(x) for x in v])) for c, v in doc],
                   cutoff)

    def __repr__(self):
        if not self.terms:
            return "0"
        s = " + ".join(f"{frac_str(c)}*T^({g})" for c, g in self.terms)
        return s if self.polynomial else s + " + O(T^cutoff)"


def _check_leak(a: NovikovSeries, b: NovikovSeries):
    if a.polynomial or b.is_zero():
        return
    if sign_of(b.terms[0][1]) < 0:
        raise CutoffError("product of a truncated series with a negative-valuation series")


def nov_ring(kind: str, a: NovikovSeries, b: NovikovSeries) -> NovikovSeries:
    if kind == "add":
        return a + b
    if kind == "mul":
        return a * b
    raise ValueError(f"unknown ring operation {kind!r}")


def nov_val(a: NovikovSeries):
    """Exponent of the leading term, INF for the zero series."""
    if a.is_zero():
        return INF
    return a.terms[0][1]


# ---------------------------------------------------------------- family series


DEFAULT_WINDOW = (Fraction(-1), Fraction(1))


class FamilySeries:
    """Finite sum of c * T^beta * z^r, an element of Lambda{z^R} on a window (b, c).

    Monomials are keyed by (beta coords, r coords). When a cutoff is present,
    monomials whose value beta + r*nu is >= cutoff at both window endpoints are
    discarded; by linearity in nu they are >= cutoff on the whole window.
    """

    __slots__ = ("basis", "mono", "window", "cutoff", "exact")

    def __init__(self, basis: ExponentBasis, monomials=(), window=DEFAULT_WINDOW,
                 cutoff: Exponent | None = None, exact: bool = True):
        b, c = frac(window[0]), frac(window[1])
        if not b < 0 < c:
            raise ValueError("window must satisfy b < 0 < c")
        acc: dict = {}
        for coeff, beta, r in monomials:
            coeff = frac(coeff)
            if coeff:
                key = (beta.coords, r.coords)
                acc[key] = acc.get(key, Fraction(0)) + coeff
        mono = {}
        for key, coeff in acc.items():
            if coeff == 0:
                continue
            if cutoff is not None:
                beta, r = Exponent(basis, key[0]), Exponent(basis, key[1])
                if (compare(beta + r.scale(b), cutoff) >= 0
                        and compare(beta + r.scale(c), cutoff) >= 0):
                    exact = False
                    continue
            mono[key] = coeff
        self.basis = basis
        self.mono = mono
        self.window = (b, c)
        self.cutoff = cutoff
        self.exact = exact

    @classmethod
    def const(cls, basis, c, window=DEFAULT_WINDOW, cutoff=None):
        z = basis.zero()
        return cls(basis, [(c, z, z)], window, cutoff)

    @classmethod
    def monomial(cls, basis, coeff, beta: Exponent, r: Exponent, window=DEFAULT_WINDOW,
                 cutoff=None):
        return cls(basis, [(coeff, beta, r)], window, cutoff)

    def monomials(self):
        for (bc, rc), c in sorted(self.mono.items()):
            yield c, Exponent(self.basis, bc), Exponent(self.basis, rc)

    def is_zero(self) -> bool:
        return not self.mono

    def _like(self, monos, exact):
        return FamilySeries(self.basis, monos, self.window, self.cutoff, exact)

    def _coerce(self, other):
        if isinstance(other, FamilySeries):
            if other.window != self.window:
                raise ValueError("family series window mismatch")
            return other
        return FamilySeries.const(self.basis, other, self.window, self.cutoff)

    def __add__(self, other):
        other = self._coerce(other)
        return self._like(list(self.monomials()) + list(other.monomials()),
                          self.exact and other.exact)

    __radd__ = __add__

    def __neg__(self):
        return self._like([(-c, b, r) for c, b, r in self.monomials()], self.exact)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, FamilySeries):
            c = frac(other)
            return self._like([(c * a, b, r) for a, b, r in self.monomials()], self.exact)
        other = self._coerce(other)
        for x, y in ((self, other), (other, self)):
            if not x.exact and not y.is_zero() and y.min_endpoint_value() < 0:
                raise CutoffError("truncated family series times a negative-valuation series")
        prod = [(a * a2, b + b2, r + r2) for a, b, r in self.monomials()
                for a2, b2, r2 in other.monomials()]
        return self._like(prod, self.exact and other.exact)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, FamilySeries):
            other = self._coerce(other)
        return (self - other).is_zero()

    def __hash__(self):
        return hash(tuple(sorted(self.mono.items())))

    def min_endpoint_value(self) -> Fraction:
        """Lower bound for val_T over the window (midpoint arithmetic is not used)."""
        lo = None
        for _, beta, r in self.monomials():
            for nu in self.window:
                v = (beta + r.scale(nu)).interval()[0]
                lo = v if lo is None else min(lo, v)
        return lo if lo is not None else Fraction(0)

    def at_one(self) -> NovikovSeries:
        return ev_at(self, 0)

    def __repr__(self):
        if not self.mono:
            return "0"
        return " + ".join(f"{frac_str(c)}*T^({b})*z^({r})" for c, b, r in self.monomials())


def ev_at(f: FamilySeries, a) -> NovikovSeries:
    """Evaluate z = T^a, a rational in the window."""
    a = frac(a)
    b, c = f.window
    if not b <= a <= c:
        raise ValueError(f"evaluation point {a} outside window [{b}, {c}]")
    terms = [(coeff, beta + r.scale(a)) for coeff, beta, r in f.monomials()]
    return NovikovSeries(f.basis, terms, f.cutoff, f.exact)


def window_nonvanishing(f: FamilySeries) -> Fraction:
    """A radius delta with f(T^t) != 0 for every rational |t| < delta in the window.

    The monomials split into a dominant part at the minimal T-level B and the
    rest. For t != 0 the dominant part has pairwise distinct exponents
    B + t*r, and it stays strictly below every other monomial as long as
    |t| * |r - r'| < beta' - B. At t = 0 nonvanishing is f(1) != 0.
    """
    if ev_at(f, 0).is_zero():
        raise ValueError("f(1) = 0: no neighbourhood of nonvanishing")
    monos = list(f.monomials())
    levels = sort_exponents({m[1].coords: m[1] for m in monos}.values())
    base = levels[0]
    dominant = [r for _, beta, r in monos if beta.coords == base.coords]
    rest = [(beta, r) for _, beta, r in monos if beta.coords != base.coords]
    delta = min(-f.window[0], f.window[1])
    for beta, r in rest:
        gap = positive_lower_bound(beta - base)
        for r0 in dominant:
            hi = max(abs(x) for x in (r - r0).interval())
            if hi > 0:
                delta = min(delta, gap / hi)
    if not f.exact:
        if compare(f.cutoff, base) <= 0:
            raise PrecisionError("truncation too coarse to certify a nonvanishing window")
        gap = positive_lower_bound(f.cutoff - base)
        reach = max((max(abs(x) for x in r.interval()) for r in dominant), default=Fraction(0))
        if reach > 0:
            delta = min(delta, gap / reach)
    if delta <= 0:
        raise PrecisionError("could not certify a positive nonvanishing window")
    return delta
