"""Fixed-precision p-adic numbers, truncated Tate series and Novikov embeddings.

Precision is absolute throughout: a value is known modulo p^N. Tate series
store integer coefficients with a common p-power scale and carry a linear
decay certificate val(c_I) >= slope*|I| + offset for all I, including the
discarded degrees above the cutoff. Evaluations use the certificate to
account for the discarded tail.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .exponents import (CutoffError, ExponentBasis, Exponent, NovikovSeries, PrecisionError,
                        frac)

BIG = 10 ** 9


def vp(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of zero")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def vp_frac(x: Fraction, p: int) -> int:
    x = frac(x)
    if x == 0:
        return BIG
    return vp(x.numerator, p) - vp(x.denominator, p)


def check_prime(p: int):
    if p < 3 or any(p % q == 0 for q in range(2, math.isqrt(p) + 1)):
        raise ValueError(f"p must be an odd prime, got {p}")


# ---------------------------------------------------------------- p-adic numbers


class PadicNumber:
    """p^val * unit, known modulo p^prec.

    A number whose valuation reaches prec is zero at this precision; it is
    stored with val = prec and unit = 0.
    """

    __slots__ = ("p", "val", "unit", "prec")

    def __init__(self, p: int, val: int, unit: int, prec: int):
        if unit:
            while unit % p == 0:
                unit //= p
                val += 1
        if unit == 0 or val >= prec:
            val, unit = prec, 0
        else:
            unit %= p ** (prec - val)
        self.p, self.val, self.unit, self.prec = p, val, unit, prec

    @classmethod
    def from_rational(cls, x, p: int, prec: int) -> "PadicNumber":
        check_prime(p)
        x = frac(x)
        if x == 0:
            return cls(p, prec, 0, prec)
        v = vp_frac(x, p)
        if v >= prec:
            return cls(p, prec, 0, prec)
        num = x.numerator // p ** max(v, 0) if v >= 0 else x.numerator
        den = x.denominator if v >= 0 else x.denominator // p ** (-v)
        mod = p ** (prec - v)
        return cls(p, v, num * pow(den, -1, mod) % mod, prec)

    @classmethod
    def from_int(cls, n: int, p: int, prec: int) -> "PadicNumber":
        return cls.from_rational(Fraction(n), p, prec)

    def is_zero(self) -> bool:
        return self.unit == 0

    def _same(self, other):
        if not isinstance(other, PadicNumber):
            other = PadicNumber.from_rational(frac(other), self.p, self.prec)
        if other.p != self.p:
            raise ValueError("prime mismatch")
        return other

    def residue(self, k: int | None = None) -> int:
        """Integer representative modulo p^k (k <= prec); requires val >= 0."""
        k = self.prec if k is None else k
        if self.val < 0 and self.unit:
            raise ValueError("not a p-adic integer")
        if k > self.prec:
            raise PrecisionError("requested digits beyond precision")
        return (self.unit * self.p ** self.val) % self.p ** k if self.unit else 0

    def scaled_int(self, e: int) -> int:
        """Integer c with self = c * p^e, modulo p^(prec - e); requires val >= e."""
        if self.unit == 0:
            return 0
        if self.val < e:
            raise ValueError("scale too large for this number")
        return self.unit * self.p ** (self.val - e)

    def __add__(self, other):
        other = self._same(other)
        prec = min(self.prec, other.prec)
        e = min(self.val, other.val)
        if e >= prec:
            return PadicNumber(self.p, prec, 0, prec)
        c = self.scaled_int(e) + other.scaled_int(e)
        return _from_scaled(self.p, c, e, prec)

    __radd__ = __add__

    def __neg__(self):
        return PadicNumber(self.p, self.val, -self.unit, self.prec)

    def __sub__(self, other):
        return self + (-self._same(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._same(other)
        prec = min(self.prec + other.val, other.prec + self.val)
        if self.unit == 0 or other.unit == 0:
            return PadicNumber(self.p, prec, 0, prec)
        return PadicNumber(self.p, self.val + other.val, self.unit * other.unit, prec)

    __rmul__ = __mul__

    def inv(self) -> "PadicNumber":
        if self.unit == 0:
            raise ZeroDivisionError("inverse of a p-adic zero")
        rel = self.prec - self.val
        return PadicNumber(self.p, -self.val, pow(self.unit, -1, self.p ** rel),
                           self.prec - 2 * self.val)

    def __truediv__(self, other):
        return self * self._same(other).inv()

    def __pow__(self, n: int):
        if n < 0:
            return self.inv() ** (-n)
        if n == 0:
            return PadicNumber(self.p, 0, 1, self.prec)
        result = None
        base = self
        while n:
            if n & 1:
                result = base if result is None else result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def with_prec(self, prec: int) -> "PadicNumber":
        if prec > self.prec:
            raise PrecisionError("cannot raise precision")
        return PadicNumber(self.p, self.val, self.unit, prec)

    def equals(self, other) -> bool:
        """Equality at the common precision."""
        return (self - self._same(other)).is_zero()

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, PadicNumber)):
            return self.equals(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.p, self.val, self.unit, self.prec))

    def digits(self) -> str:
        """Unit digits base p, most significant first."""
        if self.unit == 0:
            return "0"
        ds = []
        u = self.unit
        for _ in range(self.prec - self.val):
            ds.append(u % self.p)
            u //= self.p
        return "".join(str(d) if d < 10 else f"[{d}]" for d in reversed(ds))

    def to_json(self):
        return {"p": self.p, "valuation": self.val if self.unit else None,
                "mantissa": self.digits(), "precision": self.prec}

    @classmethod
    def from_json(cls, doc):
        p, prec = doc["p"], doc["precision"]
        if doc["valuation"] is None:
            return cls(p, prec, 0, prec)
        digits = doc["mantissa"]
        u, i = 0, 0
        while i < len(digits):
            if digits[i] == "[":
                j = digits.index("]", i)
                d, i = int(digits[i + 1:j]), j + 1
            else:
                d, i = int(digits[i]), i + 1
            u = u * p + d
        return cls(p, doc["valuation"], u, prec)

    def __repr__(self):
        if self.unit == 0:
            return f"O({self.p}^{self.prec})"
        return f"{self.p}^{self.val}*{self.unit} + O({self.p}^{self.prec})"


def _from_scaled(p, c, e, prec):
    """The number c * p^e known modulo p^prec."""
    if c == 0:
        return PadicNumber(p, prec, 0, prec)
    v = vp(c, p)
    if e + v >= prec:
        return PadicNumber(p, prec, 0, prec)
    return PadicNumber(p, e + v, c // p ** v, prec)


def qp_ring(kind: str, a: PadicNumber, b: PadicNumber | None = None) -> PadicNumber:
    if kind == "add":
        return a + b
    if kind == "mul":
        return a * b
    if kind == "inv":
        return a.inv()
    raise ValueError(f"unknown operation {kind!r}")


# ---------------------------------------------------------------- Tate series


def _indices(nvars: int, D: int):
    if nvars == 1:
        return [(k,) for k in range(D + 1)]
    return [(i, k - i) for k in range(D + 1) for i in range(k + 1)]


class TateSeries:
    """Truncated series sum c_I t^I over Q_p, total degree <= D, in 1 or 2 variables.

    coeffs maps multi-indices to integers; the true coefficient is c * p^scale,
    known modulo p^(scale + rel). decay is (slope, offset) with
    val(c_I) >= slope*|I| + offset for every I, or None when all coefficients
    above degree D vanish. radius n records that the variable has been
    rescaled by p^n (the series lives on Q_p<t/p^n>).
    """

    __slots__ = ("p", "nvars", "D", "coeffs", "scale", "rel", "decay", "radius")

    def __init__(self, p, nvars, D, coeffs, scale=0, rel=20, decay=None, radius=0):
        if nvars not in (1, 2):
            raise ValueError("only one or two variables are supported")
        check_prime(p)
        mod = p ** rel if rel > 0 else 1
        clean = {}
        for idx, c in coeffs.items():
            if sum(idx) > D:
                if decay is None:
                    raise ValueError("coefficient above cutoff in an exact series")
                continue
            c %= mod
            if c:
                clean[tuple(idx)] = c
        self.p, self.nvars, self.D = p, nvars, D
        self.coeffs = clean
        self.scale, self.rel = scale, max(rel, 0)
        self.decay = decay
        self.radius = radius

    # constructors

    @classmethod
    def const(cls, x: PadicNumber, nvars=1, D=0) -> "TateSeries":
        e = min(x.val, 0) if x.unit else 0
        return cls(x.p, nvars, D, {(0,) * nvars: x.scaled_int(e)}, e, x.prec - e, None)

    @classmethod
    def variable(cls, p, nvars, D, which=0, prec=20) -> "TateSeries":
        idx = [0] * nvars
        idx[which] = 1
        return cls(p, nvars, D, {tuple(idx): 1}, 0, prec, None)

    @classmethod
    def from_padics(cls, p, nvars, D, coeffs: dict, decay=None) -> "TateSeries":
        if not coeffs:
            return cls(p, nvars, D, {}, 0, BIG, decay)
        e = min(min((x.val for x in coeffs.values() if x.unit), default=0), 0)
        prec = min(x.prec for x in coeffs.values())
        return cls(p, nvars, D, {k: x.scaled_int(e) for k, x in coeffs.items()}, e, prec - e,
                   decay)

    # bookkeeping

    @property
    def prec(self) -> int:
        return self.scale + self.rel

    def coeff(self, idx) -> PadicNumber:
        return _from_scaled(self.p, self.coeffs.get(tuple(idx), 0), self.scale, self.prec)

    def coeff_vals(self):
        """Valuation per retained index (prec when zero at precision)."""
        out = {}
        for idx in _indices(self.nvars, self.D):
            c = self.coeffs.get(idx, 0)
            out[idx] = self.scale + vp(c, self.p) if c else self.prec
        return out

    def degree(self) -> int:
        return max((sum(i) for i in self.coeffs), default=0)

    def min_val(self) -> int:
        if not self.coeffs:
            return self.prec
        return self.scale + min(vp(c, self.p) for c in self.coeffs.values())

    def decay_with(self, slope: Fraction):
        """A decay certificate with a slope no larger than the current one."""
        slope = Fraction(slope)
        if self.decay is not None:
            s, o = self.decay
            if slope > s:
                raise ValueError("cannot strengthen a decay certificate")
            return slope, Fraction(o)
        lo = Fraction(self.min_val())
        return slope, lo - slope * self.degree()

    def tail_bound(self, w: int = 0):
        """Lower bound on val(c_I t^I) over discarded I, for |t| with val(t) >= w."""
        if self.decay is None:
            return BIG
        s, o = self.decay
        if s + w < 0:
            return -BIG
        return math.floor((s + w) * (self.D + 1) + o) if (s + w) * (self.D + 1) + o < BIG else BIG

    def is_zero(self) -> bool:
        return not self.coeffs

    def _check(self, other):
        if (self.p, self.nvars, self.D, self.radius) != (other.p, other.nvars, other.D,
                                                          other.radius):
            raise ValueError("Tate series mismatch (prime, variables, cutoff or radius)")

    def _coerce(self, other):
        if isinstance(other, TateSeries):
            self._check(other)
            return other
        if not isinstance(other, PadicNumber):
            other = PadicNumber.from_rational(frac(other), self.p, self.prec)
        return TateSeries.const(other, self.nvars, self.D)._with_radius(self.radius)

    def _with_radius(self, n):
        return TateSeries(self.p, self.nvars, self.D, self.coeffs, self.scale, self.rel,
                          self.decay, n)

    # ring operations

    def __add__(self, other):
        other = self._coerce(other)
        e = min(self.scale, other.scale)
        prec = min(self.prec, other.prec)
        out = {}
        for src in (self, other):
            f = self.p ** (src.scale - e)
            for k, c in src.coeffs.items():
                out[k] = out.get(k, 0) + c * f
        decay = _decay_sum(self, other)
        return TateSeries(self.p, self.nvars, self.D, out, e, prec - e, decay, self.radius)

    __radd__ = __add__

    def __neg__(self):
        return TateSeries(self.p, self.nvars, self.D, {k: -c for k, c in self.coeffs.items()},
                          self.scale, self.rel, self.decay, self.radius)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        p, D = self.p, self.D
        rel = min(self.rel, other.rel)
        out = {}
        overflow = False
        if self.nvars == 1:
            for (i,), a in self.coeffs.items():
                for (j,), b in other.coeffs.items():
                    if i + j <= D:
                        out[(i + j,)] = out.get((i + j,), 0) + a * b
                    else:
                        overflow = True
        else:
            for (i1, i2), a in self.coeffs.items():
                for (j1, j2), b in other.coeffs.items():
                    if i1 + i2 + j1 + j2 <= D:
                        k = (i1 + j1, i2 + j2)
                        out[k] = out.get(k, 0) + a * b
                    else:
                        overflow = True
        decay = _decay_prod(self, other, overflow)
        return TateSeries(p, self.nvars, D, out, self.scale + other.scale, rel, decay,
                          self.radius)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        result = self._coerce(1)
        for _ in range(n):
            result = result * self
        return result

    def equals(self, other, prec: int | None = None) -> bool:
        diff = self - self._coerce(other)
        bound = diff.prec if prec is None else prec
        if prec is not None and prec > diff.prec:
            raise PrecisionError("comparison beyond available precision")
        return all(v >= bound for v in diff.coeff_vals().values())

    def __eq__(self, other):
        if isinstance(other, (TateSeries, PadicNumber, int, Fraction)):
            return self.equals(other)
        return NotImplemented

    __hash__ = None

    def reduce_prec(self, prec: int) -> "TateSeries":
        return TateSeries(self.p, self.nvars, self.D, self.coeffs, self.scale,
                          min(self.rel, prec - self.scale), self.decay, self.radius)

    # evaluation and reindexing

    def eval(self, point) -> PadicNumber:
        """Evaluate at t0 (one variable) or (t1, t2); points must lie in Z_p.

        For a series rescaled to radius n the point is in the rescaled
        coordinate s = t/p^n.
        """
        pts = point if isinstance(point, (tuple, list)) else (point,)
        if len(pts) != self.nvars:
            raise ValueError("evaluation point has the wrong number of coordinates")
        pts = [x if isinstance(x, PadicNumber) else PadicNumber.from_rational(frac(x), self.p,
                                                                               self.prec + 1)
               for x in pts]
        for x in pts:
            if x.unit and x.val < 0:
                raise ValueError("evaluation point outside the unit disc")
        w = min(x.val for x in pts)
        tprec = min(x.prec for x in pts)
        prec = min(self.prec, self.tail_bound(w))
        if any(sum(i) > 0 for i in self.coeffs):
            prec = min(prec, self.scale + tprec)
        if prec <= self.scale:
            return PadicNumber(self.p, max(prec, -BIG), 0, max(prec, -BIG))
        mod = self.p ** (prec - self.scale)
        xs = [x.residue(min(x.prec, prec - self.scale)) if x.unit else 0 for x in pts]
        total = 0
        for idx, c in self.coeffs.items():
            term = c
            for x, k in zip(xs, idx):
                term = term * pow(x, k, mod) % mod
            total += term
        return _from_scaled(self.p, total % mod, self.scale, prec)

    def restrict(self, n: int) -> "TateSeries":
        """Rescale t -> p^n s, giving the series on the smaller disc."""
        if n < 0:
            raise ValueError("radius must be nonnegative")
        out = {idx: c * self.p ** (n * sum(idx)) for idx, c in self.coeffs.items()}
        decay = None if self.decay is None else (self.decay[0] + n, self.decay[1])
        return TateSeries(self.p, self.nvars, self.D, out, self.scale, self.rel, decay,
                          self.radius + n)

    def codiagonal(self) -> "TateSeries":
        """Two variables to one: t1, t2 -> t."""
        if self.nvars != 2:
            raise ValueError("codiagonal needs a two-variable series")
        out = {}
        for (i, j), c in self.coeffs.items():
            out[(i + j,)] = out.get((i + j,), 0) + c
        return TateSeries(self.p, 1, self.D, out, self.scale, self.rel, self.decay, self.radius)

    def to_var(self, which: int) -> "TateSeries":
        """One variable t to t1 (which=0) or t2 (which=1)."""
        if self.nvars != 1:
            raise ValueError("projection needs a one-variable series")
        out = {((k, 0) if which == 0 else (0, k)): c for (k,), c in self.coeffs.items()}
        return TateSeries(self.p, 2, self.D, out, self.scale, self.rel, self.decay, self.radius)

    def rescaled_coeffs(self, n: int) -> list[PadicNumber]:
        """c_i p^(n i) for a one-variable series."""
        return [x for x in (self.restrict(n).coeff((k,)) for k in range(self.D + 1))]

    def to_json(self):
        return {"p": self.p, "nvars": self.nvars, "D": self.D, "scale": self.scale,
                "rel": self.rel, "radius": self.radius,
                "decay": None if self.decay is None else [str(x) for x in self.decay],
                "coeffs": [[list(k), str(c)] for k, c in sorted(self.coeffs.items())]}

    @classmethod
    def from_json(cls, doc):
        decay = None if doc["decay"] is None else tuple(Fraction(x) for x in doc["decay"])
        return cls(doc["p"], doc["nvars"], doc["D"],
                   {tuple(k): int(c) for k, c in doc["coeffs"]}, doc["scale"], doc["rel"],
                   decay, doc.get("radius", 0))

    def __repr__(self):
        terms = []
        for idx, c in sorted(self.coeffs.items()):
            mono = "*".join(f"t{i + 1 if self.nvars == 2 else ''}^{k}"
                            for i, k in enumerate(idx) if k)
            terms.append(f"{c}*{self.p}^{self.scale}" + (f"*{mono}" if mono else ""))
        return (" + ".join(terms) or "0") + f" + O({self.p}^{self.prec}, deg>{self.D})"


def _decay_sum(a: TateSeries, b: TateSeries):
    if a.decay is None and b.decay is None:
        return None
    s = min(x.decay[0] for x in (a, b) if x.decay is not None)
    da, db = a.decay_with(s), b.decay_with(s)
    return s, min(da[1], db[1])


def _decay_prod(a: TateSeries, b: TateSeries, overflow: bool):
    if a.decay is None and b.decay is None:
        if not overflow:
            return None
        # two exact polynomials whose product exceeds the cutoff
        s = Fraction(0)
    else:
        s = min(x.decay[0] for x in (a, b) if x.decay is not None)
    da, db = a.decay_with(s), b.decay_with(s)
    return s, da[1] + db[1]


def tate_ops(kind: str, F: TateSeries, G=None):
    if kind == "add":
        return F + G
    if kind == "mul":
        return F * G
    if kind == "eval":
        return F.eval(G)
    raise ValueError(f"unknown operation {kind!r}")


# ---------------------------------------------------------------- binomial exponential


@lru_cache(maxsize=None)
def stirling_first(n: int) -> tuple:
    """Signed Stirling numbers s(i, j) for i <= n: t(t-1)...(t-i+1) = sum_j s(i,j) t^j."""
    rows = [[1]]
    for i in range(1, n + 1):
        prev = rows[-1]
        row = [0] * (i + 1)
        for j in range(i + 1):
            a = prev[j - 1] if j >= 1 else 0
            b = prev[j] if j < len(prev) else 0
            row[j] = a - (i - 1) * b
        rows.append(row)
    return tuple(tuple(r) for r in rows)


def min_degree(p: int, N: int) -> int:
    """Smallest cutoff D with D >= N(p-1)/(p-2)."""
    return -(-N * (p - 1) // (p - 2))


def binom_slope(p: int) -> Fraction:
    return Fraction(p - 2, p - 1)


@lru_cache(maxsize=4096)
def _binom_coeffs(p: int, x: int, N: int, D: int) -> tuple:
    """Coefficients mod p^N of sum_i C(t, i) x^i truncated at t^D; p | x."""
    mod = p ** N
    st = stirling_first(D)
    d = [0] * (D + 1)
    xi = 1
    fact_unit, fact_v = 1, 0
    for i in range(D + 1):
        if i:
            xi *= x
            m = i
            while m % p == 0:
                m //= p
                fact_v += 1
            fact_unit = fact_unit * m % mod
        # x^i / i! is integral because val(x^i) >= i > val(i!)
        d[i] = (xi // p ** fact_v) % (mod * 1) * pow(fact_unit, -1, mod) % mod
    out = []
    for j in range(D + 1):
        s = 0
        for i in range(j, D + 1):
            s += st[i][j] * d[i]
        out.append(s % mod)
    return tuple(out)


def binom_exp_series(v: PadicNumber, D: int | None = None) -> TateSeries:
    """Truncation of v^t = sum_i C(t, i) (v - 1)^i for v = 1 mod p.

    The coefficients satisfy val(c_j) >= j(p-2)/(p-1); with D at least
    N(p-1)/(p-2) the discarded degrees vanish modulo p^N, so the result is
    exact modulo (p^N, t^(D+1)).
    """
    p, N = v.p, v.prec
    if v.val != 0 or (v.unit - 1) % p:
        raise ValueError("binomial exponential needs v = 1 mod p")
    if D is None:
        D = min_degree(p, N)
    if D * (p - 2) < N * (p - 1):
        raise PrecisionError(f"degree cutoff {D} too small for precision {N} at p={p}")
    x = (v.residue() - 1) % p ** N
    cs = _binom_coeffs(p, x, N, D)
    return TateSeries(p, 1, D, {(j,): c for j, c in enumerate(cs)}, 0, N,
                      (binom_slope(p), Fraction(0)))


def binom_precision_floor(p: int, N: int, D: int) -> int:
    """Precision certified for binom_exp_series: min(N, tail bound at degree D + 1)."""
    return min(N, math.floor(binom_slope(p) * (D + 1)))


def padic_point(f, p: int, N: int) -> PadicNumber:
    f = frac(f)
    if f.denominator % p == 0:
        raise ValueError(f"exponent {f} has denominator divisible by {p}")
    return PadicNumber.from_rational(f, p, N)


_exp_cache: dict = {}


def binom_exp_at(v: PadicNumber, f) -> PadicNumber:
    """The canonical f-th power of v = 1 mod p, f in Z_(p)."""
    key = (v.p, v.prec, v.unit, v.val, frac(f))
    hit = _exp_cache.get(key)
    if hit is not None:
        return hit
    t0 = padic_point(f, v.p, v.prec)
    out = binom_exp_series(v).eval(t0).with_prec(v.prec)
    _exp_cache[key] = out
    return out


# ---------------------------------------------------------------- Strassman bound


def strassman_bound(F: TateSeries):
    """Upper bound for the number of zeros of F on the closed unit disc.

    Returns the largest index attaining the minimal coefficient valuation,
    or math.inf when the discarded tail might attain that minimum.
    """
    if F.nvars != 1:
        raise ValueError("Strassman bound needs a one-variable series")
    vals = F.coeff_vals()
    known = {k[0]: v for k, v in vals.items() if v < F.prec}
    if not known:
        raise PrecisionError("series is indistinguishable from zero at working precision")
    m = min(known.values())
    if F.tail_bound(0) <= m:
        return math.inf
    return max(k for k, v in known.items() if v == m)


# ---------------------------------------------------------------- embeddings


@dataclass(frozen=True)
class Embedding:
    mode: str
    p: int
    N: int
    seed: int
    basis: ExponentBasis
    images: tuple  # PadicNumber per basis symbol

    def image(self, name: str) -> PadicNumber:
        return self.images[self.basis.index(name)]

    def to_json(self):
        return {"mode": self.mode, "p": self.p, "N": self.N, "seed": self.seed}

    def table(self):
        return {s.name: x for s, x in zip(self.basis.symbols, self.images)}


def _random_unit(rng: random.Random, p: int, N: int) -> int:
    while True:
        u = rng.randrange(1, p ** N)
        if u % p:
            return u


def build_embedding(basis: ExponentBasis, mode: str, p: int, N: int, seed: int,
                    relations=None) -> Embedding:
    check_prime(p)
    if mode not in ("monotone", "generic"):
        raise ValueError(f"unknown embedding mode {mode!r}")
    if mode == "generic":
        from .monoid import genericity_test
        verdict = genericity_test(basis, relations or [])
        if not verdict.passed:
            raise ValueError(f"genericity test failed, witness {verdict.witness}")
    images = []
    for s in basis.symbols:
        rng = random.Random(f"{seed}:{mode}:{p}:{N}:{s.name}")
        mu = _random_unit(rng, p, N)
        if mode == "generic" and s.role == "energy":
            images.append(PadicNumber(p, 1, mu, N))
        else:
            images.append(PadicNumber.from_int(1 + p * mu, p, N))
    return Embedding(mode, p, N, seed, basis, tuple(images))


def embed_exponent(e: Embedding, g: Exponent) -> PadicNumber:
    """Image of T^g."""
    out = PadicNumber(e.p, 0, 1, e.N)
    for c, s, x in zip(g.coords, e.basis.symbols, e.images):
        if c == 0:
            continue
        if c.denominator % e.p == 0:
            raise ValueError(f"exponent coordinate {c} has denominator divisible by {e.p}")
        if e.mode == "generic" and s.role == "energy":
            if c < 0 or c.denominator != 1:
                raise ValueError("generic embedding needs nonnegative integer energy coordinates")
            out = out * x ** int(c)
        else:
            out = out * binom_exp_at(x, c)
    return out.with_prec(min(out.prec, e.N))


def embed_novikov(e: Embedding, a: NovikovSeries) -> PadicNumber:
    """Image of a Novikov series under T^g -> product of basis images."""
    prec = e.N
    if not a.polynomial:
        if e.mode == "monotone":
            raise CutoffError("monotone images of truncated series do not converge")
        if any(any(c for c in g.part("flux").coords) for _, g in a.terms):
            raise CutoffError("truncated series with flux exponents cannot be embedded")
        emax = max(s.midpoint + s.radius for s in a.basis.symbols if s.role == "energy")
        lo = a.cutoff.interval()[0]
        prec = min(prec, math.ceil(lo / emax))
    out = PadicNumber(e.p, prec, 0, prec)
    for c, g in a.terms:
        out = out + PadicNumber.from_rational(c, e.p, e.N + vp_frac(c, e.p) + 1) * \
            embed_exponent(e, g)
    return out.with_prec(min(out.prec, prec))


def embed_family_weight(e: Embedding, g: Exponent, variable: str = "t") -> TateSeries:
    """The series T_mu^(t g) in the variable t, t1 or t2."""
    if e.mode == "generic" and any(g.part("energy").coords):
        raise ValueError("family weight must be a flux exponent in generic mode")
    base = embed_exponent(e, g)
    series = binom_exp_series(base)
    if variable == "t":
        return series
    if variable == "t1":
        return series.to_var(0)
    if variable == "t2":
        return series.to_var(1)
    raise ValueError(f"unknown variable {variable!r}")
