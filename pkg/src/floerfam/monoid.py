"""Finitely generated submonoids of the nonnegative reals.

Elements are formal reals: Exponents over a basis of rationally independent
symbols. The extension to a free monoid follows the classical induction:
each new generator is either independent of the current free basis, or is
split into positive and nonpositive parts and the basis is rebuilt from
positive combinations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import lcm

from .exponents import Exponent, ExponentBasis, PrecisionError, compare, sign_of
from .linalg import in_span_q, nullspace_q, rank_q, solve_q


@dataclass(frozen=True)
class MembershipCertificate:
    gens: tuple
    coeffs: tuple
    target: Exponent

    def verify(self) -> bool:
        if any(c < 0 or Fraction(c).denominator != 1 for c in self.coeffs):
            return False
        total = self.target.basis.zero()
        for c, g in zip(self.coeffs, self.gens):
            total = total + g.scale(c)
        return total.coords == self.target.coords


def independent(xs) -> bool:
    return rank_q([list(x.coords) for x in xs]) == len(xs)


def _coefficients(ys, x):
    """Rational c with x = sum c_i y_i, or None when x is independent of ys."""
    if not ys:
        return None if not x.is_zero() else []
    M = [list(col) for col in zip(*(y.coords for y in ys))]
    return solve_q(M, list(x.coords))


def _split_of_one(iotas_num, eta):
    """Nonnegative rationals lambda_h summing to 1 with lambda_h * eta < a_h y_h.

    iotas_num[h] is the exponent a_h y_h, so the condition reads
    lambda_h < iota_h = a_h y_h / eta. The scan tries common denominators
    d = 1, 2, ... and fills lambda_h = k_h / d greedily in index order with
    the largest integer k_h certified below d * iota_h.
    """
    for d in itertools.count(1):
        caps = []
        for num in iotas_num:
            lo, hi = num.interval()
            elo, ehi = eta.interval()
            k = int((d * hi) / elo) + 1 if elo > 0 else d
            k = min(k, d)
            # largest k with k * eta < d * a_h y_h, certified
            while k >= 0 and compare(eta.scale(k), num.scale(d)) >= 0:
                k -= 1
            caps.append(max(k, 0))
        if sum(caps) >= d:
            out, rest = [], d
            for c in caps:
                take = min(c, rest)
                out.append(Fraction(take, d))
                rest -= take
            return out
        if d > 10 ** 6:
            raise PrecisionError("no rational splitting found")
    return None  # pragma: no cover


def _step(ys, x):
    """Extend a free basis ys so that the monoid contains x."""
    c = _coefficients(ys, x)
    if c is None:
        return ys + [x]
    pos = [i for i, ci in enumerate(c) if ci > 0]
    neg = [i for i, ci in enumerate(c) if ci <= 0]
    if not pos:
        raise ValueError("a positive element cannot be a nonpositive combination")
    a = {i: c[i] for i in pos}
    b = {i: -c[i] for i in neg}
    basis = x.basis
    eta = basis.zero()
    for i in neg:
        eta = eta + ys[i].scale(b[i])
    terms = [ys[i].scale(a[i]) for i in pos]
    if eta.is_zero():
        lam = [Fraction(1)] + [Fraction(0)] * (len(pos) - 1)
    else:
        if sign_of(eta) <= 0:
            raise PrecisionError("negative part is not certifiably positive")
        lam = _split_of_one(terms, eta)
    tau1 = reduce(lambda u, v: u * v, (a[i].numerator for i in pos), 1)
    tau2 = reduce(lambda u, v: u * v,
                  [l.denominator for l in lam] + [b[i].denominator for i in neg], 1)
    out = []
    for h, i in enumerate(pos):
        out.append((terms[h] - eta.scale(lam[h])).scale(Fraction(1, tau1)))
    for i in neg:
        out.append(ys[i].scale(Fraction(1, tau1 * tau2)))
    for g in out:
        if sign_of(g) <= 0:
            raise PrecisionError("constructed generator is not certifiably positive")
    return out


def extend_to_free(xs) -> list[Exponent]:
    """Positive, rationally independent generators of a monoid containing xs."""
    xs = list(xs)
    for x in xs:
        if x.is_zero() or sign_of(x) <= 0:
            raise ValueError(f"generator {x} is not positive")
    ys: list[Exponent] = []
    for x in xs:
        ys = _step(ys, x)
    return ys


def membership(gens, x, bound: int = 20):
    """Nonnegative integer certificate for x over gens, or None.

    Independent generators give a unique rational solution that is checked
    for integrality and sign; dependent ones fall back to bounded search.
    """
    gens = list(gens)
    if independent(gens):
        c = _coefficients(gens, x)
        if c is None:
            return None
        if all(ci >= 0 and ci.denominator == 1 for ci in c):
            cert = MembershipCertificate(tuple(gens), tuple(int(ci) for ci in c), x)
            return cert if cert.verify() else None
        return None
    return _enumerate(gens, x, bound)


def _enumerate(gens, x, bound):
    n = len(gens)
    best = None

    def rec(i, acc, coeffs):
        nonlocal best
        if best is not None:
            return
        if i == n:
            if acc.coords == x.coords:
                best = MembershipCertificate(tuple(gens), tuple(coeffs), x)
            return
        for k in range(bound + 1):
            nxt = acc + gens[i].scale(k)
            if k and compare(nxt, x) > 0:
                break
            rec(i + 1, nxt, coeffs + [k])

    rec(0, x.basis.zero(), [])
    return best


# ---------------------------------------------------------------- genericity


@dataclass(frozen=True)
class GenericityVerdict:
    passed: bool
    witness: tuple | None = None

    def __bool__(self):
        return self.passed


def exact_relations(basis: ExponentBasis):
    """Rational relations among symbols with exact rational values."""
    exact = [i for i, s in enumerate(basis.symbols) if s.radius == 0]
    rels = []
    for i in exact:
        if basis.symbols[i].midpoint == 0:
            v = [Fraction(0)] * len(basis)
            v[i] = Fraction(1)
            rels.append(v)
    nonzero = [i for i in exact if basis.symbols[i].midpoint != 0]
    for i, j in zip(nonzero, nonzero[1:]):
        v = [Fraction(0)] * len(basis)
        v[i] = basis.symbols[j].midpoint
        v[j] = -basis.symbols[i].midpoint
        rels.append(v)
    return rels


def genericity_test(basis: ExponentBasis, relations=(), flux=None, energy=None):
    """Pass iff span(flux) and span(energy) meet only in 0 modulo the relations.

    relations are rational vectors r with sum r_i * value_i = 0. Relations
    among exactly known rational symbols are added automatically.
    """
    n = len(basis)
    flux = basis.indices("flux") if flux is None else [basis.index(s) if isinstance(s, str)
                                                       else s for s in flux]
    energy = basis.indices("energy") if energy is None else [basis.index(s) if isinstance(s, str)
                                                             else s for s in energy]
    rels = [[Fraction(x) for x in r] for r in relations] + exact_relations(basis)
    rels = [r for r in rels if any(r)]
    cols = []
    for i in flux:
        cols.append([Fraction(int(k == i)) for k in range(n)])
    for i in energy:
        cols.append([Fraction(-int(k == i)) for k in range(n)])
    for r in rels:
        cols.append([-x for x in r])
    if not cols:
        return GenericityVerdict(True)
    M = [list(row) for row in zip(*cols)]
    for v in nullspace_q(M, len(cols)):
        x = [Fraction(0)] * n
        for a, i in zip(v[:len(flux)], flux):
            x[i] += a
        if any(x) and not in_span_q(rels, x):
            scale = lcm(*(c.denominator for c in x))
            if next(c for c in x if c) < 0:
                scale = -scale
            return GenericityVerdict(False, tuple(c * scale for c in x))
    return GenericityVerdict(True)
