"""Curves on the flat torus R^2/Z^2 (area 1 unless scaled).

Two generators of data: a pair of circles cobounding two strips (the bigon
pair), and straight lines of rational slope whose triangle counts give mu^2.
Both also provide independent geometric answers used to check the family
machinery.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import floor, gcd

from .ainf import AinfCategory, DiscTerm, Generator, make_category
from .exponents import Exponent, ExponentBasis, frac


# ---------------------------------------------------------------- bigon pair


@dataclass
class BigonConfig:
    """Two circles meeting in x (degree 0) and y (degree 1).

    The strips from x to y have areas a1, a2 (Exponents) and boundary classes
    c1, c2 on the moving circle. alpha gives the flux per unit parameter of
    each homology coordinate; the k-th iterate of the isotopy sits at
    parameter f = k * step.
    """

    basis: ExponentBasis
    a1: Exponent
    a2: Exponent
    c1: tuple
    c2: tuple
    alpha: tuple
    step: Fraction = Fraction(1)
    name: str = "bigon"

    def __post_init__(self):
        self.step = frac(self.step)
        self.c1, self.c2 = tuple(self.c1), tuple(self.c2)
        if len(self.c1) != len(self.alpha) or len(self.c2) != len(self.alpha):
            raise ValueError("flux classes and flux form have different ranks")
        for a in (self.a1, self.a2):
            if a.sign() <= 0:
                raise ValueError("strip areas must be positive")

    @property
    def total_area(self) -> Exponent:
        return self.a1 + self.a2

    def flux(self, c) -> Exponent:
        out = self.basis.zero()
        for k, a in zip(c, self.alpha):
            out = out + a.scale(k)
        return out

    def shifted_areas(self, f):
        """Strip areas after moving by parameter f (energy identity, paths normalised)."""
        f = frac(f)
        return self.a1 + self.flux(self.c1).scale(f), self.a2 + self.flux(self.c2).scale(f)

    def period(self):
        """Least P > 0 with P * flux in Z * total area for every class, or None."""
        A = self.total_area
        best = None
        for a in self.alpha:
            if a.is_zero():
                continue
            m = _ratio(a, A)
            if m is None:
                return None
            # P * m must be an integer
            best = Fraction(1, 1) / abs(m) if best is None else best
            q = Fraction(1) / abs(m)
            best = _lcm_frac(best, q)
        return best

    def to_json(self):
        return {"basis": self.basis.to_json(), "a1": self.a1.to_json(), "a2": self.a2.to_json(),
                "c1": list(self.c1), "c2": list(self.c2),
                "alpha": [a.to_json() for a in self.alpha], "step": str(self.step),
                "name": self.name}


def _ratio(a: Exponent, b: Exponent):
    """The rational m with a = m * b, or None."""
    m = None
    for x, y in zip(a.coords, b.coords):
        if y == 0:
            if x != 0:
                return None
            continue
        r = x / y
        if m is None:
            m = r
        elif r != m:
            return None
    return m


def _lcm_frac(a: Fraction, b: Fraction) -> Fraction:
    num = a.numerator * b.numerator // gcd(a.numerator, b.numerator)
    return Fraction(num, gcd(a.denominator, b.denominator))


def bigon_pair(cfg: BigonConfig) -> AinfCategory:
    """Two objects, hom = {x, y}, mu^1(x) = T^a1 y - T^a2 y with boundary arcs."""
    gens = [Generator("x", "L0", "L1", 0), Generator("y", "L0", "L1", 1)]
    terms = []
    for coef, area, c in ((1, cfg.a1, cfg.c1), (-1, cfg.a2, cfg.c2)):
        # arc 0 on L0 closes the loop, arc 1 on L1 carries the strip's class
        arcs = (tuple(-x for x in c), tuple(c))
        terms.append(DiscTerm(("x",), "y", Fraction(coef), area.coords, arcs))
    return make_category(("L0", "L1"), gens, terms, cfg.basis, cfg.alpha, name=cfg.name)


def geometric_rank_oracle(cfg: BigonConfig, k: int) -> int:
    """Rank of HF after k steps, recomputed from the moved strip areas.

    The two strips cancel exactly when their areas agree modulo whole turns
    of the torus (the circle returns to itself after sweeping the total area).
    """
    s1, s2 = cfg.shifted_areas(k * cfg.step)
    m = _ratio(s1 - s2, cfg.total_area)
    if (s1 - s2).is_zero():
        return 2
    if m is not None and m.denominator == 1:
        return 2
    return 0


def regenerate(cfg: BigonConfig, f):
    """Move f by whole periods into the chart where both strips keep positive area.

    Returns (f', number of periods removed). Without a period f is returned
    unchanged.
    """
    f = frac(f)
    P = cfg.period()
    if P is None:
        return f, 0
    A = cfg.total_area
    lo, hi = None, None
    for a, c in ((cfg.a1, cfg.c1), (cfg.a2, cfg.c2)):
        r, m = _ratio(a, A), _ratio(cfg.flux(c), A)
        if r is None or m is None:
            lo = hi = None
            break
        # area r + f m stays positive
        if m < 0:
            hi = r / -m if hi is None else min(hi, r / -m)
        elif m > 0:
            lo = -r / m if lo is None else max(lo, -r / m)
    if hi is not None:
        start = hi - P
    elif lo is not None:
        start = lo
    else:
        start = -P / 2
    turns = floor((f - start) / P)
    if hi is None and lo is not None and f - turns * P == lo:
        turns -= 1
    return f - turns * P, turns


def rational_bigon(a1=Fraction(1, 2), a2=Fraction(1, 2), step=Fraction(1, 3),
                   c1=(0,), c2=(-1,)) -> BigonConfig:
    """Areas and flux all rational multiples of the torus area."""
    basis = ExponentBasis.make([("A", "energy", 1)])
    return BigonConfig(basis, basis.rational(a1), basis.rational(a2), c1, c2,
                       (basis.unit("A"),), step, "bigon-rational")


def irrational_bigon(step=Fraction(1)) -> BigonConfig:
    """Equal half areas, flux period sqrt(2)/10 independent of the area."""
    basis = ExponentBasis.make([
        ("h", "energy", Fraction(1, 2)),
        ("rho", "flux", Fraction(14142136, 10 ** 8), Fraction(1, 10 ** 7), "sqrt(2)/10"),
    ])
    return BigonConfig(basis, basis.unit("h"), basis.unit("h"), (0,), (-1,),
                       (basis.unit("rho"),), step, "bigon-irrational")


# ---------------------------------------------------------------- lines


@dataclass
class LineConfig:
    """Straight circles of slopes (p:q), direction (q, p), in increasing slope order."""

    slopes: tuple
    emax: Fraction = Fraction(2)
    offsets: tuple | None = None
    alpha: tuple | None = None
    basis: ExponentBasis | None = None
    name: str = "lines"

    def __post_init__(self):
        self.slopes = tuple((int(p), int(q)) for p, q in self.slopes)
        self.emax = frac(self.emax)
        for p, q in self.slopes:
            if gcd(p, q) != 1:
                raise ValueError(f"slope ({p}:{q}) is not primitive")
        vals = [_slope_value(s) for s in self.slopes]
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ValueError("slopes must be strictly increasing (q = 0 counts as infinite); "
                             "other orders need higher products in odd degree")
        if self.offsets is None:
            self.offsets = tuple(Fraction(2 * i + 1, 11 + 2 * i) for i in range(len(self.slopes)))
        if self.basis is None:
            self.basis = ExponentBasis.make([
                ("E", "energy", 1),
                ("phi", "flux", Fraction(173205081, 10 ** 8), Fraction(1, 10 ** 6), "sqrt(3)"),
            ])
        if self.alpha is None:
            self.alpha = (self.basis.unit("phi"), self.basis.unit("phi", 2))


def _slope_value(s):
    p, q = s
    return Fraction(10 ** 9) if q == 0 else Fraction(p, q)


def _cross(a, b):
    return a[0] * b[1] - a[1] * b[0]


def _direction(s):
    p, q = s
    return (q, p) if q >= 0 else (-q, -p)


def _meet(d1, c1, d2, c2):
    """Intersection of {cross(d1, v) = c1} and {cross(d2, v) = c2}."""
    det = _cross(d1, d2)
    # cross(d, v) = d0 v1 - d1 v0
    vx = (d2[0] * c1 - d1[0] * c2) / Fraction(det)
    vy = (d2[1] * c1 - d1[1] * c2) / Fraction(det)
    return (vx, vy)


def _reduce(v):
    return (v[0] - floor(v[0]), v[1] - floor(v[1]))


def _lattice(v):
    return (floor(v[0]), floor(v[1]))


def intersection_points(cfg: LineConfig, i: int, j: int):
    """Points of line i meeting line j, reduced to [0,1)^2 and sorted."""
    d1, d2 = _direction(cfg.slopes[i]), _direction(cfg.slopes[j])
    n = abs(_cross(d1, d2))
    pts = set()
    for m1 in range(n):
        for m2 in range(n):
            pts.add(_reduce(_meet(d1, cfg.offsets[i] + m1, d2, cfg.offsets[j] + m2)))
    pts = sorted(pts)
    if len(pts) != n:
        raise ValueError("intersection count mismatch")
    return pts


def _gen_name(i, j, k):
    return f"x{i}{j}_{k}"


def line_triangles(cfg: LineConfig, i: int, j: int, k: int, orientation: int = -1):
    """Triangles with vertices x in L_i^L_j, y in L_j^L_k, z in L_i^L_k.

    The lift of x is fixed in [0,1)^2; the lift of y runs along the lift of
    L_j through x. Returns a list of (x index, y index, z index, area, arcs).
    """
    dirs = [_direction(s) for s in cfg.slopes]
    P_ij = intersection_points(cfg, i, j)
    P_jk = intersection_points(cfg, j, k)
    P_ik = {pt: n for n, pt in enumerate(intersection_points(cfg, i, k))}
    out = []
    dj = dirs[j]
    for xi, X in enumerate(P_ij):
        cj = _cross(dj, X)
        ci = _cross(dirs[i], X)
        for yi, y0 in enumerate(P_jk):
            # y0 + n lies on the lift through X when cross(dj, n) = cj - cross(dj, y0)
            k0 = cj - _cross(dj, y0)
            if k0.denominator != 1:
                continue
            n0 = _particular(dj, int(k0))
            js = range(-60, 61)
            for t in js:
                Y = (y0[0] + n0[0] + t * dj[0], y0[1] + n0[1] + t * dj[1])
                Z = _meet(dirs[i], ci, dirs[k], _cross(dirs[k], Y))
                area2 = _cross((Y[0] - X[0], Y[1] - X[1]), (Z[0] - X[0], Z[1] - X[1]))
                if area2 * orientation <= 0:
                    continue
                area = abs(area2) / 2
                if area >= cfg.emax:
                    continue
                zi = P_ik[_reduce(Z)]
                nX, nY, nZ = _lattice(X), _lattice(Y), _lattice(Z)
                arcs = (_sub(nX, nZ), _sub(nY, nX), _sub(nZ, nY))
                out.append((xi, yi, zi, area, arcs))
    return out


def _sub(a, b):
    return (a[0] - b[0], a[1] - b[1])


def _particular(d, k):
    """An integer vector n with cross(d, n) = k, for primitive d."""
    a, b = d
    # a n1 - b n0 = k: extended Euclid on (a, -b)
    g, s, t = _egcd(a, -b)
    if k % g:
        raise ValueError("no integer solution")
    m = k // g
    return (t * m, s * m)


def _egcd(a, b):
    if b == 0:
        return (abs(a), 1 if a >= 0 else -1, 0)
    g, s, t = _egcd(b, a % b)
    return (g, t, s - (a // b) * t)


def torus_lines(cfg: LineConfig, orientation: int = -1) -> AinfCategory:
    """Category of the lines with mu^2 from triangles of area below emax."""
    m = len(cfg.slopes)
    objs = tuple(f"L{i}" for i in range(m))
    gens = []
    for i in range(m):
        for j in range(i + 1, m):
            for n, _ in enumerate(intersection_points(cfg, i, j)):
                gens.append(Generator(_gen_name(i, j, n), objs[i], objs[j], 0))
    E = cfg.basis.unit("E")
    terms = []
    for i in range(m):
        for j in range(i + 1, m):
            for k in range(j + 1, m):
                for xi, yi, zi, area, arcs in line_triangles(cfg, i, j, k, orientation):
                    terms.append(DiscTerm((_gen_name(i, j, xi), _gen_name(j, k, yi)),
                                          _gen_name(i, k, zi), Fraction(1),
                                          E.scale(area).coords, arcs))
    return make_category(objs, gens, terms, cfg.basis, cfg.alpha, arity_cap=3,
                         emax=E.scale(cfg.emax), name=cfg.name)


def mu2_table(cat: AinfCategory):
    """{(x, y, z): {area: count}} from a line category."""
    E = cat.basis.index("E")
    out = {}
    for names, ts in cat.terms.items():
        for t in ts:
            key = names + (t.output,)
            d = out.setdefault(key, {})
            d[t.energy[E]] = d.get(t.energy[E], 0) + int(t.coefficient)
    return out


def lattice_triangle_oracle(cfg: LineConfig, i: int, j: int, k: int, orientation: int = -1,
                            box: int = 12):
    """Brute-force triangle counts over translates of the three lines.

    Every triple of lifts (offset + integer) within the box is intersected
    directly; triangles are identified up to integer translation by moving
    the L_i^L_j vertex into [0,1)^2. Returns {(x, y, z): {area: count}}.
    """
    dirs = [_direction(s) for s in cfg.slopes]
    names = {}
    for a, b in ((i, j), (j, k), (i, k)):
        names[(a, b)] = {pt: n for n, pt in enumerate(intersection_points(cfg, a, b))}
    seen = set()
    out = {}
    ci0 = cfg.offsets[i]
    # translating the whole triangle moves every lift index, so fixing the
    # L_i lift to one of the lifts meeting [0,1)^2 loses nothing
    for mi in range(-box, box + 1):
        for mj in range(-box, box + 1):
            for mk in range(-box, box + 1):
                ci, cj, ck = ci0 + mi, cfg.offsets[j] + mj, cfg.offsets[k] + mk
                X = _meet(dirs[i], ci, dirs[j], cj)
                Y = _meet(dirs[j], cj, dirs[k], ck)
                Z = _meet(dirs[i], ci, dirs[k], ck)
                shift = _lattice(X)
                Xr = _sub(X, shift)
                Yr = _sub(Y, shift)
                Zr = _sub(Z, shift)
                key = (Xr, Yr, Zr)
                if key in seen:
                    continue
                area2 = (Yr[0] - Xr[0]) * (Zr[1] - Xr[1]) - (Yr[1] - Xr[1]) * (Zr[0] - Xr[0])
                if area2 * orientation <= 0 or abs(area2) / 2 >= cfg.emax:
                    continue
                seen.add(key)
                gx = _gen_name(i, j, names[(i, j)][_reduce(X)])
                gy = _gen_name(j, k, names[(j, k)][_reduce(Y)])
                gz = _gen_name(i, k, names[(i, k)][_reduce(Z)])
                d = out.setdefault((gx, gy, gz), {})
                a = abs(area2) / 2
                d[a] = d.get(a, 0) + 1
    return out


__all__ = ["BigonConfig", "LineConfig", "bigon_pair", "geometric_rank_oracle", "regenerate",
           "rational_bigon", "irrational_bigon", "torus_lines", "line_triangles",
           "lattice_triangle_oracle", "intersection_points", "mu2_table"]
