"""Exact ranks of free finite complexes over fields, Novikov rings and Tate algebras.

Matrices are lists of rows. Over Q the entries are Fractions; over Novikov or
family rings the entries are exact series and elimination is fraction-free,
which is valid because the group rings involved are integral domains. Over
p-adic fields the pivot is the entry of least valuation and the precision
of the entries that are declared zero is reported as a floor.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .exponents import (FamilySeries, NovikovSeries, PrecisionError, ev_at, window_nonvanishing)
from .padics import PadicNumber, TateSeries, strassman_bound

# ---------------------------------------------------------------- rational matrices


def rref(M):
    """Reduced row echelon form over Q; returns (R, pivot columns)."""
    R = [[Fraction(x) for x in row] for row in M]
    rows = len(R)
    cols = len(R[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if R[i][c] != 0), None)
        if piv is None:
            continue
        R[r], R[piv] = R[piv], R[r]
        inv = 1 / R[r][c]
        R[r] = [x * inv for x in R[r]]
        for i in range(rows):
            if i != r and R[i][c] != 0:
                f = R[i][c]
                R[i] = [a - f * b for a, b in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return R, pivots


def rank_q(M) -> int:
    if not M or not M[0]:
        return 0
    return len(rref(M)[1])


def nullspace_q(M, ncols: int | None = None):
    """Basis of {x : M x = 0} over Q."""
    if not M:
        n = ncols or 0
        return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    R, pivots = rref(M)
    n = len(M[0])
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -R[i][f]
        basis.append(v)
    return basis


def solve_q(M, b):
    """One solution x of M x = b over Q, or None."""
    aug = [list(row) + [bi] for row, bi in zip(M, b)]
    R, pivots = rref(aug)
    n = len(M[0]) if M else 0
    if n in pivots:
        return None
    x = [Fraction(0)] * n
    for i, pc in enumerate(pivots):
        x[pc] = R[i][n]
    return x


def in_span_q(vectors, v) -> bool:
    if not vectors:
        return not any(v)
    M = [list(col) for col in zip(*vectors)]
    return solve_q(M, list(v)) is not None


# ---------------------------------------------------------------- fraction-free elimination


def domain_rank(M, is_zero=None):
    """Rank over an exact integral domain by fraction-free elimination.

    Returns (rank, pivot rows, pivot columns) where the pivot rows and columns
    index a square submatrix with nonzero determinant.
    """
    if is_zero is None:
        is_zero = _is_zero
    A = [list(row) for row in M]
    rows = len(A)
    cols = len(A[0]) if rows else 0
    order = list(range(rows))
    prow, pcol = [], []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if not is_zero(A[i][c])), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        order[r], order[piv] = order[piv], order[r]
        p = A[r][c]
        for i in range(r + 1, rows):
            a = A[i][c]
            if is_zero(a):
                continue
            A[i] = [p * x - a * y for x, y in zip(A[i], A[r])]
        prow.append(order[r])
        pcol.append(c)
        r += 1
        if r == rows:
            break
    return r, prow, pcol


def _is_zero(x):
    if isinstance(x, (int, Fraction)):
        return x == 0
    return x.is_zero()


def det_laplace(M, one, zero):
    """Determinant by expansion along rows with memoised column subsets."""
    n = len(M)
    if n == 0:
        return one
    memo = {}

    def rec(row, cols):
        if row == n:
            return one
        key = (row, cols)
        if key in memo:
            return memo[key]
        total = zero
        k = 0
        for j in range(n):
            if cols & (1 << j):
                continue
            a = M[row][j]
            if not _is_zero(a):
                term = a * rec(row + 1, cols | (1 << j))
                total = total - term if k % 2 else total + term
            k += 1
        memo[key] = total
        return total

    return rec(0, 0)


def submatrix(M, rows, cols):
    return [[M[i][j] for j in cols] for i in rows]


# ---------------------------------------------------------------- p-adic elimination


def padic_rank(M, min_floor: int = 1):
    """Rank of a matrix of PadicNumbers by minimal-valuation pivoting.

    Returns (rank, floor, pivot rows, pivot cols). floor is the least precision
    at which the remaining entries were found to vanish; a rank is only
    returned when floor >= min_floor.
    """
    A = [list(row) for row in M]
    rows = len(A)
    cols = len(A[0]) if rows else 0
    live_r, live_c = list(range(rows)), list(range(cols))
    prow, pcol = [], []
    while live_r and live_c:
        best = None
        for i in live_r:
            for j in live_c:
                x = A[i][j]
                if not x.is_zero() and (best is None or x.val < A[best[0]][best[1]].val):
                    best = (i, j)
        if best is None:
            break
        i0, j0 = best
        piv = A[i0][j0]
        inv = piv.inv()
        for i in live_r:
            if i == i0 or A[i][j0].is_zero():
                continue
            f = A[i][j0] * inv
            for j in live_c:
                A[i][j] = A[i][j] - f * A[i0][j]
        live_r.remove(i0)
        live_c.remove(j0)
        prow.append(i0)
        pcol.append(j0)
    floor = min((A[i][j].prec for i in live_r for j in live_c), default=math.inf)
    if floor < min_floor:
        raise PrecisionError(f"rank not certifiable: remaining entries only known to p^{floor}")
    return len(prow), floor, prow, pcol


# ---------------------------------------------------------------- complexes


@dataclass
class FreeComplex:
    """Z/2-graded free complex C0 <-> C1 with d0: C0 -> C1 and d1: C1 -> C0."""

    sizes: tuple
    d0: list
    d1: list
    ring: str = "Q"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        n0, n1 = self.sizes
        for name, m, r, c in (("d0", self.d0, n1, n0), ("d1", self.d1, n0, n1)):
            if len(m) != r or any(len(row) != c for row in m):
                raise ValueError(f"{name} has the wrong shape for sizes {self.sizes}")

    @classmethod
    def two_term(cls, d, ring="Q", zero=Fraction(0), meta=None):
        """C0 -> C1 given by the matrix d, with nothing mapping back."""
        n1 = len(d)
        n0 = len(d[0]) if d else 0
        return cls((n0, n1), d, [[zero] * n1 for _ in range(n0)], ring, meta or {})

    def matrices(self):
        return self.d0, self.d1

    def map_entries(self, fn, ring):
        d0 = [[fn(x) for x in row] for row in self.d0]
        d1 = [[fn(x) for x in row] for row in self.d1]
        return FreeComplex(self.sizes, d0, d1, ring, dict(self.meta))


def matmul(A, B, zero):
    if not A or not B:
        return [[zero] * (len(B[0]) if B else 0) for _ in A]
    return [[sum((A[i][k] * B[k][j] for k in range(len(B))), zero)
             for j in range(len(B[0]))] for i in range(len(A))]


def check_d_squared(C: FreeComplex, zero) -> bool:
    for a, b in ((C.d1, C.d0), (C.d0, C.d1)):
        if not a or not b or not a[0]:
            continue
        for row in matmul(a, b, zero):
            if any(not _is_zero(x) for x in row):
                return False
    return True


def _rank_any(M, ring, min_floor=1):
    if not M or not M[0]:
        return 0
    if ring == "padic":
        return padic_rank(M, min_floor)[0]
    if ring == "Q":
        return rank_q(M)
    return domain_rank(M)[0]


def cohomology_rank(C: FreeComplex, min_floor: int = 1):
    """[dim H^0, dim H^1] over the field tagged by C.ring (Q, padic, novikov)."""
    r0 = _rank_any(C.d0, C.ring, min_floor)
    r1 = _rank_any(C.d1, C.ring, min_floor)
    n0, n1 = C.sizes
    return [n0 - r0 - r1, n1 - r0 - r1]


# ---------------------------------------------------------------- Tate complexes


def _tate_point(p, prec, seed):
    rng = random.Random(f"generic-point:{seed}:{p}")
    return PadicNumber.from_int(rng.randrange(p ** prec), p, prec)


def _critical_minor(M, rows, cols, template: TateSeries):
    one = template._coerce(1)
    zero = template._coerce(0)
    return det_laplace(submatrix(M, rows, cols), one, zero)


@dataclass
class RankReport:
    generic_ranks: list
    minor: object = None
    bound: float = math.inf
    samples: list = field(default_factory=list)
    ranks: list = field(default_factory=list)
    exceptional: list = field(default_factory=list)
    delta: Fraction | None = None

    def to_json(self):
        return {"generic_ranks": self.generic_ranks,
                "bound": None if self.bound == math.inf else self.bound,
                "samples": [str(s) for s in self.samples], "ranks": self.ranks,
                "exceptional": [str(s) for s in self.exceptional],
                "delta": None if self.delta is None else str(self.delta)}

    def table(self) -> str:
        lines = [f"{'sample':>10} {'H0':>4} {'H1':>4}"]
        for s, r in zip(self.samples, self.ranks):
            mark = " *" if s in self.exceptional else ""
            lines.append(f"{str(s):>10} {r[0]:>4} {r[1]:>4}{mark}")
        lines.append(f"generic {self.generic_ranks}, exceptional bound {self.bound}")
        return "\n".join(lines)


def _template(C: FreeComplex) -> TateSeries:
    for m in C.matrices():
        for row in m:
            for x in row:
                if isinstance(x, TateSeries):
                    return x
    raise ValueError("complex has no Tate series entries")


def generic_rank_tate(C: FreeComplex, tries: int = 3):
    """Generic ranks over Frac(Q_p<t>) with a certifying minor for each differential.

    The rank of each differential is the largest rank found at a few seeded
    points of Z_p; the determinant of the pivot submatrix at that point is
    computed as a series and must be nonzero at working precision. The
    product of these minors, normalised so its least-valuation coefficient
    is a unit, is returned as the critical minor.
    """
    tpl = _template(C)
    minor = tpl._coerce(1)
    dranks = []
    for m in C.matrices():
        if not m or not m[0]:
            dranks.append(0)
            continue
        best = (-1, None, None)
        for k in range(tries):
            pt = _tate_point(tpl.p, tpl.prec, k)
            vals = [[x.eval(pt) for x in row] for row in m]
            r, _, prow, pcol = padic_rank(vals, min_floor=1)
            if r > best[0]:
                best = (r, prow, pcol)
        r, prow, pcol = best
        if r:
            det = _critical_minor(m, prow, pcol, tpl)
            if det.min_val() >= det.prec:
                raise PrecisionError("certifying minor vanishes at working precision")
            minor = minor * det
        dranks.append(r)
    n0, n1 = C.sizes
    generic = [n0 - dranks[0] - dranks[1], n1 - dranks[0] - dranks[1]]
    shift = minor.min_val()
    if shift < minor.prec:
        minor = TateSeries(minor.p, minor.nvars, minor.D, minor.coeffs, minor.scale - shift,
                           minor.rel, None if minor.decay is None else
                           (minor.decay[0], minor.decay[1] - shift), minor.radius)
    return generic, minor


def exceptional_report(C: FreeComplex, samples, min_floor: int = 1) -> RankReport:
    if not any(x for m in C.matrices() for row in m for x in row):
        # no differential at all: every fiber has the full ranks
        full = list(C.sizes)
        return RankReport(full, None, 0, list(samples), [full for _ in samples], [])
    generic, minor = generic_rank_tate(C)
    bound = strassman_bound(minor) if minor.coeffs else math.inf
    ranks, exc = [], []
    for s in samples:
        fiber = C.map_entries(lambda x, s=s: x.eval(s) if isinstance(x, TateSeries)
                              else x, "padic")
        h = cohomology_rank(fiber, min_floor)
        ranks.append(h)
        if h[0] > generic[0] or h[1] > generic[1]:
            exc.append(s)
    return RankReport(generic, minor, bound, list(samples), ranks, exc)


# ---------------------------------------------------------------- Novikov families


def rank_window_novikov(C: FreeComplex, samples=(), grid: int = 0) -> RankReport:
    """Ranks of a complex over Lambda{z^R} at z = 1 and at z = T^t for sampled t.

    The pivot submatrices at z = 1 give determinants whose product f has
    f(1) != 0; window_nonvanishing(f) certifies delta, inside which the ranks
    of the differentials cannot drop. grid > 0 adds that many points spaced
    evenly inside (-delta, delta), skipping 0.
    """
    f = None
    dranks = []
    for m in C.matrices():
        if not m or not m[0]:
            dranks.append(0)
            continue
        at_one = [[ev_at(x, 0) for x in row] for row in m]
        r, prow, pcol = domain_rank(at_one)
        dranks.append(r)
        if r:
            sub = submatrix(m, prow, pcol)
            tpl = sub[0][0]
            det = det_laplace(sub, FamilySeries.const(tpl.basis, 1, tpl.window, tpl.cutoff),
                              FamilySeries(tpl.basis, (), tpl.window, tpl.cutoff))
            f = det if f is None else f * det
    n0, n1 = C.sizes
    base = [n0 - dranks[0] - dranks[1], n1 - dranks[0] - dranks[1]]
    if f is None:
        delta = None
    else:
        delta = window_nonvanishing(f)
    samples = list(samples)
    if grid and delta is not None:
        # any smaller radius is also certified; a short fraction keeps samples cheap
        inner = delta.limit_denominator(64)
        if inner > delta:
            inner = Fraction(math.floor(delta * 64), 64)
        half = grid // 2
        steps = [j for j in range(-half, grid - half + 1) if j][:grid]
        samples += [inner * Fraction(j, half + 2) for j in steps]
    ranks, exc = [], []
    for s in samples:
        fiber = C.map_entries(lambda x, s=s: ev_at(x, s), "novikov")
        h = cohomology_rank(fiber)
        ranks.append(h)
        if h != base:
            exc.append(s)
    rep = RankReport(base, f, math.inf, list(samples), ranks, exc, delta)
    return rep


# ---------------------------------------------------------------- seeded Tate complexes


def _unimodular(rng: random.Random, n: int, steps: int = 6):
    """A random integer matrix of determinant +-1, from elementary row operations."""
    M = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps if n > 1 else 0):
        i, j = rng.sample(range(n), 2)
        c = rng.choice((-2, -1, 1, 2))
        M[i] = [a + c * b for a, b in zip(M[i], M[j])]
    if n:
        rng.shuffle(M)
    return M


def _poly_from_roots(roots, lead):
    cs = [lead]
    for a in roots:
        # multiply by (t - a)
        nxt = [0] * (len(cs) + 1)
        for k, c in enumerate(cs):
            nxt[k + 1] += c
            nxt[k] -= a * c
        cs = nxt
    return cs


def seeded_tate_complex(seed: int, p: int = 5, N: int = 16, max_size: int = 6,
                        max_degree: int = 4, root_range: int = 50):
    """A two-term complex over Q_p<t> with rank drops at planted integer points.

    d0 = U diag(g_1, ..., g_r, 0, ...) V with U, V unimodular over Z and
    each g_i a product of linear factors (t - a), the a planted in
    [-root_range, root_range]. Returns (complex, planted roots).
    """
    rng = random.Random(f"tate-complex:{seed}:{p}")
    n0 = rng.randint(1, max_size // 2)
    n1 = rng.randint(1, max_size - n0)
    r = rng.randint(1, min(n0, n1))
    roots = set()
    diag = []
    for _ in range(r):
        k = rng.randint(0, max_degree)
        rs = [rng.randint(-root_range, root_range) for _ in range(k)]
        roots.update(rs)
        lead = rng.choice([c for c in range(1, p ** 2) if c % p])
        diag.append(_poly_from_roots(rs, lead))
    U, V = _unimodular(rng, n1), _unimodular(rng, n0)
    D = max_degree * max_size
    zero = [0]
    d0 = []
    for i in range(n1):
        row = []
        for j in range(n0):
            cs = zero
            for k in range(r):
                c = U[i][k] * V[k][j]
                if c:
                    g = diag[k]
                    cs = [a + c * (g[m] if m < len(g) else 0)
                          for m, a in enumerate(cs + [0] * (len(g) - len(cs)))]
            row.append(TateSeries(p, 1, D, {(m,): a for m, a in enumerate(cs)}, 0, N, None))
        d0.append(row)
    z = TateSeries(p, 1, D, {}, 0, N, None)
    d1 = [[z] * n1 for _ in range(n0)]
    return FreeComplex((n0, n1), d0, d1, "tate", {"seed": seed, "rank": r}), sorted(roots)


def seeded_family_complex(seed: int, basis=None, max_size: int = 3, max_terms: int = 3):
    """A square two-term complex over Lambda{z^R}, acyclic at z = 1.

    d0 = U diag(g_i) V with U, V unimodular over Z; each g_i is a short sum
    c T^beta z^r whose value at z = 1 is nonzero (its lowest T-level is a
    single monomial). Returns the complex.
    """
    from .exponents import ExponentBasis
    if basis is None:
        basis = ExponentBasis.make([
            ("E", "energy", 1),
            ("phi", "flux", Fraction(173205081, 10 ** 8), Fraction(1, 10 ** 6), "sqrt(3)"),
        ])
    rng = random.Random(f"family-complex:{seed}")
    n = rng.randint(1, max_size)
    E, phi = basis.indices("energy")[0], basis.indices("flux")[0]

    def exp(e, f):
        v = [Fraction(0)] * len(basis)
        v[E], v[phi] = Fraction(e), Fraction(f)
        return basis.vec(v)

    diag = []
    for _ in range(n):
        lead = exp(rng.randint(0, 3), 0)
        monos = [(rng.choice((1, 2, -1)), lead, exp(0, rng.randint(-2, 2)))]
        for _ in range(rng.randint(0, max_terms - 1)):
            monos.append((rng.choice((1, -1, 3)), exp(rng.randint(4, 8), 0),
                          exp(0, rng.randint(-3, 3))))
        diag.append(FamilySeries(basis, monos))
    U, V = _unimodular(rng, n), _unimodular(rng, n)
    zero = FamilySeries(basis, ())
    d0 = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = zero
            for k in range(n):
                c = U[i][k] * V[k][j]
                if c:
                    acc = acc + diag[k] * FamilySeries.const(basis, c)
            row.append(acc)
        d0.append(row)
    d1 = [[zero] * n for _ in range(n)]
    return FreeComplex((n, n), d0, d1, "family", {"seed": seed})
