"""Period lattices of the constructed immersions, cylinder/torus quotient
classification, and the exact rational torus-existence oracles.

All yes/no torus decisions run in exact Fraction arithmetic; floats appear
only in emitted generator vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .core import DomainError, rational_sqrt_exact, squarefree_decompose
from .parameters import angle_family_data, rho_tilde_of, t_of_s
from .immersion import Immersion, build


@dataclass(frozen=True)
class ExactBasis:
    """Generators pi * sqrt(surd) * rows[i]; rows are exact rationals and
    surd is squarefree, so Gram data and dual squares stay rational."""

    rows: tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]
    surd: int

    def float_rows(self) -> tuple[tuple[float, float], tuple[float, float]]:
        scale = math.pi * math.sqrt(self.surd)
        return tuple(tuple(scale * float(c) for c in row) for row in self.rows)

    def gram_over_pi2(self) -> tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]:
        """Exact Gram matrix in units of pi^2."""
        d = self.surd
        r = self.rows
        def entry(i, j):
            return d * (r[i][0] * r[j][0] + r[i][1] * r[j][1])
        return ((entry(0, 0), entry(0, 1)), (entry(1, 0), entry(1, 1)))


@dataclass(frozen=True)
class Lattice2:
    """Discrete subgroup of the plane of rank 0, 1 or 2 (reduced basis)."""

    rank: int
    gens: tuple[tuple[float, float], ...]
    exact: Optional[ExactBasis] = None

    def __post_init__(self):
        if self.rank != len(self.gens):
            raise ValueError("rank must equal the number of generators")
        if self.rank == 2:
            d = self.gens[0][0] * self.gens[1][1] - self.gens[0][1] * self.gens[1][0]
            if abs(d) <= 1e-12:
                raise ValueError("rank-2 generators are linearly dependent")

    def points(self, coeff_bound: int) -> np.ndarray:
        """All integer combinations with coefficients in [-bound, bound]."""
        if self.rank == 0:
            return np.zeros((1, 2))
        rng = range(-coeff_bound, coeff_bound + 1)
        if self.rank == 1:
            g = np.array(self.gens[0])
            return np.array([k * g for k in rng])
        g1, g2 = np.array(self.gens[0]), np.array(self.gens[1])
        return np.array([a * g1 + b * g2 for a in rng for b in rng])


def lattice_from_exact(rows, surd: int) -> Lattice2:
    basis = ExactBasis(
        rows=tuple(tuple(Fraction(c) for c in row) for row in rows), surd=surd
    )
    return Lattice2(rank=2, gens=basis.float_rows(), exact=basis)


def lagrange_gauss(u, v):
    """Reduced basis of the lattice spanned by u, v (shortest vector first)."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    while True:
        if u @ u > v @ v:
            u, v = v, u
        mu = round((u @ v) / (u @ u))
        w = v - mu * u
        if w @ w >= u @ u:
            return u, w
        v = w


def _canonical_sign(v):
    if v[0] < 0 or (v[0] == 0 and v[1] < 0):
        return -v
    return v


def _plain(v) -> tuple[float, float]:
    return (float(v[0]) + 0.0, float(v[1]) + 0.0)


def _reduced_pair(u, v):
    u, v = lagrange_gauss(u, v)
    u, v = _canonical_sign(u), _canonical_sign(v)
    if (u @ u, u[0], u[1]) > (v @ v, v[0], v[1]):
        u, v = v, u
    return _plain(u), _plain(v)


def same_lattice(gens_a, gens_b, tol: float = 1e-9) -> bool:
    """Do two rank-2 bases generate the same subgroup (unimodular change)?"""
    a = np.asarray(gens_a, dtype=float)
    b = np.asarray(gens_b, dtype=float)
    try:
        c = b @ np.linalg.inv(a)
        d = a @ np.linalg.inv(b)
    except np.linalg.LinAlgError:
        return False
    for m in (c, d):
        if np.max(np.abs(m - np.round(m))) > tol:
            return False
    return abs(abs(np.linalg.det(c)) - 1.0) <= 1e-6


# ---------------------------------------------------------------------------
# period lattice of an immersion


def period_lattice(im: Immersion, search_bound: float) -> Lattice2:
    """Solve <w_i, z> = 0 (mod 2 pi) for every frequency wave vector.

    Enumerates integer right-hand sides for the two best-conditioned
    congruences, filters the rest, and certifies each period by direct
    evaluation (|psi(z) - psi(0)| <= 1e-9). search_bound truncates the
    reported window; the basis is Lagrange-Gauss reduced.
    """
    if search_bound <= 0:
        raise DomainError("search_bound must be positive")
    if im.m != 1 or abs(im.data.mu[0] - 1.0) > 1e-12:
        raise ValueError("period_lattice requires canonical data (m = 1, mu_1 = 1)")
    v_rows = im.wave_vectors / (2.0 * math.pi)
    n_rows = len(v_rows)
    best, pair = -1.0, None
    for i in range(n_rows):
        for j in range(i + 1, n_rows):
            d = abs(v_rows[i, 0] * v_rows[j, 1] - v_rows[i, 1] * v_rows[j, 0])
            if d > best:
                best, pair = d, (i, j)
    if best <= 1e-12:
        raise ValueError("frequency wave vectors do not span the plane")
    i, j = pair
    m2 = np.linalg.inv(np.array([v_rows[i], v_rows[j]]))
    others = [l for l in range(n_rows) if l not in (i, j)]
    psi0 = im.eval(np.zeros(2))

    ki_max = int(math.ceil(np.linalg.norm(v_rows[i]) * search_bound)) + 1
    kj_max = int(math.ceil(np.linalg.norm(v_rows[j]) * search_bound)) + 1
    sols = []
    for ki in range(-ki_max, ki_max + 1):
        for kj in range(-kj_max, kj_max + 1):
            if ki == 0 and kj == 0:
                continue
            z = m2 @ np.array([ki, kj], dtype=float)
            if z @ z > search_bound**2:
                continue
            ok = True
            for l in others:
                phase = float(v_rows[l] @ z)
                if abs(phase - round(phase)) > 1e-10 * max(1.0, abs(phase)):
                    ok = False
                    break
            if ok and np.max(np.abs(im.eval(z) - psi0)) <= 1e-9:
                sols.append(z)
    if not sols:
        return Lattice2(rank=0, gens=())
    sols.sort(key=lambda z: (z @ z, z[0], z[1]))
    v1 = sols[0]
    n1 = v1 @ v1
    area = []
    for z in sols:
        d = abs(v1[0] * z[1] - v1[1] * z[0])
        if d > 1e-9 * math.sqrt(n1 * (z @ z)):
            area.append((d, z @ z, tuple(z)))
    if not area:
        for z in sols:
            k = (z @ v1) / n1
            if abs(k - round(k)) > 1e-6:
                raise RuntimeError("period set is not generated by its shortest vector")
        return Lattice2(rank=1, gens=(_plain(_canonical_sign(v1)),))
    area.sort()
    v2 = np.array(area[0][2])
    u, w = _reduced_pair(v1, v2)
    basis = np.array([u, w])
    inv = np.linalg.inv(basis)
    for z in sols:
        c = z @ inv
        if np.max(np.abs(c - np.round(c))) > 1e-6:
            raise RuntimeError("period basis does not generate all found periods")
    return Lattice2(rank=2, gens=(u, w))


# ---------------------------------------------------------------------------
# periodic directions at fixed integer pair (K0, K1)


@dataclass(frozen=True)
class PeriodicDirection:
    rho: float
    k2: int
    v: tuple[float, float]


def direction_integrality(h: float, k0: int, k1: int, rho: float) -> float:
    """The quantity that must be an integer for (k0, k1) to close up at rho."""
    lam1, lam2 = 2.0 * (1.0 - h), 2.0 * (1.0 + h)
    ratio = math.sqrt(lam2 / lam1)
    rt = rho_tilde_of(h, rho)
    return (math.sin(rt) / math.sin(rho)) * (k1 - ratio * k0 * math.cos(rho)) + ratio * k0 * math.cos(rt)


def closing_ratios(h: float, s: float) -> tuple[float, float]:
    """Coefficients (A, B) with A k0 + B k1 = the closing quantity.

    Closed forms in the weight s: A = sqrt(h / ((1-s)(s-(1-s)h))) > 0 and
    B = -sqrt(s(1-s-hs) / ((1-s)(s-(1-s)h))) < 0. Double periodicity needs
    both rational, i.e. 1/A^2 and B^2/A^2 rational squares.
    """
    lo, hi = h / (1.0 + h), 1.0 / (1.0 + h)
    if not (lo < s < hi):
        raise DomainError("s must lie strictly inside (h/(1+h), 1/(1+h))")
    den = (1.0 - s) * (s - (1.0 - s) * h)
    return math.sqrt(h / den), -math.sqrt(s * (1.0 - s - h * s) / den)


def period_vector(h: float, k0: int, k1: int, rho: float) -> tuple[float, float]:
    lam1, lam2 = 2.0 * (1.0 - h), 2.0 * (1.0 + h)
    tx = (2.0 * math.pi / math.sin(rho)) * (k1 / math.sqrt(lam2) - k0 * math.cos(rho) / math.sqrt(lam1))
    return (tx, 2.0 * math.pi * k0 / math.sqrt(lam1))


def periodic_direction_search(
    h: float,
    k0: int,
    k1: int,
    window: tuple[float, float],
    grid: int = 4096,
) -> list[PeriodicDirection]:
    """All rho in the window where the closing quantity hits an integer.

    Scans a grid, brackets each integer crossing, bisects to 1e-12, and keeps
    only roots whose period vector returns psi to psi(0) within 1e-8.
    """
    lam1, lam2 = 2.0 * (1.0 - h), 2.0 * (1.0 + h)
    ratio = math.sqrt(lam2 / lam1)
    if abs(k1 - ratio * k0) <= 1e-12:
        raise DomainError(
            "degenerate pair: requires |K1 - sqrt(lambda2/lambda1) K0| > 0"
        )
    lo, hi = window
    if not (0.0 < lo < hi < math.pi / 2):
        raise DomainError("window must be contained in (0, pi/2)")

    f = lambda rho: direction_integrality(h, k0, k1, rho)
    xs = np.linspace(lo, hi, grid)
    fs = [f(x) for x in xs]
    roots = []
    for idx in range(grid - 1):
        fa, fb = fs[idx], fs[idx + 1]
        k_lo, k_hi = math.ceil(min(fa, fb)), math.floor(max(fa, fb))
        for k in range(k_lo, k_hi + 1):
            a, b = xs[idx], xs[idx + 1]
            ga, gb = fa - k, fb - k
            if ga == 0.0:
                roots.append((a, k))
                continue
            if ga * gb > 0:
                continue
            for _ in range(80):
                mid = 0.5 * (a + b)
                gm = f(mid) - k
                if gm == 0.0 or b - a < 1e-12:
                    break
                if ga * gm < 0:
                    b = mid
                else:
                    a, ga = mid, gm
            roots.append((0.5 * (a + b), k))
    out = []
    seen = []
    for rho, k in sorted(roots):
        if any(abs(rho - r) < 1e-10 for r in seen):
            continue
        seen.append(rho)
        v = period_vector(h, k0, k1, rho)
        im = build(angle_family_data(h, rho))
        res = float(np.max(np.abs(im.eval(np.array(v)) - im.eval(np.zeros(2)))))
        if res <= 1e-8:
            out.append(PeriodicDirection(rho=rho, k2=k, v=v))
    return out


# ---------------------------------------------------------------------------
# torus constructions (exact)


@dataclass(frozen=True)
class TorusParams:
    """Exact rational data (a, b) = (p^2/q^2, r^2/t^2) and the derived mean
    curvature h = (1-(a-b)^2)/(1+(a-b)^2+2(a+b)), with s = (1+a-b)/2."""

    a: Fraction
    b: Fraction
    p: int
    q: int
    r: int
    t: int
    h: Fraction
    s: Fraction

    def __post_init__(self):
        if (self.a - self.b) ** 2 >= 1:
            raise DomainError("(a-b)^2 must be < 1")
        expect = (1 - (self.a - self.b) ** 2) / (1 + (self.a - self.b) ** 2 + 2 * (self.a + self.b))
        if self.h != expect or not (0 < self.h < 1):
            raise ValueError("inconsistent torus parameters")


@dataclass(frozen=True)
class CaseIResult:
    h: Fraction
    q: Fraction
    lattice: Lattice2


@dataclass(frozen=True)
class CaseIIResult:
    params: TorusParams
    v1: tuple[float, float]
    v2: tuple[float, float]
    rho: float
    lattice_condition: str
    sublattice: tuple[tuple[float, float], tuple[float, float]]
    lattice: Lattice2

    def member_condition(self, k0: int, k1: int) -> bool:
        """Is k1*v1 + k0*v2 a period? Exact integer congruence."""
        p, q, r, t = self.params.p, self.params.q, self.params.r, self.params.t
        return (k0 * q * t - k1 * q * r) % (p * t) == 0


def torus_case_i(q) -> CaseIResult:
    """Mean curvature h = (q^2-1)/(q^2+1) for rational q > 1, with the exact
    rank-2 period lattice of the rho = 0 member."""
    q = Fraction(q)
    if q <= 1:
        raise DomainError("q must be a rational strictly greater than 1")
    h = (q**2 - 1) / (q**2 + 1)
    num, den = q.numerator, q.denominator
    big = num * num + den * den
    s, d = squarefree_decompose(big)
    # v1 = (2 pi / sqrt(lambda2), 0), y-generator den * (0, 2 pi / sqrt(lambda1))
    rows = ((Fraction(s, num), Fraction(0)), (Fraction(0), Fraction(s)))
    return CaseIResult(h=h, q=q, lattice=lattice_from_exact(rows, d))


def _kernel_basis(alpha: int, beta: int, mod: int) -> tuple[tuple[int, int], tuple[int, int]]:
    """Basis of {(m, n) : alpha m + beta n = 0 (mod mod)}."""
    d = math.gcd(alpha, mod)
    n1 = d // math.gcd(beta, d)
    rhs = (-beta * n1) % mod
    # both sides divisible by d; invert alpha/d modulo mod/d
    a_red, m_red, r_red = alpha // d, mod // d, rhs // d
    if m_red == 1:
        m1 = 0
    else:
        m1 = (pow(a_red, -1, m_red) * r_red) % m_red
    return (mod // d, 0), (m1, n1)


def torus_case_ii(p: int, q: int, r: int, t: int) -> CaseIIResult:
    """Torus member for a = p^2/q^2, b = r^2/t^2 with exact h and the closed
    generator vectors; the full period lattice follows from the integer
    congruence m q/p - n q r/(p t) in Z."""
    if min(p, q, r, t) < 1:
        raise DomainError("p, q, r, t must be positive integers")
    a = Fraction(p * p, q * q)
    b = Fraction(r * r, t * t)
    if (a - b) ** 2 >= 1:
        raise DomainError("(a-b)^2 must be < 1, got a=%s b=%s" % (a, b))
    h = (1 - (a - b) ** 2) / (1 + (a - b) ** 2 + 2 * (a + b))
    s = (1 + a - b) / 2
    e = (a - b) ** 2 + a + b
    f_ = (a - b) ** 2 + 2 * (a + b) + 1
    v1 = (math.pi * math.sqrt(float(e / a)), 0.0)
    v2 = (
        -math.pi * math.sqrt(float(b / a)) * float(1 - (a - b)) / math.sqrt(float(e)),
        math.pi * math.sqrt(float(f_ / e)),
    )
    rho = 2.0 * math.atan(t_of_s(float(h), float(s)))
    cond = "m*%d/%d - n*%d/%d in Z" % (q, p, q * r, p * t)
    sub = (
        (p * v2[0], p * v2[1]),
        (p * t * v1[0], p * t * v1[1]),
    )
    (m_a, n_a), (m_b, n_b) = _kernel_basis(q * t, -q * r, p * t)
    w1 = np.array([m_a * v2[0] + n_a * v1[0], m_a * v2[1] + n_a * v1[1]])
    w2 = np.array([m_b * v2[0] + n_b * v1[0], m_b * v2[1] + n_b * v1[1]])
    g1, g2 = _reduced_pair(w1, w2)
    return CaseIIResult(
        params=TorusParams(a=a, b=b, p=p, q=q, r=r, t=t, h=h, s=s),
        v1=v1,
        v2=v2,
        rho=rho,
        lattice_condition=cond,
        sublattice=sub,
        lattice=Lattice2(rank=2, gens=(g1, g2)),
    )


@dataclass(frozen=True)
class TorusVerdict:
    """Outcome of the torus-existence decision for a rational h.

    kind is "case_i", "case_ii" or "not_found"; not_found means no witness
    within the search bound, never proven nonexistence.
    """

    h: Fraction
    kind: str
    q: Optional[Fraction] = None
    pqrt: Optional[tuple[int, int, int, int]] = None
    case_i: Optional[CaseIResult] = None
    case_ii: Optional[CaseIIResult] = None

    @property
    def generators(self) -> tuple[tuple[float, float], ...]:
        if self.kind == "case_i":
            return self.case_i.lattice.gens
        if self.kind == "case_ii":
            return self.case_ii.lattice.gens
        return ()

    def to_dict(self) -> dict:
        out = {"h": "%d/%d" % (self.h.numerator, self.h.denominator), "verdict": self.kind}
        if self.kind == "case_i":
            out["witness"] = {"q": "%d/%d" % (self.q.numerator, self.q.denominator)}
        elif self.kind == "case_ii":
            out["witness"] = {"p": self.pqrt[0], "q": self.pqrt[1], "r": self.pqrt[2], "t": self.pqrt[3]}
            out["witness"]["condition"] = self.case_ii.lattice_condition
        else:
            out["witness"] = None
        out["generators"] = [list(g) for g in self.generators]
        return out


def torus_exists(h, search_bound: int = 20) -> TorusVerdict:
    """Decide torus existence at exact rational mean curvature h.

    Case i is decided exactly via the rational square test on (1+h)/(1-h);
    case ii by exhaustive search over p, q, r, t <= search_bound
    (lexicographically smallest witness wins).
    """
    h = Fraction(h)
    if not (0 < h < 1):
        raise DomainError("h must be a rational in (0,1), got %s" % h)
    root = rational_sqrt_exact((1 + h) / (1 - h))
    if root is not None:
        return TorusVerdict(h=h, kind="case_i", q=root, case_i=torus_case_i(root))
    squares = {}
    for u in range(1, search_bound + 1):
        for w in range(1, search_bound + 1):
            squares.setdefault((u, w), Fraction(u * u, w * w))
    for p in range(1, search_bound + 1):
        for q in range(1, search_bound + 1):
            a = squares[(p, q)]
            for r in range(1, search_bound + 1):
                for t in range(1, search_bound + 1):
                    b = squares[(r, t)]
                    if (a - b) ** 2 >= 1:
                        continue
                    if h == (1 - (a - b) ** 2) / (1 + (a - b) ** 2 + 2 * (a + b)):
                        return TorusVerdict(
                            h=h,
                            kind="case_ii",
                            pqrt=(p, q, r, t),
                            case_ii=torus_case_ii(p, q, r, t),
                        )
    return TorusVerdict(h=h, kind="not_found")
