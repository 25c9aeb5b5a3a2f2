"""Torus admissibility: for a flat torus R^2/Lambda and rational mean
curvature h, decide whether an immersion with that mean curvature exists, and
construct witness weights when it does.

The decision path is exact: dual-lattice points on the two relevant circles
are enumerated with a rational quadratic form, their complex squares are
rational, and all hull / intersection predicates run on Fractions. Floats
appear only in emitted vectors and the reconstructed witness data.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .core import DomainError, ExactnessError, squarefree_decompose
from .parameters import MiyataData, canonicalize, validate_miyata
from .periodicity import ExactBasis, Lattice2

Point = tuple[Fraction, Fraction]

VERDICT_EXISTS_PU = "exists_pseudo_umbilical"
VERDICT_EXISTS = "exists"
VERDICT_NONE_EMPTY = "none_empty_circle"
VERDICT_NONE_HULL = "none_hull"
VERDICT_NONE_INFEASIBLE = "none_infeasible"
VERDICT_UNDECIDED = "undecided"


# ---------------------------------------------------------------------------
# exact lattice input


_ENTRY_RE = re.compile(
    r"^(?P<sign>[+-])?(?:(?P<int>\d+)\*?)?pi(?:\*?sqrt\((?P<surd>\d+)\))?(?:/(?P<den>\d+))?$"
)


def parse_lattice_entry(text: str) -> tuple[Fraction, int]:
    """Parse one generator coordinate of the form [int*]pi[*sqrt(d)][/int].

    Returns (c, d) meaning c * pi * sqrt(d) with d squarefree; "0" gives
    (0, 1).
    """
    s = text.replace(" ", "")
    if s in ("0", "+0", "-0"):
        return Fraction(0), 1
    m = _ENTRY_RE.match(s)
    if not m:
        raise ValueError(
            "cannot parse lattice entry %r (expected [int*]pi[*sqrt(int)][/int] or 0)" % text
        )
    c = Fraction(int(m.group("int") or 1), int(m.group("den") or 1))
    if m.group("sign") == "-":
        c = -c
    d = int(m.group("surd") or 1)
    if d <= 0:
        raise ValueError("sqrt argument must be positive in %r" % text)
    sq, d0 = squarefree_decompose(d)
    return c * sq, d0


def parse_lattice(obj) -> Lattice2:
    """Exact rank-2 lattice from {"gens": [[e, e], [e, e]]} entry strings.

    All nonzero entries must share one squarefree surd; mixed surds make the
    squared dual points irrational and are rejected.
    """
    if isinstance(obj, Lattice2):
        return obj
    try:
        rows_txt = obj["gens"]
        entries = [[parse_lattice_entry(rows_txt[i][j]) for j in range(2)] for i in range(2)]
    except (KeyError, IndexError, TypeError) as exc:
        raise ValueError("lattice input must be {'gens': [[a,b],[c,d]]}") from exc
    surds = {d for row in entries for (c, d) in row if c != 0}
    if len(surds) > 1:
        raise ExactnessError(
            "mixed surds %s in lattice generators: exact dual squares unavailable" % sorted(surds)
        )
    surd = surds.pop() if surds else 1
    rows = tuple(tuple(c for (c, _) in row) for row in entries)
    det = rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    if det == 0:
        raise ValueError("lattice generators are linearly dependent")
    basis = ExactBasis(rows=rows, surd=surd)
    return Lattice2(rank=2, gens=basis.float_rows(), exact=basis)


def scaled_square_lattice(coeff, surd: int = 1) -> Lattice2:
    """Convenience: (coeff * pi * sqrt(surd)) Z^2."""
    c = Fraction(coeff)
    return parse_lattice_from_exact(((c, Fraction(0)), (Fraction(0), c)), surd)


def parse_lattice_from_exact(rows, surd: int) -> Lattice2:
    s, d0 = squarefree_decompose(surd)
    rows = tuple(tuple(Fraction(c) * s for c in row) for row in rows)
    basis = ExactBasis(rows=rows, surd=d0)
    return Lattice2(rank=2, gens=basis.float_rows(), exact=basis)


def unimodular_image(lat: Lattice2, u) -> Lattice2:
    """Same lattice in the basis U @ C (U integer, |det U| = 1)."""
    if lat.exact is None:
        raise ExactnessError("unimodular_image needs exact generator data")
    (a, b), (c, d) = u
    if abs(a * d - b * c) != 1:
        raise ValueError("matrix is not unimodular")
    r = lat.exact.rows
    rows = (
        (a * r[0][0] + b * r[1][0], a * r[0][1] + b * r[1][1]),
        (c * r[0][0] + d * r[1][0], c * r[0][1] + d * r[1][1]),
    )
    basis = ExactBasis(rows=rows, surd=lat.exact.surd)
    return Lattice2(rank=2, gens=basis.float_rows(), exact=basis)


# ---------------------------------------------------------------------------
# dual lattice and circle points


@dataclass(frozen=True)
class DualLattice:
    """Dual basis w_i with <w_i, g_j> = 2 pi delta_ij.

    w_i = rows[i] / sqrt(surd) with rational rows, so the Gram form and all
    complex squares of dual vectors are exactly rational.
    """

    gens: tuple[tuple[float, float], tuple[float, float]]
    rows: tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]
    surd: int
    gram: tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]

    def vector(self, m: int, n: int) -> np.ndarray:
        return m * np.array(self.gens[0]) + n * np.array(self.gens[1])


def dual_lattice(lat: Lattice2) -> DualLattice:
    """2 pi inverse-transpose of the primal basis, carried exactly."""
    if lat.rank != 2:
        raise DomainError("dual lattice requires a rank-2 lattice")
    if lat.exact is None:
        raise ExactnessError("dual lattice requires exact generator data")
    (a, b), (c, d) = lat.exact.rows
    det = a * d - b * c
    # primal rows are pi sqrt(s) * C; dual rows are (2 / sqrt(s)) * inv(C)^T
    rows = ((2 * d / det, -2 * c / det), (-2 * b / det, 2 * a / det))
    s = lat.exact.surd
    scale = 1.0 / math.sqrt(s)
    gens = tuple(tuple(scale * float(x) for x in row) for row in rows)

    def q(i, j):
        return (rows[i][0] * rows[j][0] + rows[i][1] * rows[j][1]) / s

    gram = ((q(0, 0), q(0, 1)), (q(1, 0), q(1, 1)))
    for i in range(2):
        for j in range(2):
            pairing = gens[i][0] * lat.gens[j][0] + gens[i][1] * lat.gens[j][1]
            target = 2.0 * math.pi if i == j else 0.0
            if abs(pairing - target) > 1e-9:
                raise RuntimeError("dual basis failed the pairing check")
    return DualLattice(gens=gens, rows=rows, surd=s, gram=gram)


@dataclass(frozen=True)
class CircleSquareSet:
    """Squares w^2 of dual vectors w of a fixed squared length.

    preimages lists every dual coordinate pair on the circle (they come in
    +- pairs); points holds the deduplicated squares with one representative
    preimage each, sorted by exact coordinates.
    """

    radius_sq: Fraction
    points: tuple[complex, ...]
    points_exact: tuple[Point, ...]
    reps: tuple[tuple[int, int], ...]
    preimages: tuple[tuple[int, int], ...]
    dual: DualLattice


def circle_points(dual: DualLattice, radius_sq) -> CircleSquareSet:
    """Enumerate {w in dual : |w|^2 = radius_sq} exactly and square them.

    The Gram form is positive definite, so coordinates lie in an explicit
    box; w and -w collapse to the same square.
    """
    radius_sq = Fraction(radius_sq)
    if radius_sq <= 0:
        raise DomainError("radius_sq must be positive")
    (qa, qb), (_, qc) = dual.gram
    det = qa * qc - qb * qb
    if det <= 0:
        raise ValueError("dual Gram form is not positive definite")
    m_max = int(math.isqrt(int(radius_sq * qc / det))) + 1
    n_max = int(math.isqrt(int(radius_sq * qa / det))) + 1
    pre = []
    squares: dict[Point, tuple[int, int]] = {}
    r0, r1 = dual.rows
    for m in range(-m_max, m_max + 1):
        for n in range(-n_max, n_max + 1):
            if (m, n) == (0, 0):
                continue
            if qa * m * m + 2 * qb * m * n + qc * n * n != radius_sq:
                continue
            pre.append((m, n))
            u = m * r0[0] + n * r1[0]
            v = m * r0[1] + n * r1[1]
            sq = ((u * u - v * v) / dual.surd, 2 * u * v / dual.surd)
            if sq not in squares:
                squares[sq] = (m, n)
    order = sorted(squares.keys())
    return CircleSquareSet(
        radius_sq=radius_sq,
        points=tuple(complex(float(x), float(y)) for x, y in order),
        points_exact=tuple(order),
        reps=tuple(squares[p] for p in order),
        preimages=tuple(sorted(pre)),
        dual=dual,
    )


# ---------------------------------------------------------------------------
# exact 2D convex geometry


def _cross(o: Point, a: Point, b: Point) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points) -> list[Point]:
    """Counter-clockwise hull vertices (monotone chain, exact arithmetic).

    Degenerate inputs give a single point or the two segment endpoints.
    """
    pts = sorted(set(points))
    if len(pts) <= 1:
        return pts
    lower: list[Point] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[Point] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) == 2 and hull[0] == hull[1]:
        return hull[:1]
    return hull


def point_in_hull(pt: Point, hull) -> bool:
    """Membership in a hull of any dimension (point, segment or polygon)."""
    k = len(hull)
    if k == 0:
        return False
    if k == 1:
        return pt == hull[0]
    if k == 2:
        a, b = hull
        if _cross(a, b, pt) != 0:
            return False
        lo = (a[0] - pt[0]) * (b[0] - pt[0]) + (a[1] - pt[1]) * (b[1] - pt[1])
        return lo <= 0
    for i in range(k):
        if _cross(hull[i], hull[(i + 1) % k], pt) < 0:
            return False
    return True


def _clip_polygon(poly: list[Point], a: Point, b: Point) -> list[Point]:
    """Keep the part of poly on the left of the directed line a -> b."""
    out: list[Point] = []
    k = len(poly)
    for i in range(k):
        p, q = poly[i], poly[(i + 1) % k]
        sp, sq = _cross(a, b, p), _cross(a, b, q)
        if sp >= 0:
            out.append(p)
        if (sp > 0 > sq) or (sp < 0 < sq):
            t = sp / (sp - sq)
            out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    dedup: list[Point] = []
    for p in out:
        if not dedup or dedup[-1] != p:
            dedup.append(p)
    if len(dedup) > 1 and dedup[0] == dedup[-1]:
        dedup.pop()
    return dedup


def _clip_segment(seg: tuple[Point, Point], hull) -> list[Point]:
    """Intersection of a segment with a convex hull (exact parameter range)."""
    (ax, ay), (bx, by) = seg
    dx, dy = bx - ax, by - ay
    lo, hi = Fraction(0), Fraction(1)
    k = len(hull)
    if k == 1:
        return [hull[0]] if point_in_hull(hull[0], list(seg)) else []
    if k == 2:
        c, d = hull
        # segment-segment: either collinear overlap or a proper crossing
        if _cross(c, d, seg[0]) == 0 and _cross(c, d, seg[1]) == 0:
            cand = [p for p in (seg[0], seg[1], c, d) if point_in_hull(p, list(seg)) and point_in_hull(p, [c, d])]
            return sorted(set(cand))
        den = (bx - ax) * (d[1] - c[1]) - (by - ay) * (d[0] - c[0])
        if den == 0:
            return []
        t = ((c[0] - ax) * (d[1] - c[1]) - (c[1] - ay) * (d[0] - c[0])) / den
        if not (0 <= t <= 1):
            return []
        px, py = ax + t * dx, ay + t * dy
        return [(px, py)] if point_in_hull((px, py), [c, d]) else []
    for i in range(k):
        a2, b2 = hull[i], hull[(i + 1) % k]
        ea = _cross(a2, b2, seg[0])
        eb = _cross(a2, b2, seg[1])
        if ea < 0 and eb < 0:
            return []
        if ea < 0 or eb < 0:
            t = ea / (ea - eb)
            if ea < 0:
                lo = max(lo, t)
            else:
                hi = min(hi, t)
    if lo > hi:
        return []
    p1 = (ax + lo * dx, ay + lo * dy)
    p2 = (ax + hi * dx, ay + hi * dy)
    return [p1] if p1 == p2 else [p1, p2]


def intersect_hulls(h1, h2) -> list[Point]:
    """Vertices of the intersection of two convex hulls (exact; any dims)."""
    if not h1 or not h2:
        return []
    if len(h1) > len(h2):
        h1, h2 = h2, h1
    if len(h1) == 1:
        return [h1[0]] if point_in_hull(h1[0], h2) else []
    if len(h1) == 2:
        return _clip_segment((h1[0], h1[1]), h2)
    if len(h2) == 2:
        return _clip_segment((h2[0], h2[1]), h1)
    poly = list(h1)
    for i in range(len(h2)):
        poly = _clip_polygon(poly, h2[i], h2[(i + 1) % len(h2)])
        if not poly:
            return []
    return poly


def _combination_over_hull(target: Point, hull) -> list[tuple[Point, Fraction]]:
    """Write target as a convex combination of hull vertices, exactly.

    Weights are strictly positive on the minimal face containing the target
    (all vertices when it lies in the interior).
    """
    k = len(hull)
    if k == 1:
        if target != hull[0]:
            raise ValueError("target is not the hull point")
        return [(hull[0], Fraction(1))]
    if k == 2:
        a, b = hull
        dx, dy = b[0] - a[0], b[1] - a[1]
        u = ((target[0] - a[0]) * dx + (target[1] - a[1]) * dy) / (dx * dx + dy * dy)
        if _cross(a, b, target) != 0 or not (0 <= u <= 1):
            raise ValueError("target is not on the hull segment")
        return [(a, 1 - u), (b, u)]
    n = Fraction(len(hull))
    cx = sum(p[0] for p in hull) / n
    cy = sum(p[1] for p in hull) / n
    if (cx, cy) == target:
        return [(p, 1 / n) for p in hull]
    dx, dy = target[0] - cx, target[1] - cy
    best = None
    for i in range(k):
        a, b = hull[i], hull[(i + 1) % k]
        ex, ey = b[0] - a[0], b[1] - a[1]
        rx, ry = a[0] - cx, a[1] - cy
        den = ex * dy - dx * ey
        if den == 0:
            continue
        # centroid + t*(target-centroid) = a + u*(b-a)
        t = (ex * ry - ey * rx) / den
        u = (dx * ry - dy * rx) / den
        if t <= 0 or not (0 <= u <= 1):
            continue
        if best is None or t < best[0]:
            best = (t, i, u)
    if best is None or best[0] < 1:
        raise ValueError("target lies outside the hull")
    t, i, u = best
    lam = 1 / t  # target = (1 - lam) * centroid + lam * boundary point
    weights = {p: (1 - lam) / n for p in hull}
    a, b = hull[i], hull[(i + 1) % k]
    weights[a] += lam * (1 - u)
    weights[b] += lam * u
    return [(p, w) for p, w in weights.items() if w != 0]


def witness_weights(
    set_a: CircleSquareSet, set_g: CircleSquareSet
) -> Optional[tuple[list[Fraction], list[Fraction]]]:
    """Positive block weights with sum(alpha_k R_k) + sum(gamma_j R'_j) = 0.

    Feasible iff conv(A) meets -conv(G); the meeting point is split
    barycentrically over each hull. Returned lists align with the point order
    of each set; a zero entry means that point is unused (dropped downstream).
    """
    if not set_a.points_exact or not set_g.points_exact:
        return None
    hull_a = convex_hull(set_a.points_exact)
    hull_ng = convex_hull([(-x, -y) for x, y in set_g.points_exact])
    region = intersect_hulls(hull_a, hull_ng)
    if not region:
        return None
    n = Fraction(len(region))
    target = (sum(p[0] for p in region) / n, sum(p[1] for p in region) / n)
    wa = {p: w for p, w in _combination_over_hull(target, hull_a)}
    neg_target = (-target[0], -target[1])
    hull_g = convex_hull(set_g.points_exact)
    wg = {p: w for p, w in _combination_over_hull(neg_target, hull_g)}
    ra = [wa.get(p, Fraction(0)) for p in set_a.points_exact]
    rg = [wg.get(p, Fraction(0)) for p in set_g.points_exact]
    return ra, rg


# ---------------------------------------------------------------------------
# the admissibility decision


@dataclass(frozen=True)
class AdmissibleResult:
    verdict: str
    h: Fraction
    set_a: Optional[CircleSquareSet]
    set_g: Optional[CircleSquareSet]
    weights: Optional[tuple[list[Fraction], list[Fraction]]] = None
    witness: Optional[MiyataData] = None

    @property
    def exists(self) -> bool:
        return self.verdict in (VERDICT_EXISTS, VERDICT_EXISTS_PU)

    def to_dict(self) -> dict:
        out = {
            "h": "%d/%d" % (self.h.numerator, self.h.denominator),
            "verdict": self.verdict,
        }
        if self.set_a is not None:
            out["circle_counts"] = [len(self.set_a.points), len(self.set_g.points)]
        if self.witness is not None:
            out["m"] = self.witness.m
            out["mp"] = self.witness.mp
            out["witness"] = self.witness.to_dict()
        return out


def _recover_frequency(dual: DualLattice, rep: tuple[int, int], lam: float) -> complex:
    w = dual.vector(*rep)
    wc = complex(w[0], w[1])
    return (wc / complex(0.0, math.sqrt(lam))).conjugate()


def _build_witness(h: Fraction, set_a, set_g, weights) -> Optional[MiyataData]:
    ra, rg = weights
    lam1, lam2 = 2.0 * (1.0 - float(h)), 2.0 * (1.0 + float(h))
    mu, r_w = [], []
    for k, w in enumerate(ra):
        if w != 0:
            mu.append(_recover_frequency(set_a.dual, set_a.reps[k], lam1))
            r_w.append(float(w))
    eta, rp_w = [], []
    for j, w in enumerate(rg):
        if w != 0:
            eta.append(_recover_frequency(set_g.dual, set_g.reps[j], lam2))
            rp_w.append(float(w))
    data = MiyataData(
        h=float(h), mu=tuple(mu), eta=tuple(eta),
        r_weights=tuple(r_w), rp_weights=tuple(rp_w),
    )
    if data.m == 1:
        data = canonicalize(data)
    return data if validate_miyata(data).passed else None


def admissible(lat: Lattice2, h) -> AdmissibleResult:
    """Existence decision, strongest certificate first.

    Order: empty circle (nonexistence), origin in both hulls (existence,
    pseudo-umbilical), origin outside the joint hull (nonexistence), then the
    general exact feasibility conv(A) meet -conv(G) which settles the
    remaining cases either way.
    """
    h = Fraction(h)
    if not (0 < h < 1):
        raise DomainError("h must be a rational in (0,1), got %s" % h)
    dual = dual_lattice(lat)
    set_a = circle_points(dual, 2 * (1 - h))
    set_g = circle_points(dual, 2 * (1 + h))
    if not set_a.points_exact or not set_g.points_exact:
        return AdmissibleResult(VERDICT_NONE_EMPTY, h, set_a, set_g)
    origin = (Fraction(0), Fraction(0))
    hull_a = convex_hull(set_a.points_exact)
    hull_g = convex_hull(set_g.points_exact)
    if point_in_hull(origin, hull_a) and point_in_hull(origin, hull_g):
        wa = {p: w for p, w in _combination_over_hull(origin, hull_a)}
        wg = {p: w for p, w in _combination_over_hull(origin, hull_g)}
        weights = (
            [wa.get(p, Fraction(0)) for p in set_a.points_exact],
            [wg.get(p, Fraction(0)) for p in set_g.points_exact],
        )
        witness = _build_witness(h, set_a, set_g, weights)
        if witness is None:
            return AdmissibleResult(VERDICT_UNDECIDED, h, set_a, set_g, weights)
        return AdmissibleResult(VERDICT_EXISTS_PU, h, set_a, set_g, weights, witness)
    joint = convex_hull(list(set_a.points_exact) + list(set_g.points_exact))
    if not point_in_hull(origin, joint):
        return AdmissibleResult(VERDICT_NONE_HULL, h, set_a, set_g)
    weights = witness_weights(set_a, set_g)
    if weights is None:
        return AdmissibleResult(VERDICT_NONE_INFEASIBLE, h, set_a, set_g)
    witness = _build_witness(h, set_a, set_g, weights)
    if witness is None:
        return AdmissibleResult(VERDICT_UNDECIDED, h, set_a, set_g, weights)
    return AdmissibleResult(VERDICT_EXISTS, h, set_a, set_g, weights, witness)
