"""Differential-geometry verifier for sphere-valued immersions of the plane:
fundamental forms, mean and Gaussian curvature, pseudo-umbilicity, tension and
bitension fields, plus finite-difference cross-check oracles.

Conventions: the Laplacian on functions is -(d^2/dx^2 + d^2/dy^2), so
eigenblock checks read Delta psi_ti = lambda_i psi_ti. Tension and bitension
are those of the Riemannian immersion: all traces use the induced metric g,
so breaking the weight-balance condition (which destroys isometry) shows up
as a nonzero bitension. The frequency-table immersions have constant induced
metric, which keeps the covariant jet algebra closed-form. The bitension sign
combination (sum of second covariant derivatives of tau, traced with g^{ab})
+ 2 tau - g^{ab}<tau, dphi_b> dphi_a is the one under which the constructed
immersions are annihilated; the flipped curvature sign gives 4|tau|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import GEOMETRIC_TOL, Check, DomainError, VerificationReport
from .parameters import validate_miyata
from .immersion import Immersion

_JET2 = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]


def _dot(u, v):
    return np.sum(u * v, axis=-1)


def _sc(s, v):
    """Scalar field times vector field (broadcast over the ambient axis)."""
    return np.asarray(s)[..., None] * v


# ---------------------------------------------------------------------------
# tension / bitension from a table of ambient partials


def _inverse_metric(table):
    px, py = table[(1, 0)], table[(0, 1)]
    g00, g01, g11 = _dot(px, px), _dot(px, py), _dot(py, py)
    det = g00 * g11 - g01 * g01
    if np.any(det < 1e-12):
        raise DomainError("degenerate immersion: metric determinant below 1e-12")
    return g11 / det, -g01 / det, g00 / det


def _tension_jet(table, inv):
    """Partials up to order 2 of tau = g^{ab} psi_ab + 2 psi.

    Valid because the induced metric of a frequency-table immersion is
    constant in (x, y); g^{ab} g_ab = 2 supplies the psi coefficient exactly.
    """
    i00, i01, i11 = inv
    jet = {}
    for a, b in _JET2:
        jet[(a, b)] = (
            _sc(i00, table[(a + 2, b)])
            + _sc(2.0 * i01, table[(a + 1, b + 1)])
            + _sc(i11, table[(a, b + 2)])
            + 2.0 * table[(a, b)]
        )
    return jet


def _bitension_from_table(table):
    psi = table[(0, 0)]
    inv = _inverse_metric(table)
    i00, i01, i11 = inv
    tjet = _tension_jet(table, inv)
    tau = tjet[(0, 0)]
    rough = np.zeros_like(tau)
    pairs = (
        ((1, 0), (1, 0), i00),
        ((1, 0), (0, 1), i01),
        ((0, 1), (1, 0), i01),
        ((0, 1), (0, 1), i11),
    )
    for ea, eb, wt in pairs:
        pa = table[ea]
        tb = tjet[eb]
        tab = tjet[(ea[0] + eb[0], ea[1] + eb[1])]
        cb = _dot(tb, psi)
        # outer ambient derivative of the projected inner derivative, projected
        ue = tab - _sc(_dot(tab, psi) + _dot(tb, pa), psi) - _sc(cb, pa)
        rough = rough + _sc(wt, ue - _sc(_dot(ue, psi), psi))
    px, py = table[(1, 0)], table[(0, 1)]
    tx, ty = _dot(tau, px), _dot(tau, py)
    curv = _sc(i00 * tx + i01 * ty, px) + _sc(i01 * tx + i11 * ty, py)
    return rough + 2.0 * tau - curv


def tension(im: Immersion, p) -> np.ndarray:
    """tau = g^{ab} psi_ab + 2 psi (metric trace of the second fundamental
    form of the map into the sphere); equals 2H."""
    table = im.partial_table(p, 2)
    inv = _inverse_metric(table)
    return _tension_jet_order0(table, inv)


def _tension_jet_order0(table, inv):
    i00, i01, i11 = inv
    return (
        _sc(i00, table[(2, 0)])
        + _sc(2.0 * i01, table[(1, 1)])
        + _sc(i11, table[(0, 2)])
        + 2.0 * table[(0, 0)]
    )


def bitension(im: Immersion, p) -> np.ndarray:
    """Bitension field from exact order-<=4 partials; vanishes (to rounding)
    on every admissible construction and is order-one when the weight balance
    is broken."""
    return _bitension_from_table(im.partial_table(p, 4))


# ---------------------------------------------------------------------------
# finite-difference oracle

_STENCILS = {
    0: {0: 1.0},
    1: {-2: 1 / 12, -1: -8 / 12, 1: 8 / 12, 2: -1 / 12},
    2: {-2: -1 / 12, -1: 16 / 12, 0: -30 / 12, 1: 16 / 12, 2: -1 / 12},
    3: {-3: 1 / 8, -2: -1.0, -1: 13 / 8, 1: -13 / 8, 2: 1.0, 3: -1 / 8},
    4: {-3: -1 / 6, -2: 2.0, -1: -39 / 6, 0: 56 / 6, 1: -39 / 6, 2: 2.0, 3: -1 / 6},
}


def fd_partial_table(im, p, step: float, max_order: int = 4):
    """Partial-derivative table built only from point evaluations.

    Fourth-order central stencils, tensorized for mixed derivatives; the
    independent route against the closed-form partials.
    """
    p = np.asarray(p, dtype=float)
    grid = np.array([(i, j) for i in range(-3, 4) for j in range(-3, 4)], dtype=float)
    vals = im.eval(p[..., None, :] + step * grid)  # (..., 49, dim)
    table = {}
    for a in range(max_order + 1):
        for b in range(max_order + 1 - a):
            coeff = np.zeros(49)
            for i, ci in _STENCILS[a].items():
                for j, cj in _STENCILS[b].items():
                    coeff[(i + 3) * 7 + (j + 3)] = ci * cj
            table[(a, b)] = np.einsum("...sd,s->...d", vals, coeff) / step ** (a + b)
    return table


def fd_bitension_oracle(im, p, step: float) -> np.ndarray:
    """Bitension with every derivative taken by finite differences of eval.

    Agrees with the analytic route to O(step^4).
    """
    if not (1e-4 <= step <= 1e-1):
        raise DomainError("step must lie in [1e-4, 1e-1], got %r" % step)
    return _bitension_from_table(fd_partial_table(im, p, step, 4))


# ---------------------------------------------------------------------------
# fundamental forms and curvature


@dataclass(frozen=True, eq=False)
class FundamentalForms:
    """First form g and the three normal-valued second-form vectors."""

    g: np.ndarray  # (..., 2, 2)
    b_xx: np.ndarray
    b_xy: np.ndarray
    b_yy: np.ndarray


@dataclass(frozen=True, eq=False)
class CurvatureSummary:
    mean_curvature_norm: np.ndarray
    gaussian: np.ndarray
    pseudo_umbilical_residual: np.ndarray
    h_vector: np.ndarray


def _metric(table):
    px, py = table[(1, 0)], table[(0, 1)]
    g = np.stack(
        [
            np.stack([_dot(px, px), _dot(px, py)], axis=-1),
            np.stack([_dot(px, py), _dot(py, py)], axis=-1),
        ],
        axis=-2,
    )
    det = g[..., 0, 0] * g[..., 1, 1] - g[..., 0, 1] ** 2
    return g, det


def _forms_from_table(table):
    psi = table[(0, 0)]
    px, py = table[(1, 0)], table[(0, 1)]
    g, det = _metric(table)
    if np.any(det < 1e-12):
        raise DomainError("degenerate immersion: metric determinant below 1e-12")
    inv00 = g[..., 1, 1] / det
    inv01 = -g[..., 0, 1] / det
    inv11 = g[..., 0, 0] / det

    def normal_part(w):
        w = w - _sc(_dot(w, psi), psi)
        cx = _dot(w, px)
        cy = _dot(w, py)
        return w - _sc(inv00 * cx + inv01 * cy, px) - _sc(inv01 * cx + inv11 * cy, py)

    b_xx = normal_part(table[(2, 0)])
    b_xy = normal_part(table[(1, 1)])
    b_yy = normal_part(table[(0, 2)])
    return g, det, (inv00, inv01, inv11), b_xx, b_xy, b_yy


def fundamental_forms(im, p) -> FundamentalForms:
    """g from first partials; B_ab = psi_ab + psi corrections projected onto
    the normal space (orthogonal to psi, psi_x, psi_y)."""
    table = im.partial_table(p, 2)
    g, _, _, b_xx, b_xy, b_yy = _forms_from_table(table)
    return FundamentalForms(g=g, b_xx=b_xx, b_xy=b_xy, b_yy=b_yy)


def _curvature_from_table(table):
    g, det, inv, b_xx, b_xy, b_yy = _forms_from_table(table)
    inv00, inv01, inv11 = inv
    h_vec = 0.5 * (_sc(inv00, b_xx) + _sc(2.0 * inv01, b_xy) + _sc(inv11, b_yy))
    h_norm = np.sqrt(_dot(h_vec, h_vec))
    gauss = 1.0 + (_dot(b_xx, b_yy) - _dot(b_xy, b_xy)) / det
    h_sq = _dot(h_vec, h_vec)
    r_xx = np.abs(_dot(b_xx, h_vec) - h_sq * g[..., 0, 0])
    r_xy = np.abs(_dot(b_xy, h_vec) - h_sq * g[..., 0, 1])
    r_yy = np.abs(_dot(b_yy, h_vec) - h_sq * g[..., 1, 1])
    residual = np.maximum(np.maximum(r_xx, r_yy), r_xy)
    return CurvatureSummary(
        mean_curvature_norm=h_norm,
        gaussian=gauss,
        pseudo_umbilical_residual=residual,
        h_vector=h_vec,
    )


def mean_curvature(im, p) -> CurvatureSummary:
    """Mean curvature vector (metric trace of B over 2), Gauss-equation
    curvature for the unit-sphere ambient, and the pseudo-umbilicity residual
    max |<B_ab, H> - |H|^2 g_ab|."""
    return _curvature_from_table(im.partial_table(p, 2))


def gaussian_brioschi_fd(im, p, step: float = 1e-3) -> float:
    """Intrinsic Gaussian curvature from the metric alone (Brioschi formula),
    with metric derivatives by finite differences; oracle for the
    Gauss-equation route."""
    p = np.asarray(p, dtype=float)
    offs = np.arange(-2, 3)
    E = np.empty((5, 5))
    F = np.empty((5, 5))
    G = np.empty((5, 5))
    for i, oi in enumerate(offs):
        for j, oj in enumerate(offs):
            q = p + step * np.array([oi, oj], dtype=float)
            px = im.partial(q, (1, 0))
            py = im.partial(q, (0, 1))
            E[i, j] = float(_dot(px, px))
            F[i, j] = float(_dot(px, py))
            G[i, j] = float(_dot(py, py))
    d1 = np.array([1, -8, 0, 8, -1]) / (12 * step)
    d2 = np.array([-1, 16, -30, 16, -1]) / (12 * step**2)
    mid = np.array([0, 0, 1, 0, 0], dtype=float)

    def apply(m, cu, cv):
        return float(cu @ m @ cv)

    e, f, g = E[2, 2], F[2, 2], G[2, 2]
    e_u, e_v, e_vv = apply(E, d1, mid), apply(E, mid, d1), apply(E, mid, d2)
    g_u, g_v, g_uu = apply(G, d1, mid), apply(G, mid, d1), apply(G, d2, mid)
    f_u, f_v, f_uv = apply(F, d1, mid), apply(F, mid, d1), apply(F, d1, d1)
    m1 = np.array(
        [
            [-0.5 * e_vv + f_uv - 0.5 * g_uu, 0.5 * e_u, f_u - 0.5 * e_v],
            [f_v - 0.5 * g_u, e, f],
            [0.5 * g_v, f, g],
        ]
    )
    m2 = np.array([[0.0, 0.5 * e_v, 0.5 * g_u], [0.5 * e_v, e, f], [0.5 * g_u, f, g]])
    return float((np.linalg.det(m1) - np.linalg.det(m2)) / (e * g - f * f) ** 2)


# ---------------------------------------------------------------------------
# closed-form parameter checks


@dataclass(frozen=True)
class DiagonalSumResult:
    r1: float
    r2: float
    alpha_sq: float
    beta_sq: float
    h_norm_sq: float
    report: VerificationReport

    @property
    def h_norm(self) -> float:
        return math.sqrt(self.h_norm_sq)


def diagonal_sum_check(r1: float, m: int = 2) -> DiagonalSumResult:
    """Verify the diagonal-sum biharmonicity identities at radius r1.

    Solves 1/r1^2 + 1/r2^2 = 2, sets alpha^2 = 1/(2 r1^2), beta^2 = 1/(2 r2^2),
    checks alpha^2 + beta^2 = 1, alpha^2 r1^2 + beta^2 r2^2 = 1, and that the
    two diagonal components of the closed-form bitension coefficient
        m^2 [(alpha^2 u + beta^2 v) alpha + alpha u^2],  u = 1 - 1/r1^2,
        m^2 [(alpha^2 u + beta^2 v) beta + beta v^2],    v = 1 - 1/r2^2,
    vanish. Reports |H|^2 = 1 - 1/(r1^2 r2^2).
    """
    if m < 1:
        raise DomainError("m must be a positive integer")
    if r1 <= 1.0 / math.sqrt(2.0):
        raise DomainError("r1 must exceed 1/sqrt(2): no companion radius exists")
    if abs(r1 - 1.0) < 1e-12:
        raise DomainError("r1 = 1 gives r2 = r1 (harmonic, not proper)")
    inv_r2_sq = 2.0 - 1.0 / r1**2
    r2 = 1.0 / math.sqrt(inv_r2_sq)
    alpha_sq = 1.0 / (2.0 * r1**2)
    beta_sq = 0.5 * inv_r2_sq
    u = 1.0 - 1.0 / r1**2
    v = 1.0 - inv_r2_sq
    mix = alpha_sq * u + beta_sq * v
    coeff1 = m**2 * (mix + u * u) * math.sqrt(alpha_sq)
    coeff2 = m**2 * (mix + v * v) * math.sqrt(beta_sq)
    h_norm_sq = 1.0 - 1.0 / (r1**2 * r2**2)
    report = VerificationReport(
        (
            Check("alpha_beta_unit", abs(alpha_sq + beta_sq - 1.0), 1e-12),
            Check("immersion_constraint", abs(alpha_sq * r1**2 + beta_sq * r2**2 - 1.0), 1e-12),
            Check("tau2_coefficient_1", abs(coeff1), 1e-12),
            Check("tau2_coefficient_2", abs(coeff2), 1e-12),
        ),
        1,
    )
    return DiagonalSumResult(r1, r2, alpha_sq, beta_sq, h_norm_sq, report)


@dataclass(frozen=True)
class BoruvkaParams:
    n1: int
    n2: int
    q1: int
    q2: int
    alpha_sq: float
    beta_sq: float
    r1: float
    r2: float
    r: float
    h_norm: float


def boruvka_params(n1: int, n2: int) -> BoruvkaParams:
    """Diagonal-sum parameters for two degree-n minimal sphere immersions,
    q_i = n_i(n_i + 1)."""
    if n1 < 2 or n2 < 2:
        raise DomainError("degrees must be >= 2")
    if n1 == n2:
        raise DomainError("n1 = n2 is degenerate (harmonic, not proper)")
    q1 = n1 * (n1 + 1)
    q2 = n2 * (n2 + 1)
    tot = q1 + q2
    return BoruvkaParams(
        n1=n1,
        n2=n2,
        q1=q1,
        q2=q2,
        alpha_sq=q1 / tot,
        beta_sq=q2 / tot,
        r1=math.sqrt(tot / (2.0 * q1)),
        r2=math.sqrt(tot / (2.0 * q2)),
        r=0.5 * math.sqrt(tot),
        h_norm=abs(q1 - q2) / tot,
    )


# ---------------------------------------------------------------------------
# full verification suite


def _maxabs(x) -> float:
    return float(np.max(np.abs(x)))


def verify_immersion(
    im: Immersion,
    samples: int = 200,
    seed: int = 0,
    box: float = 6.0,
    tolerances: dict[str, float] | None = None,
) -> VerificationReport:
    """Run every geometric invariant at `samples` seeded random points.

    Tolerances per check: unit sphere 1e-12, flat identity metric 1e-10,
    form normality 1e-9, |H| = h 1e-9, K = 0 1e-8, spectral blocks 1e-10,
    eigenblocks 1e-10, bitension 1e-7; `tolerances` overrides them by check
    name. Includes the data-admissibility checks so a single report certifies
    one immersion.
    """
    data = im.data
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-box, box, size=(samples, 2))
    table = im.partial_table(pts, 4)
    psi = table[(0, 0)]
    px, py = table[(1, 0)], table[(0, 1)]
    h = data.h
    lam1, lam2 = data.lambda1, data.lambda2

    g, det = _metric(table)
    eye = np.zeros_like(g)
    eye[..., 0, 0] = 1.0
    eye[..., 1, 1] = 1.0

    _, _, inv, b_xx, b_xy, b_yy = _forms_from_table(table)
    curv = _curvature_from_table(table)
    t1, t2 = im.spectral_split(pts)
    lap_t1 = -(table[(2, 0)] + table[(0, 2)])[..., : 2 * im.m]
    lap_t2 = -(table[(2, 0)] + table[(0, 2)])[..., 2 * im.m :]
    tau = _tension_jet_order0(table, inv)
    tau2 = _bitension_from_table(table)

    normality = max(
        _maxabs(_dot(b, w))
        for b in (b_xx, b_xy, b_yy)
        for w in (psi, px, py)
    )
    checks = [
        Check("unit_norm", _maxabs(np.sqrt(_dot(psi, psi)) - 1.0), 1e-12),
        Check("metric_identity", _maxabs(g - eye), 1e-10),
        Check("forms_normal", normality, GEOMETRIC_TOL),
        Check("mean_curvature_norm", _maxabs(curv.mean_curvature_norm - h), GEOMETRIC_TOL),
        Check("gauss_flat", _maxabs(curv.gaussian), 1e-8),
        Check(
            "two_type_identity",
            _maxabs(2.0 * curv.h_vector - (2.0 * h) * (t1 - t2)),
            GEOMETRIC_TOL,
        ),
        Check("block_norm_t1", _maxabs(np.sqrt(_dot(t1, t1)) - math.sqrt(0.5)), 1e-10),
        Check("block_norm_t2", _maxabs(np.sqrt(_dot(t2, t2)) - math.sqrt(0.5)), 1e-10),
        Check("block_orthogonal", _maxabs(_dot(t1, t2)), 1e-10),
        Check("eigenblock_t1", _maxabs(lap_t1 - lam1 * t1[..., : 2 * im.m]), 1e-10),
        Check("eigenblock_t2", _maxabs(lap_t2 - lam2 * t2[..., 2 * im.m :]), 1e-10),
        Check(
            "tension_normal",
            max(_maxabs(_dot(tau, px)), _maxabs(_dot(tau, py))),
            GEOMETRIC_TOL,
        ),
        Check("tension_vs_mean_curvature", _maxabs(tau - 2.0 * curv.h_vector), 1e-10),
        Check("bitension", _maxabs(np.sqrt(_dot(tau2, tau2))), 1e-7),
    ]
    if tolerances:
        unknown = set(tolerances) - {c.name for c in checks}
        if unknown:
            raise DomainError("unknown check names in tolerance overrides: %s" % sorted(unknown))
        if any(t <= 0 for t in tolerances.values()):
            raise DomainError("tolerance overrides must be positive")
        checks = [
            Check(c.name, c.residual, tolerances.get(c.name, c.tolerance)) for c in checks
        ]
    geo = VerificationReport(tuple(checks), samples)
    return validate_miyata(data).merged(geo)
