import math
from fractions import Fraction as F

import numpy as np
import pytest

from bihsurf.core import DomainError, ExactnessError
from bihsurf.parameters import lift_structure, structure_params
from bihsurf.immersion import build
from bihsurf.geometry import verify_immersion
from bihsurf.admissibility import (
    CircleSquareSet,
    admissible,
    circle_points,
    convex_hull,
    dual_lattice,
    intersect_hulls,
    parse_lattice,
    parse_lattice_entry,
    point_in_hull,
    unimodular_image,
    witness_weights,
)

LAT_2PI = {"gens": [["2*pi", "0"], ["0", "2*pi"]]}
LAT_PI = {"gens": [["pi", "0"], ["0", "pi"]]}
LAT_SQRT5 = {"gens": [["2*pi*sqrt(5)", "0"], ["0", "2*pi*sqrt(5)"]]}
# rectangular lattice whose dual is (4/sqrt5) Z x (2/sqrt5) Z
LAT_RECT_EXISTS = {"gens": [["pi*sqrt(5)/2", "0"], ["0", "pi*sqrt(5)"]]}
# dual (2/sqrt5) Z x (10/sqrt5) Z: both circle sets on the positive axis
LAT_RECT_NONE_HULL = {"gens": [["pi*sqrt(5)", "0"], ["0", "pi*sqrt(5)/5"]]}
# dual (4/sqrt13) Z x (6/sqrt13) Z: A = {16/13}, G = {-36/13}, infeasible
LAT_RECT_INFEASIBLE = {"gens": [["pi*sqrt(13)/2", "0"], ["0", "pi*sqrt(13)/3"]]}


# ---------------------------------------------------------------------------
# parsing


def test_parse_entry_forms():
    assert parse_lattice_entry("2*pi") == (F(2), 1)
    assert parse_lattice_entry("pi") == (F(1), 1)
    assert parse_lattice_entry("-pi/2") == (F(-1, 2), 1)
    assert parse_lattice_entry("3*pi*sqrt(5)/2") == (F(3, 2), 5)
    assert parse_lattice_entry("pi*sqrt(8)") == (F(2), 2)  # sqrt(8) = 2 sqrt(2)
    assert parse_lattice_entry("0") == (F(0), 1)
    assert parse_lattice_entry(" 2 * pi ") == (F(2), 1)


def test_parse_entry_rejects_nonsense():
    for bad in ("2", "pi*pi", "sqrt(5)", "2*pi*sqrt(-3)", "pi+1", "two*pi"):
        with pytest.raises(ValueError):
            parse_lattice_entry(bad)


def test_parse_lattice_rejects_mixed_surds():
    with pytest.raises(ExactnessError, match="mixed"):
        parse_lattice({"gens": [["2*pi", "0"], ["0", "2*pi*sqrt(5)"]]})


def test_parse_lattice_rejects_dependent_generators():
    with pytest.raises(ValueError, match="dependent"):
        parse_lattice({"gens": [["2*pi", "0"], ["-2*pi", "0"]]})


def test_parse_lattice_float_gens_match_exact():
    lat = parse_lattice(LAT_SQRT5)
    assert np.allclose(lat.gens, [(2 * math.pi * math.sqrt(5), 0), (0, 2 * math.pi * math.sqrt(5))])
    gram = lat.exact.gram_over_pi2()
    assert gram[0][0] == F(20) and gram[0][1] == 0


# ---------------------------------------------------------------------------
# dual lattice


def test_dual_of_2pi_lattice_is_integer_lattice():
    d = dual_lattice(parse_lattice(LAT_2PI))
    assert np.allclose(d.gens, [(1, 0), (0, 1)])
    assert d.gram == ((F(1), F(0)), (F(0), F(1)))


def test_dual_of_pi_lattice_is_doubled():
    d = dual_lattice(parse_lattice(LAT_PI))
    assert np.allclose(d.gens, [(2, 0), (0, 2)])


def test_dual_of_sqrt5_lattice():
    d = dual_lattice(parse_lattice(LAT_SQRT5))
    assert np.allclose(d.gens, [(1 / math.sqrt(5), 0), (0, 1 / math.sqrt(5))])
    assert d.gram == ((F(1, 5), F(0)), (F(0), F(1, 5)))


def test_dual_requires_exact_data(sasahara_immersion):
    from bihsurf.periodicity import period_lattice

    lat = period_lattice(sasahara_immersion, 20.0)  # floats only
    with pytest.raises(ExactnessError):
        dual_lattice(lat)


def test_dual_requires_rank_two():
    from bihsurf.periodicity import Lattice2

    with pytest.raises(DomainError, match="rank"):
        dual_lattice(Lattice2(rank=1, gens=((1.0, 0.0),)))


def test_dual_pairing_invariant():
    for spec in (LAT_2PI, LAT_SQRT5, LAT_RECT_EXISTS, LAT_RECT_INFEASIBLE):
        lat = parse_lattice(spec)
        d = dual_lattice(lat)
        for i in range(2):
            for j in range(2):
                pairing = d.gens[i][0] * lat.gens[j][0] + d.gens[i][1] * lat.gens[j][1]
                target = 2 * math.pi if i == j else 0.0
                assert abs(pairing - target) <= 1e-9


def test_exact_gram_matches_float_gram():
    for spec in (LAT_2PI, LAT_SQRT5, LAT_RECT_EXISTS):
        lat = parse_lattice(spec)
        gram = lat.exact.gram_over_pi2()
        for i in range(2):
            for j in range(2):
                float_entry = sum(lat.gens[i][k] * lat.gens[j][k] for k in range(2))
                assert abs(float_entry - math.pi**2 * float(gram[i][j])) <= 1e-9


# ---------------------------------------------------------------------------
# circle points


def test_circle_points_unit_radius():
    d = dual_lattice(parse_lattice(LAT_2PI))
    cp = circle_points(d, F(1))
    assert cp.preimages == ((-1, 0), (0, -1), (0, 1), (1, 0))
    assert cp.points_exact == ((F(-1), F(0)), (F(1), F(0)))


def test_circle_points_mod_four_obstruction():
    d = dual_lattice(parse_lattice(LAT_2PI))
    assert circle_points(d, F(3)).points == ()


def test_circle_points_scaled_lattice():
    d = dual_lattice(parse_lattice(LAT_SQRT5))
    cp = circle_points(d, F(4, 5))
    assert cp.points_exact == ((F(-4, 5), F(0)), (F(4, 5), F(0)))
    assert set(cp.preimages) == {(-2, 0), (2, 0), (0, -2), (0, 2)}


def test_circle_points_involution_structure(rng):
    d = dual_lattice(parse_lattice(LAT_2PI))
    for radius in (F(1), F(2), F(4), F(5), F(25)):
        cp = circle_points(d, radius)
        pre = set(cp.preimages)
        assert all((-m, -n) in pre for m, n in pre)
        # squares of representatives land exactly on the recorded points
        for (m, n), pt in zip(cp.reps, cp.points_exact):
            w = complex(*d.vector(m, n))
            assert abs(w * w - complex(float(pt[0]), float(pt[1]))) <= 1e-9
        if cp.points:
            assert len(cp.preimages) == 2 * len(cp.points) or len(cp.preimages) > 0


def test_circle_points_count_identity():
    # no square collisions: |points| = |preimages| / 2
    d = dual_lattice(parse_lattice(LAT_2PI))
    for radius in (F(1), F(2), F(4), F(5)):
        cp = circle_points(d, radius)
        if cp.points:
            assert len(cp.preimages) == 2 * len(cp.points)


def test_circle_points_modulus_invariant():
    d = dual_lattice(parse_lattice(LAT_SQRT5))
    for radius in (F(4, 5), F(16, 5), F(1)):
        cp = circle_points(d, radius)
        for pt in cp.points:
            assert abs(abs(pt) - float(radius)) <= 1e-10
        for i in range(len(cp.points)):
            for j in range(i + 1, len(cp.points)):
                assert abs(cp.points[i] - cp.points[j]) > 1e-9


# ---------------------------------------------------------------------------
# hull helpers


def test_hull_and_membership_exact():
    pts = [(F(0), F(0)), (F(2), F(0)), (F(0), F(2)), (F(1), F(1)), (F(2), F(2))]
    hull = convex_hull(pts)
    assert set(hull) == {(F(0), F(0)), (F(2), F(0)), (F(2), F(2)), (F(0), F(2))}
    assert point_in_hull((F(1), F(1)), hull)
    assert not point_in_hull((F(3), F(0)), hull)


def test_hull_degenerate_cases():
    seg = convex_hull([(F(0), F(0)), (F(2), F(2)), (F(1), F(1))])
    assert set(seg) == {(F(0), F(0)), (F(2), F(2))}
    assert point_in_hull((F(1), F(1)), seg)
    assert not point_in_hull((F(1), F(0)), seg)
    single = convex_hull([(F(1), F(2))])
    assert point_in_hull((F(1), F(2)), single)


def test_intersect_hulls_polygon_segment_point():
    square = convex_hull([(F(-1), F(-1)), (F(1), F(-1)), (F(1), F(1)), (F(-1), F(1))])
    seg = [(F(-2), F(0)), (F(2), F(0))]
    cut = intersect_hulls(seg, square)
    assert set(cut) == {(F(-1), F(0)), (F(1), F(0))}
    assert intersect_hulls([(F(5), F(5))], square) == []
    shifted = convex_hull([(F(3), F(-1)), (F(5), F(-1)), (F(5), F(1)), (F(3), F(1))])
    assert intersect_hulls(square, shifted) == []


def test_origin_membership_matches_combination_grid(rng):
    # brute force at resolution 1e-3 over the weight simplex, for the small
    # circle sets the decision actually meets
    for spec, h in [(LAT_SQRT5, F(3, 5)), (LAT_2PI, F(3, 5)), (LAT_RECT_NONE_HULL, F(3, 5))]:
        d = dual_lattice(parse_lattice(spec))
        for radius in (2 * (1 - h), 2 * (1 + h)):
            cp = circle_points(d, radius)
            pts = [(float(x), float(y)) for x, y in cp.points_exact]
            if not pts:
                continue
            exact = point_in_hull((F(0), F(0)), convex_hull(cp.points_exact))
            best = math.inf
            if len(pts) == 1:
                best = math.hypot(*pts[0])
            elif len(pts) == 2:
                (x1, y1), (x2, y2) = pts
                for w in np.arange(0.0, 1.0 + 1e-12, 1e-3):
                    best = min(best, math.hypot(w * x1 + (1 - w) * x2, w * y1 + (1 - w) * y2))
            else:
                arr = np.array(pts)
                for w1 in np.arange(0.0, 1.0 + 1e-12, 1e-3):
                    rest = 1.0 - w1
                    w2 = np.arange(0.0, rest + 1e-12, 1e-3)
                    w3 = rest - w2
                    combo = (
                        w1 * arr[0][None, :]
                        + w2[:, None] * arr[1][None, :]
                        + w3[:, None] * arr[2][None, :]
                    )
                    best = min(best, float(np.min(np.linalg.norm(combo, axis=1))))
            assert exact == (best <= 5e-3), (spec, radius, best)


def test_hull_predicates_match_direction_scan(rng):
    # brute-force: origin outside iff a separating direction exists
    for _ in range(40):
        pts = [
            (F(int(a)), F(int(b)))
            for a, b in rng.integers(-6, 7, size=(int(rng.integers(1, 7)), 2))
        ]
        hull = convex_hull(pts)
        exact = point_in_hull((F(0), F(0)), hull)
        arr = np.array([[float(x), float(y)] for x, y in pts])
        thetas = np.arange(0.0, 2 * math.pi, 1e-3)
        dirs = np.stack([np.cos(thetas), np.sin(thetas)], axis=1)
        separated = bool(np.any(np.max(dirs @ arr.T, axis=1) < -1e-12))
        assert exact == (not separated)


# ---------------------------------------------------------------------------
# witness weights


def _fake_set(points):
    pts = sorted(points)
    return CircleSquareSet(
        radius_sq=F(1),
        points=tuple(complex(float(x), float(y)) for x, y in pts),
        points_exact=tuple(pts),
        reps=tuple((0, 0) for _ in pts),
        preimages=(),
        dual=None,
    )


def test_witness_weights_single_point_against_segment():
    h = F(3, 5)
    lam1, lam2 = 2 * (1 - h), 2 * (1 + h)
    set_a = _fake_set([(-lam1, F(0))])
    set_g = _fake_set([(-lam2, F(0)), (lam2, F(0))])
    ra, rg = witness_weights(set_a, set_g)
    assert ra == [F(1)]
    assert rg == [h / (1 + h), 1 / (1 + h)]  # the rho = 0 family weights
    assert -lam1 * ra[0] + sum(w * p[0] for w, p in zip(rg, set_g.points_exact)) == 0


def test_witness_weights_symmetric_pairs():
    set_a = _fake_set([(F(-1), F(0)), (F(1), F(0))])
    set_g = _fake_set([(F(0), F(-3)), (F(0), F(3))])
    ra, rg = witness_weights(set_a, set_g)
    assert ra == [F(1, 2), F(1, 2)]
    assert rg == [F(1, 2), F(1, 2)]


def test_witness_weights_infeasible():
    assert witness_weights(_fake_set([(F(1), F(0))]), _fake_set([(F(1), F(0))])) is None


def test_witness_weights_balance_is_exact(rng):
    for _ in range(30):
        pa = [(F(int(a)), F(int(b))) for a, b in rng.integers(-5, 6, size=(3, 2))]
        pg = [(F(int(a)), F(int(b))) for a, b in rng.integers(-5, 6, size=(3, 2))]
        pa, pg = list(set(pa)), list(set(pg))
        out = witness_weights(_fake_set(pa), _fake_set(pg))
        if out is None:
            continue
        ra, rg = out
        sa = sorted(set(pa))
        sg = sorted(set(pg))
        bal_x = sum(w * p[0] for w, p in zip(ra, sa)) + sum(w * p[0] for w, p in zip(rg, sg))
        bal_y = sum(w * p[1] for w, p in zip(ra, sa)) + sum(w * p[1] for w, p in zip(rg, sg))
        assert bal_x == 0 and bal_y == 0
        assert sum(ra) == 1 and sum(rg) == 1
        assert all(w >= 0 for w in ra + rg)


# ---------------------------------------------------------------------------
# the decision


def test_admissible_2pi_lattice_empty_circle():
    assert admissible(parse_lattice(LAT_2PI), F(1, 2)).verdict == "none_empty_circle"


@pytest.mark.parametrize("h", [F(1, 4), F(1, 2), F(3, 4)])
def test_admissible_pi_lattice_empty_for_all_h(h):
    # shortest dual vector has length 2 >= sqrt(2): nothing on either circle
    assert admissible(parse_lattice(LAT_PI), h).verdict == "none_empty_circle"


def test_admissible_sqrt5_pseudo_umbilical():
    res = admissible(parse_lattice(LAT_SQRT5), F(3, 5))
    assert res.verdict == "exists_pseudo_umbilical"
    assert res.set_a.points_exact == ((F(-4, 5), F(0)), (F(4, 5), F(0)))
    assert res.set_g.points_exact == ((F(-16, 5), F(0)), (F(16, 5), F(0)))
    assert res.witness is not None and res.witness.m == 2 and res.witness.mp == 2


def test_admissible_sqrt5_witness_passes_full_suite():
    lat = parse_lattice(LAT_SQRT5)
    res = admissible(lat, F(3, 5))
    im = build(res.witness)
    rep = verify_immersion(im, samples=100, seed=3)
    assert rep.passed, [c.name for c in rep.failures()]
    psi0 = im.eval(np.zeros(2))
    for g in lat.gens:
        assert float(np.max(np.abs(im.eval(np.array(g)) - psi0))) <= 1e-8


def test_admissible_rect_exists_matches_structure_member():
    res = admissible(parse_lattice(LAT_RECT_EXISTS), F(3, 5))
    assert res.verdict == "exists"
    w = res.witness
    assert (w.m, w.mp) == (1, 2)
    expect = lift_structure(structure_params(0.6, 0.0))
    assert w.h == 0.6
    assert np.allclose(sorted(w.rp_weights), sorted(expect.rp_weights), atol=1e-12)
    im = build(w)
    assert verify_immersion(im, samples=80, seed=7).passed
    psi0 = im.eval(np.zeros(2))
    for g in parse_lattice(LAT_RECT_EXISTS).gens:
        assert float(np.max(np.abs(im.eval(np.array(g)) - psi0))) <= 1e-8


def test_admissible_none_hull():
    res = admissible(parse_lattice(LAT_RECT_NONE_HULL), F(3, 5))
    assert res.verdict == "none_hull"
    assert res.set_a.points_exact == ((F(4, 5), F(0)),)
    assert res.set_g.points_exact == ((F(16, 5), F(0)),)


def test_admissible_none_infeasible():
    res = admissible(parse_lattice(LAT_RECT_INFEASIBLE), F(5, 13))
    assert res.verdict == "none_infeasible"
    assert res.set_a.points_exact == ((F(16, 13), F(0)),)
    assert res.set_g.points_exact == ((F(-36, 13), F(0)),)


def test_admissible_rejects_irrational_h():
    with pytest.raises(DomainError):
        admissible(parse_lattice(LAT_2PI), F(3, 2))


def test_admissible_unimodular_invariance(rng):
    lat = parse_lattice(LAT_SQRT5)
    lat2 = parse_lattice(LAT_RECT_EXISTS)
    for _ in range(20):
        a = int(rng.integers(-3, 4))
        c = int(rng.integers(-3, 4))
        u = ((1, a), (c, 1 + a * c))  # det = 1
        assert admissible(unimodular_image(lat, u), F(3, 5)).verdict == "exists_pseudo_umbilical"
        assert admissible(unimodular_image(lat2, u), F(3, 5)).verdict == "exists"


def test_admissible_witness_period_invariant(rng):
    # any existence witness must be periodic over the input lattice
    for spec_lat, h in [(LAT_SQRT5, F(3, 5)), (LAT_RECT_EXISTS, F(3, 5))]:
        lat = parse_lattice(spec_lat)
        res = admissible(lat, h)
        assert res.exists
        im = build(res.witness)
        psi0 = im.eval(np.zeros(2))
        g1, g2 = (np.array(g) for g in lat.gens)
        for _ in range(10):
            a, b = (int(x) for x in rng.integers(-3, 4, 2))
            assert float(np.max(np.abs(im.eval(a * g1 + b * g2) - psi0))) <= 1e-8
