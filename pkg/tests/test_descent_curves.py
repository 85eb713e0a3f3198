"""Curve type, CSV round trip, descent predicate, length bound, generator."""

import math

import numpy as np
import pytest

from gcurves.descent_curves import (
    Curve,
    distance_derivative,
    generate_descent_curve,
    is_g_curve,
    perimeter_profile,
    read_curve_csv,
    verify_length_bound,
    write_curve_csv,
)
from gcurves.involute_engine import limit_spiral
from gcurves.surface_kernel import (
    GeometryError,
    SurfaceKind,
    SurfacePoint,
    TangentVector,
    distance,
    euclidean,
    geodesic_points,
    hyperbolic,
    pairwise_distances,
    sphere,
)

ALL = (sphere(), euclidean(), hyperbolic())


def geodesic_curve(surf, length=1.0, n=41):
    p0 = SurfacePoint(surf, [0, 0, 1])
    t0 = TangentVector(p0, [1.0, 0.0, 0.0])
    s = np.linspace(0.0, length, n)
    X = geodesic_points(p0, t0, s)
    R = surf.radius
    if surf.kind is SurfaceKind.SPHERE:
        T = np.outer(-np.sin(s / R) / R, p0.coords) + np.outer(np.cos(s / R), t0.dir)
    elif surf.kind is SurfaceKind.HYPERBOLIC:
        T = np.outer(np.sinh(s / R) / R, p0.coords) + np.outer(np.cosh(s / R), t0.dir)
    else:
        T = np.tile(t0.dir, (n, 1))
    return Curve(surf, s, X, T, np.zeros(n))


def circle_arc(total, n=400):
    s = np.linspace(0.0, total, n)
    X = np.stack([np.cos(s), np.sin(s), np.ones_like(s)], 1)
    T = np.stack([-np.sin(s), np.cos(s), np.zeros_like(s)], 1)
    return Curve(euclidean(), s, X, T, np.ones_like(s))


class TestCurve:
    def test_validate_geodesic(self):
        for surf in ALL:
            geodesic_curve(surf).validate()

    def test_bad_spacing_rejected(self):
        c = geodesic_curve(euclidean())
        c.s = c.s * 1.5  # claims longer arc than the points support
        with pytest.raises(GeometryError):
            c.validate()

    def test_csv_round_trip_full_precision(self, tmp_path):
        c = generate_descent_curve(2, sphere(), 30)
        path = tmp_path / "curve.csv"
        write_curve_csv(c, path)
        back = read_curve_csv(path, sphere())
        assert np.array_equal(back.s, c.s)
        assert np.array_equal(back.points, c.points)
        assert np.array_equal(back.tangents, c.tangents)
        assert np.array_equal(back.kappa, c.kappa)

    def test_csv_parse_error_reports_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("s,x1,x2,x3,t1,t2,t3,kappa\n0,0,0,1,1,0,0\n")
        with pytest.raises(GeometryError, match="line 2"):
            read_curve_csv(path, euclidean())


class TestIsGCurve:
    def test_geodesics_pass(self):
        for surf in ALL:
            rep = is_g_curve(geodesic_curve(surf))
            assert rep.ok
            assert rep.worst_violation <= 1e-12

    def test_half_circle_passes(self):
        rep = is_g_curve(circle_arc(math.pi))
        assert rep.ok

    def test_three_quarter_circle_fails(self):
        rep = is_g_curve(circle_arc(1.5 * math.pi))
        assert not rep.ok
        assert rep.worst_violation > 1e-3

    def test_long_circle_arcs_fail_on_curved_surfaces(self):
        from gcurves.acceptance import circle_curve

        for surf, circumference in (
            (sphere(), 2 * math.pi * math.sin(0.5)),
            (hyperbolic(), 2 * math.pi * math.sinh(0.5)),
        ):
            long_arc = circle_curve(surf, 0.5, 0.01, 0.8 * circumference, 600)
            assert not is_g_curve(long_arc).ok
            short_arc = circle_curve(surf, 0.5, 0.01, 0.45 * circumference, 400)
            assert is_g_curve(short_arc).ok

    def test_sphere_diameter_reporting(self):
        c = generate_descent_curve(0, sphere(), 40)
        rep = is_g_curve(c)
        assert rep.diameter is not None
        assert rep.diameter_ok
        assert rep.diameter == pytest.approx(
            float(pairwise_distances(sphere(), c.points).max())
        )


class TestPerimeterProfile:
    def test_geodesic_profile_doubles_arc(self):
        for surf in ALL:
            c = geodesic_curve(surf)
            prof = perimeter_profile(c)
            assert np.allclose(prof.p, 2.0 * c.s, atol=1e-9)

    def test_profile_non_decreasing_and_dominates_arc(self):
        c = generate_descent_curve(7, euclidean(), 60)
        prof = perimeter_profile(c)
        assert np.all(np.diff(prof.p) >= -1e-12)
        # for descent curves every prefix hull perimeter bounds the arc length
        assert np.all(prof.p >= prof.s - 1e-9)

    def test_quarter_circle_against_scipy_hull(self):
        from scipy.spatial import ConvexHull

        c = circle_arc(math.pi / 2, n=2000)
        prof = perimeter_profile(c)
        pts = c.points[:, :2]
        hull = ConvexHull(pts)
        oracle = 0.0
        verts = hull.vertices
        for k in range(len(verts)):
            a, b = pts[verts[k]], pts[verts[(k + 1) % len(verts)]]
            oracle += float(np.linalg.norm(a - b))
        assert prof.p[-1] == pytest.approx(oracle, abs=1e-12)
        # the smooth value: quarter arc plus closing chord
        assert prof.p[-1] == pytest.approx(math.pi / 2 + math.sqrt(2.0), abs=1e-4)

    def test_limit_spiral_profile_equals_arc(self, a_star):
        sp = limit_spiral(a_star, 1.0)
        prof = perimeter_profile(sp)
        sel = sp.s >= 20 * sp.s[0]
        rel = np.abs(prof.p[sel] - sp.s[sel]) / sp.s[sel]
        assert np.max(rel) < 1e-3


class TestVerifyLengthBound:
    def test_geodesic_case(self):
        for surf in ALL:
            rep = verify_length_bound(geodesic_curve(surf))
            assert rep.ok
            assert rep.hull_perimeter == pytest.approx(2.0 * rep.length, abs=1e-9)

    def test_non_descent_input_rejected(self):
        with pytest.raises(GeometryError):
            verify_length_bound(circle_arc(1.5 * math.pi))

    def test_generated_curves(self):
        for surf in ALL:
            for seed in range(8):
                rep = verify_length_bound(generate_descent_curve(seed, surf, 48))
                assert rep.ok
                assert rep.min_cos_sum >= 1.0 - 1e-6
                assert rep.max_opening <= math.pi / 2 + 1e-6
                assert rep.lemma_margin >= -1e-3

    def test_spiral_equality_case(self, a_star):
        sp = limit_spiral(a_star, 1.0)
        rep = verify_length_bound(sp)
        assert rep.ok
        # maximal length: the bound is attained up to the truncated inner tail
        assert rep.hull_perimeter == pytest.approx(rep.length, abs=2e-3)
        assert rep.max_opening == pytest.approx(math.pi / 2, abs=1e-3)


class TestDistanceDerivative:
    def test_target_ahead_shrinks(self):
        c = geodesic_curve(euclidean(), length=2.0)
        y = SurfacePoint(euclidean(), [10.0, 0.0, 1.0])
        assert distance_derivative(c, y, 0.0) == pytest.approx(-1.0, abs=1e-12)

    def test_target_behind_grows(self):
        c = geodesic_curve(euclidean(), length=2.0)
        y = SurfacePoint(euclidean(), [-1.0, 0.0, 1.0])
        assert distance_derivative(c, y, 0.0) == pytest.approx(1.0, abs=1e-12)

    def test_coincident_target_rate_one(self):
        c = geodesic_curve(sphere(), length=1.0)
        y = c.point(5)
        assert distance_derivative(c, y, c.s[5]) == pytest.approx(1.0, abs=1e-9)

    def test_matches_finite_differences_on_sphere(self):
        # y off a great circle: central differences of the true distance
        rng = np.random.default_rng(6)
        c = geodesic_curve(sphere(), length=1.2, n=241)
        h = 1e-4
        p0 = c.point(0)
        t0 = TangentVector(p0, c.tangents[0])
        for _ in range(40):
            y = SurfacePoint(sphere(), _random_sphere_point(rng))
            i = int(rng.integers(1, 240))
            sv = float(c.s[i])
            pm = SurfacePoint(sphere(), geodesic_points(p0, t0, np.array([sv - h]))[0])
            pp = SurfacePoint(sphere(), geodesic_points(p0, t0, np.array([sv + h]))[0])
            if distance(c.point(i), y) < 0.05 or distance(c.point(i), y) > 2.8:
                continue
            fd = (distance(pp, y) - distance(pm, y)) / (2 * h)
            assert distance_derivative(c, y, sv) == pytest.approx(fd, abs=1e-5)


def _random_sphere_point(rng):
    v = rng.standard_normal(3)
    return v / np.linalg.norm(v)


class TestGenerator:
    def test_descent_on_all_surfaces(self):
        for surf in ALL:
            c = generate_descent_curve(1, surf, 100)
            rep = is_g_curve(c)
            assert rep.ok
            if surf.kind is SurfaceKind.SPHERE:
                assert rep.diameter_ok

    def test_two_step_trivial(self):
        c = generate_descent_curve(1, euclidean(), 2)
        assert c.n_samples == 2
        assert is_g_curve(c).ok

    def test_minimum_steps_enforced(self):
        with pytest.raises(GeometryError):
            generate_descent_curve(1, euclidean(), 1)

    def test_deterministic_in_seed(self):
        a = generate_descent_curve(9, hyperbolic(), 40)
        b = generate_descent_curve(9, hyperbolic(), 40)
        assert np.array_equal(a.points, b.points)

    def test_monotone_distance_from_past_points(self):
        # clearance from any fixed earlier point never shrinks along the curve
        for surf in ALL:
            c = generate_descent_curve(11, surf, 60)
            D = pairwise_distances(surf, c.points)
            for i in (0, 10, 25):
                gaps = np.diff(D[i, i:])
                assert np.min(gaps) >= -1e-9
