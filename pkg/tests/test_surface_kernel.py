"""Geometry kernel: geodesics, distances, charts, chart metric, trigonometry."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gcurves.surface_kernel import (
    ChartPoint,
    DegenerateInputError,
    GeometryError,
    OutOfChartError,
    RangeError,
    SurfaceKind,
    SurfaceMismatchError,
    SurfacePoint,
    TangentVector,
    angle_between,
    chart_metric_at,
    chart_pullback,
    chart_pushforward,
    distance,
    euclidean,
    from_chart,
    from_chart_coords,
    geodesic_point,
    geodesic_points,
    hyperbolic,
    log_direction,
    random_point,
    random_unit_tangent,
    sine_law_ratio,
    sphere,
    to_chart,
    to_chart_coords,
    triangle_solve,
)

ALL = (sphere(), euclidean(), hyperbolic())


def P(surface, coords):
    return SurfacePoint(surface, coords).validate()


class TestGeodesicPoint:
    def test_sphere_quarter_circle(self):
        p = P(sphere(), [0, 0, 1])
        out = geodesic_point(p, TangentVector(p, [1, 0, 0]), math.pi / 2)
        assert np.allclose(out.coords, [1, 0, 0], atol=1e-14)

    def test_euclidean_line(self):
        p = P(euclidean(), [0, 0, 1])
        out = geodesic_point(p, TangentVector(p, [1, 0, 0]), 3.0)
        assert np.allclose(out.coords, [3, 0, 1], atol=1e-14)

    def test_hyperbolic_closed_form(self):
        p = P(hyperbolic(), [0, 0, 1])
        out = geodesic_point(p, TangentVector(p, [1, 0, 0]), 1.0)
        assert np.allclose(out.coords, [math.sinh(1), 0, math.cosh(1)], atol=1e-14)

    def test_non_unit_direction_rejected(self):
        p = P(sphere(), [0, 0, 1])
        with pytest.raises(GeometryError):
            geodesic_point(p, TangentVector(p, [2, 0, 0]), 0.5)

    def test_sphere_range_rejected(self):
        p = P(sphere(), [0, 0, 1])
        with pytest.raises(RangeError):
            geodesic_point(p, TangentVector(p, [1, 0, 0]), 3.2)

    def test_unit_speed(self):
        rng = np.random.default_rng(7)
        for surf in ALL:
            p = random_point(surf, rng)
            v = random_unit_tangent(p, rng)
            h = 1e-6
            a = geodesic_point(p, v, 0.3 - h).coords
            b = geodesic_point(p, v, 0.3 + h).coords
            speed = surf.metric_norm((b - a) / (2 * h))
            assert abs(speed - 1.0) < 1e-8


class TestDistance:
    def test_sphere_quarter(self):
        assert distance(P(sphere(), [0, 0, 1]), P(sphere(), [1, 0, 0])) == pytest.approx(math.pi / 2)

    def test_euclidean_3_4_5(self):
        assert distance(P(euclidean(), [0, 0, 1]), P(euclidean(), [3, 4, 1])) == pytest.approx(5.0)

    def test_hyperbolic_inverse_of_geodesic(self):
        q = P(hyperbolic(), [math.sinh(1), 0, math.cosh(1)])
        assert distance(P(hyperbolic(), [0, 0, 1]), q) == pytest.approx(1.0, abs=1e-12)

    def test_symmetry_zero_triangle(self):
        rng = np.random.default_rng(3)
        for surf in ALL:
            a, b, c = (random_point(surf, rng) for _ in range(3))
            assert distance(a, b) == pytest.approx(distance(b, a), abs=1e-12)
            assert distance(a, a) == pytest.approx(0.0, abs=1e-9)
            assert distance(a, c) <= distance(a, b) + distance(b, c) + 1e-12

    def test_mismatched_surfaces(self):
        with pytest.raises(SurfaceMismatchError):
            distance(P(sphere(), [0, 0, 1]), P(euclidean(), [0, 0, 1]))

    def test_antipodal_rejected(self):
        with pytest.raises(DegenerateInputError):
            distance(P(sphere(), [0, 0, 1]), P(sphere(), [0, 0, -1]))


class TestAngles:
    def test_orthonormal_pair(self):
        p = P(sphere(), [0, 0, 1])
        ang = angle_between(TangentVector(p, [1, 0, 0]), TangentVector(p, [0, 1, 0]))
        assert ang == pytest.approx(math.pi / 2)

    def test_identity_case(self):
        rng = np.random.default_rng(1)
        for surf in ALL:
            p = random_point(surf, rng)
            v = random_unit_tangent(p, rng)
            assert angle_between(v, v) == pytest.approx(0.0, abs=1e-7)

    def test_euclidean_quarter_pi(self):
        p = P(euclidean(), [0, 0, 1])
        ang = angle_between(TangentVector(p, [1, 0, 0]), TangentVector(p, [1, 1, 0]))
        assert ang == pytest.approx(math.pi / 4)

    def test_rescale_invariance(self):
        rng = np.random.default_rng(2)
        for surf in ALL:
            p = random_point(surf, rng)
            v, w = random_unit_tangent(p, rng), random_unit_tangent(p, rng)
            base = angle_between(v, w)
            scaled = angle_between(TangentVector(p, 7.3 * v.dir), TangentVector(p, 0.2 * w.dir))
            assert scaled == pytest.approx(base, abs=1e-9)

    def test_zero_vector_rejected(self):
        p = P(euclidean(), [0, 0, 1])
        with pytest.raises(GeometryError):
            angle_between(TangentVector(p, [0, 0, 0]), TangentVector(p, [1, 0, 0]))


class TestCharts:
    def test_sphere_center(self):
        assert np.allclose(to_chart(P(sphere(), [0, 0, 1])).uv, [0, 0])

    def test_sphere_diagonal(self):
        c = to_chart(P(sphere(), [1 / math.sqrt(2), 0, 1 / math.sqrt(2)]))
        assert np.allclose(c.uv, [1, 0], atol=1e-14)

    def test_klein_image(self):
        c = to_chart(P(hyperbolic(), [math.sinh(1), 0, math.cosh(1)]))
        assert np.allclose(c.uv, [math.tanh(1), 0], atol=1e-14)

    def test_round_trip_bulk(self):
        # 10^4 random valid points per surface
        rng = np.random.default_rng(11)
        for surf in ALL:
            r = 0.95 * np.sqrt(rng.uniform(size=10_000))
            if surf.kind is SurfaceKind.SPHERE:
                r = r * 4.0  # gnomonic chart is unbounded
            phi = rng.uniform(0, 2 * math.pi, size=10_000)
            U = np.stack([r * np.cos(phi), r * np.sin(phi)], axis=1)
            X = from_chart_coords(surf, U)
            U2 = to_chart_coords(surf, X)
            X2 = from_chart_coords(surf, U2)
            assert np.max(np.abs(X2 - X)) < 1e-10

    def test_out_of_chart_rejected(self):
        with pytest.raises(OutOfChartError):
            to_chart(SurfacePoint(sphere(), [0, 0, -1.0]))
        with pytest.raises(OutOfChartError):
            from_chart(ChartPoint(hyperbolic(), [1.2, 0.0]))

    def test_chart_straightness(self):
        rng = np.random.default_rng(5)
        for surf in ALL:
            for _ in range(50):
                p, q = random_point(surf, rng), random_point(surf, rng)
                if distance(p, q) < 1e-3:
                    continue
                d = distance(p, q)
                v = log_direction(p, q)
                X = geodesic_points(p, v, np.linspace(0, d, 9))
                U = to_chart_coords(surf, X)
                chord = U[-1] - U[0]
                rel = U[1:-1] - U[0]
                cross = np.abs(chord[0] * rel[:, 1] - chord[1] * rel[:, 0])
                assert np.max(cross) < 1e-10 * max(1.0, float(chord @ chord))

    @settings(max_examples=200, deadline=None)
    @given(
        st.floats(-3, 3), st.floats(-3, 3), st.sampled_from(["sphere", "euclidean", "hyperbolic"])
    )
    def test_round_trip_property(self, u, v, kind):
        surf = {"sphere": sphere(), "euclidean": euclidean(), "hyperbolic": hyperbolic()}[kind]
        uv = np.array([u, v])
        if surf.kind is SurfaceKind.HYPERBOLIC:
            uv = 0.95 * uv / max(1.0, np.linalg.norm(uv))
        p = from_chart(ChartPoint(surf, uv))
        assert np.allclose(to_chart(p).uv, uv, atol=1e-10)


class TestChartMetric:
    def test_sphere_origin_identity(self):
        g = chart_metric_at(ChartPoint(sphere(), [0, 0]))
        assert np.allclose(g, np.eye(2), atol=1e-15)

    def test_sphere_printed_value(self):
        g = chart_metric_at(ChartPoint(sphere(), [1, 0]))
        assert np.allclose(g, [[0.25, 0], [0, 0.5]], atol=1e-15)

    def test_klein_origin_identity(self):
        g = chart_metric_at(ChartPoint(hyperbolic(), [0, 0]))
        assert np.allclose(g, np.eye(2), atol=1e-15)

    def test_euclidean_identity(self):
        g = chart_metric_at(ChartPoint(euclidean(), [3.7, -1.2]))
        assert np.allclose(g, np.eye(2))

    def test_against_distance_finite_differences(self):
        # ds^2 between nearby chart points should match the quadratic form
        rng = np.random.default_rng(9)
        for surf in (sphere(), sphere(2.5), hyperbolic(), hyperbolic(0.7)):
            for _ in range(25):
                u = rng.uniform(-0.5, 0.5, size=2)
                du = rng.standard_normal(2)
                du /= np.linalg.norm(du)
                h = 1e-5
                p = SurfacePoint(surf, from_chart_coords(surf, u - h * du))
                q = SurfacePoint(surf, from_chart_coords(surf, u + h * du))
                g = chart_metric_at(ChartPoint(surf, u))
                pred = 2 * h * math.sqrt(du @ g @ du)
                assert distance(p, q) == pytest.approx(pred, rel=1e-8)

    def test_distance_equals_chart_line_integral(self):
        from scipy.integrate import quad

        rng = np.random.default_rng(13)
        for surf in ALL:
            p, q = random_point(surf, rng, 0.7), random_point(surf, rng, 0.7)
            up, uq = to_chart(p).uv, to_chart(q).uv

            def integrand(t):
                u = up * (1 - t) + t * uq
                g = chart_metric_at(ChartPoint(surf, u))
                du = uq - up
                return math.sqrt(du @ g @ du)

            val, _ = quad(integrand, 0.0, 1.0, epsabs=1e-13, epsrel=1e-13)
            assert abs(val - distance(p, q)) < 1e-8

    def test_pushforward_pullback_inverse(self):
        rng = np.random.default_rng(21)
        for surf in ALL:
            p = random_point(surf, rng)
            v = random_unit_tangent(p, rng)
            u = to_chart(p).uv
            du = chart_pushforward(surf, p.coords, v.dir)
            back = chart_pullback(surf, u, du)
            assert np.allclose(back, v.dir, atol=1e-10)


class TestTriangles:
    def test_octant_triangle(self):
        ang = triangle_solve(sphere(), math.pi / 2, math.pi / 2, math.pi / 2)
        assert max(abs(a - math.pi / 2) for a in ang) < 1e-12

    def test_euclidean_right_triangle(self):
        al, be, ga = triangle_solve(euclidean(), 3.0, 4.0, 5.0)
        assert ga == pytest.approx(math.pi / 2)

    def test_hyperbolic_equilateral(self):
        al, be, ga = triangle_solve(hyperbolic(), 1.0, 1.0, 1.0)
        # independent evaluation of the side law of cosines
        expected = math.acos(
            (math.cosh(1.0) * math.cosh(1.0) - math.cosh(1.0)) / (math.sinh(1.0) ** 2)
        )
        assert al == be == ga
        assert al == pytest.approx(expected, abs=1e-14)
        r = [sine_law_ratio(hyperbolic(), al, 1.0) for _ in range(3)]
        assert max(r) - min(r) < 1e-14

    def test_angle_sum_signs(self):
        rng = np.random.default_rng(17)
        for surf in ALL:
            for _ in range(200):
                pts = [random_point(surf, rng, 0.8) for _ in range(3)]
                try:
                    a = distance(pts[1], pts[2])
                    b = distance(pts[0], pts[2])
                    c = distance(pts[0], pts[1])
                    if min(a, b, c) < 0.05:
                        continue
                    ang = triangle_solve(surf, a, b, c)
                except GeometryError:
                    continue
                total = sum(ang)
                if surf.kind is SurfaceKind.SPHERE:
                    assert total > math.pi
                elif surf.kind is SurfaceKind.HYPERBOLIC:
                    assert total < math.pi
                else:
                    assert total == pytest.approx(math.pi, abs=1e-10)

    def test_nonexistent_triangle(self):
        with pytest.raises(GeometryError):
            triangle_solve(euclidean(), 1.0, 1.0, 5.0)
        with pytest.raises(GeometryError):
            triangle_solve(sphere(), 3.0, 3.0, 2 * math.pi)
