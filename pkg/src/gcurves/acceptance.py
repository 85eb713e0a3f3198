"""Acceptance criteria runners, shared by the CLI suite and the test module.

Each runner checks one verifiable property of the build at its pinned
tolerance and returns a CriterionResult with the measured numbers, so the
same code backs `gcurves suite` and tests/test_acceptance.py.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .convex_geometry import convex_hull, perimeter
from .descent_curves import (
    Curve,
    generate_descent_curve,
    is_g_curve,
    verify_length_bound,
)
from .involute_engine import involute, involute_points, frenet_data
from .self_involute_solver import (
    BuildResult,
    build_self_involute,
    choose_parameters,
    solve_fundamental_a,
    theta_iterate,
)
from .surface_kernel import (
    DegenerateInputError,
    GeometryError,
    SurfaceKind,
    SurfacePoint,
    SurfaceSpec,
    distance,
    euclidean,
    geodesic_points,
    hyperbolic,
    random_point,
    sine_law_ratio,
    sphere,
    triangle_solve,
)

ALL_SURFACES = (sphere(), euclidean(), hyperbolic())


@dataclass
class CriterionResult:
    name: str
    passed: bool
    runtime: float
    limit: float | None
    metrics: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extras = " ".join(f"{k}={v:.3g}" if isinstance(v, float) else f"{k}={v}" for k, v in self.metrics.items())
        return f"[{status}] {self.name} ({self.runtime:.1f}s) {extras}"


def _finish(name, limit, t0, checks: dict, metrics: dict) -> CriterionResult:
    runtime = time.time() - t0
    passed = all(checks.values()) and (limit is None or runtime < limit)
    metrics = dict(metrics)
    metrics.update({f"ok_{k}": v for k, v in checks.items() if not v})
    return CriterionResult(name, passed, runtime, limit, metrics)


# -- 1 ----------------------------------------------------------------------


def criterion_fundamental_root() -> CriterionResult:
    t0 = time.time()
    a = solve_fundamental_a()
    residual = abs(a - math.exp(1.5 * math.pi / a))
    f = lambda x: x - math.exp(1.5 * math.pi / x)
    checks = {
        "residual": residual < 1e-12,
        "bracket": 3.6 < a < 3.7,
        "signs": f(1.0) < 0.0 < f(10.0) and f(3.6) < 0.0 < f(3.7),
    }
    return _finish("1 fundamental-root", 1.0, t0, checks, {"a_star": a, "residual": residual})


# -- 2 ----------------------------------------------------------------------


def criterion_theta_iteration() -> CriterionResult:
    t0 = time.time()
    a_star = solve_fundamental_a()
    params = choose_parameters(1.0 / a_star)
    metrics: dict = {}
    try:
        sol = theta_iterate(params, 10_000, 1e-10, 100)
        sol2 = theta_iterate(params, 20_000, 1e-10, 100)
        metrics = {
            "iterations": sol.iterations_used,
            "residual": sol.residual,
            "residual_2x": sol2.residual,
            "second_diff_sup": sol.second_diff_sup,
        }
        checks = {
            "claims": True,  # theta_iterate raises on any claim violation
            "residual": sol.residual < 1e-6,
            "refinement": sol2.residual < sol.residual,
        }
    except GeometryError as exc:
        checks = {"claims": False}
        metrics = {"error": str(exc)}
    return _finish("2 theta-iteration", 30.0, t0, checks, metrics)


# -- 3 ----------------------------------------------------------------------


def criterion_self_involute_pipeline(
    build: BuildResult | None = None, build_seconds: float = 0.0
) -> CriterionResult:
    t0 = time.time() - build_seconds
    if build is None:
        build = build_self_involute()
    checks = {
        "perimeter": build.maximal.max_rel_perimeter_defect < 1e-3,
        "gcurve": build.g_report.ok,
        "winding": build.maximal.max_winding_defect < 1e-3,
        "rotation": abs(build.pair.rotation_angle) < 1e-3,
        "range": build.profile.s0 <= 0.2 + 1e-12,
        "coverage": build.maximal.check_from <= 2.0 * build.profile.delta_cut + 1e-15,
    }
    metrics = {
        "rel_perimeter_defect": build.maximal.max_rel_perimeter_defect,
        "winding_defect": build.maximal.max_winding_defect,
        "rotation_angle": build.pair.rotation_angle,
        "g_violation": build.g_report.worst_violation,
        "s0": build.profile.s0,
    }
    return _finish("3 self-involute-pipeline", 120.0, t0, checks, metrics)


# -- 4 ----------------------------------------------------------------------


def _geodesic_curve(surface: SurfaceSpec, length: float, n: int) -> Curve:
    p0 = SurfacePoint(surface, [0.0, 0.0, surface.radius if surface.kind is SurfaceKind.SPHERE else 1.0])
    from .surface_kernel import TangentVector

    t0 = TangentVector(p0, [1.0, 0.0, 0.0])
    s = np.linspace(0.0, length, n)
    X = geodesic_points(p0, t0, s)
    R = surface.radius
    if surface.kind is SurfaceKind.SPHERE:
        T = np.outer(-np.sin(s / R) / R, p0.coords) + np.outer(np.cos(s / R), t0.dir)
    elif surface.kind is SurfaceKind.HYPERBOLIC:
        T = np.outer(np.sinh(s / R) / R, p0.coords) + np.outer(np.cosh(s / R), t0.dir)
    else:
        T = np.tile(t0.dir, (n, 1))
    return Curve(surface, s, X, T, np.zeros(n))


def circle_curve(surface: SurfaceSpec, r: float, s_lo: float, s_hi: float, n: int) -> Curve:
    """Arc of the geodesic circle of radius r about the chart pole, kappa > 0."""
    R = surface.radius
    if surface.kind is SurfaceKind.SPHERE:
        rad, kap = R * math.sin(r / R), math.cos(r / R) / (R * math.sin(r / R))
        c_ax, s_ax = math.cos(r / R), math.sin(r / R)
        pole = np.array([0.0, 0.0, R])
    elif surface.kind is SurfaceKind.HYPERBOLIC:
        rad, kap = R * math.sinh(r / R), math.cosh(r / R) / (R * math.sinh(r / R))
        c_ax, s_ax = math.cosh(r / R), math.sinh(r / R)
        pole = np.array([0.0, 0.0, R])
    else:
        rad, kap = r, 1.0 / r
        pole = np.array([0.0, 0.0, 1.0])
    s = np.linspace(s_lo, s_hi, n)
    phi = s / rad
    if surface.kind is SurfaceKind.EUCLIDEAN:
        X = np.stack([r * np.cos(phi), r * np.sin(phi), np.ones(n)], axis=1)
    else:
        e1 = np.array([1.0, 0.0, 0.0])
        e2 = np.array([0.0, 1.0, 0.0])
        X = c_ax * pole + s_ax * R * (np.outer(np.cos(phi), e1) + np.outer(np.sin(phi), e2))
    T = np.stack([-np.sin(phi), np.cos(phi), np.zeros(n)], axis=1)
    return Curve(surface, s, X, T, np.full(n, kap))


def criterion_involute_closed_forms() -> CriterionResult:
    t0 = time.time()
    const_err = 0.0
    for surf in ALL_SURFACES:
        length = 1.4 if surf.kind is SurfaceKind.SPHERE else 1.2
        g = _geodesic_curve(surf, length, 256)
        P = involute_points(g)
        const_err = max(const_err, float(np.abs(P - g.points[0]).max()))

    s = np.linspace(0.0, 3.0, 600)
    circ = Curve(
        euclidean(),
        s,
        np.stack([np.cos(s), np.sin(s), np.ones_like(s)], 1),
        np.stack([-np.sin(s), np.cos(s), np.zeros_like(s)], 1),
        np.ones_like(s),
    )
    P = involute_points(circ)
    ref = np.stack([np.cos(s) + s * np.sin(s), np.sin(s) - s * np.cos(s), np.ones_like(s)], 1)
    circle_err = float(np.abs(P - ref).max())

    kappa_err = 0.0
    ranges = {
        SurfaceKind.SPHERE: (0.8, 0.3, 1.2),
        SurfaceKind.EUCLIDEAN: (1.0, 0.3, 2.0),
        SurfaceKind.HYPERBOLIC: (0.8, 0.3, 1.5),
    }
    for surf in ALL_SURFACES:
        r, lo, hi = ranges[surf.kind]
        base = circle_curve(surf, r, lo, hi, 5000)
        inv = involute(base)
        for idx in range(100, inv.n_samples - 100, 240):
            _, _, kap = frenet_data(inv, inv.s[idx])
            kappa_err = max(kappa_err, abs(kap - inv.kappa[idx]))

    checks = {
        "geodesic_constant": const_err < 1e-10,
        "circle_closed_form": circle_err < 1e-12,
        "kappa_recompute": kappa_err < 1e-4,
    }
    metrics = {"geodesic_err": const_err, "circle_err": circle_err, "kappa_err": kappa_err}
    return _finish("4 involute-closed-forms", None, t0, checks, metrics)


# -- 5 ----------------------------------------------------------------------


def criterion_length_bound_suite(seed: int = 0, n_curves: int = 200, n_steps: int = 64) -> CriterionResult:
    t0 = time.time()
    worst_excess = -math.inf
    min_cos = math.inf
    max_open = 0.0
    for surf in ALL_SURFACES:
        for k in range(n_curves):
            curve = generate_descent_curve(seed + k, surf, n_steps)
            if surf.kind is SurfaceKind.SPHERE:
                rep_g = is_g_curve(curve)
                if not rep_g.diameter_ok:
                    raise GeometryError("generated spherical curve exceeds the diameter bound")
            rep = verify_length_bound(curve, tol=1e-9)
            worst_excess = max(worst_excess, rep.length - rep.hull_perimeter)
            min_cos = min(min_cos, rep.min_cos_sum)
            max_open = max(max_open, rep.max_opening)
    checks = {
        "bound": worst_excess <= 1e-9,
        "cos_sum": min_cos >= 1.0 - 1e-6,
        "opening": max_open <= math.pi / 2.0 + 1e-6,
    }
    metrics = {
        "curves": 3 * n_curves,
        "worst_excess": worst_excess,
        "min_cos_sum": min_cos,
        "max_opening": max_open,
    }
    return _finish("5 length-bound-suite", 120.0, t0, checks, metrics)


# -- 6 ----------------------------------------------------------------------


def _exact_test_curve(surface: SurfaceSpec, rng) -> tuple:
    """A curve with exact off-sample evaluation: geodesic or geodesic circle."""
    if rng.uniform() < 0.4:
        length = 1.2 if surface.kind is SurfaceKind.SPHERE else 1.5
        curve = _geodesic_curve(surface, length, 9)
        return curve, lambda sv: _geodesic_eval(surface, curve, sv)
    r = rng.uniform(0.25, 0.6)
    hi = min(1.2, 0.9 * math.pi * surface.radius / 2.0)
    curve = circle_curve(surface, r, 0.05, hi, 9)
    return curve, lambda sv: _circle_eval(surface, r, sv)


def _geodesic_eval(surface, curve, sv):
    from .surface_kernel import TangentVector

    p0 = curve.point(0)
    t0 = TangentVector(p0, curve.tangents[0])
    return geodesic_points(p0, t0, np.array([sv]))[0]


def _circle_eval(surface, r, sv):
    R = surface.radius
    if surface.kind is SurfaceKind.SPHERE:
        rad = R * math.sin(r / R)
        phi = sv / rad
        return np.array(
            [math.sin(r / R) * R * math.cos(phi), math.sin(r / R) * R * math.sin(phi), math.cos(r / R) * R]
        )
    if surface.kind is SurfaceKind.HYPERBOLIC:
        rad = R * math.sinh(r / R)
        phi = sv / rad
        return np.array(
            [math.sinh(r / R) * R * math.cos(phi), math.sinh(r / R) * R * math.sin(phi), math.cosh(r / R) * R]
        )
    phi = sv / r
    return np.array([r * math.cos(phi), r * math.sin(phi), 1.0])


def criterion_distance_derivative(seed: int = 0, n_triples: int = 1000, h: float = 1e-4) -> CriterionResult:
    from .descent_curves import distance_derivative

    t0 = time.time()
    rng = np.random.default_rng(seed)
    worst = 0.0
    for surf in ALL_SURFACES:
        done = 0
        while done < n_triples:
            curve, at = _exact_test_curve(surf, rng)
            i = int(rng.integers(1, curve.n_samples - 1))
            sv = float(curve.s[i])
            y = random_point(surf, rng, 0.7)
            p = curve.point(i)
            try:
                if distance(p, y) < 0.05:
                    continue
                fd = (
                    distance(SurfacePoint(surf, at(sv + h)), y)
                    - distance(SurfacePoint(surf, at(sv - h)), y)
                ) / (2.0 * h)
                dd = distance_derivative(curve, y, sv)
            except DegenerateInputError:
                continue
            worst = max(worst, abs(fd - dd))
            done += 1
    checks = {"match": worst < 1e-5}
    return _finish("6 distance-derivative", None, t0, checks, {"worst": worst, "per_surface": n_triples})


# -- 7 ----------------------------------------------------------------------


def criterion_perimeter_monotonicity(seed: int = 0, n_pairs: int = 500) -> CriterionResult:
    t0 = time.time()
    rng = np.random.default_rng(seed)
    worst = -math.inf
    for surf in ALL_SURFACES:
        for _ in range(n_pairs):
            n_sub = int(rng.integers(3, 12))
            n_extra = int(rng.integers(1, 8))
            sub = [random_point(surf, rng, 0.6) for _ in range(n_sub)]
            extra = [random_point(surf, rng, 0.6) for _ in range(n_extra)]
            p_sub = perimeter(convex_hull(sub))
            p_sup = perimeter(convex_hull(sub + extra))
            worst = max(worst, p_sub - p_sup)
    checks = {"monotone": worst <= 1e-9}
    return _finish("7 perimeter-monotonicity", None, t0, checks, {"worst_excess": worst, "pairs": 3 * n_pairs})


# -- 8 ----------------------------------------------------------------------


def criterion_trig_kernel(seed: int = 0, n_triangles: int = 10_000) -> CriterionResult:
    t0 = time.time()
    rng = np.random.default_rng(seed)
    worst = 0.0
    for surf in (sphere(), hyperbolic()):
        done = 0
        while done < n_triangles:
            pts = [random_point(surf, rng, 0.85) for _ in range(3)]
            try:
                a = distance(pts[1], pts[2])
                b = distance(pts[0], pts[2])
                c = distance(pts[0], pts[1])
                if min(a, b, c) < 0.05:
                    continue
                ang = triangle_solve(surf, a, b, c)
            except GeometryError:
                continue
            if min(ang) < 0.05:
                continue
            ratios = [
                sine_law_ratio(surf, ang[0], a),
                sine_law_ratio(surf, ang[1], b),
                sine_law_ratio(surf, ang[2], c),
            ]
            worst = max(worst, max(ratios) - min(ratios))
            done += 1
    oct_ang = triangle_solve(sphere(), math.pi / 2, math.pi / 2, math.pi / 2)
    oct_err = max(abs(x - math.pi / 2) for x in oct_ang)
    checks = {"sine_law": worst < 1e-10, "octant": oct_err < 1e-12}
    return _finish(
        "8 trig-kernel", None, t0, checks, {"sine_spread": worst, "octant_err": oct_err, "per_surface": n_triangles}
    )


# -- 9 ----------------------------------------------------------------------


def criterion_dilation_limit(build: BuildResult | None = None) -> CriterionResult:
    t0 = time.time()
    if build is None:
        build = build_self_involute()
    prof = build.profile
    a = prof.a
    s = np.linspace(0.1 * prof.s0, prof.s0, 2000)
    sups = []
    for lam in (10.0, 100.0, 1000.0):
        kl = np.asarray(prof.kappa(s / lam)) / lam
        sups.append(float(np.max(np.abs(kl - a / s))))
    checks = {"decreasing": sups[0] > sups[1] > sups[2]}
    metrics = {"sup_10": sups[0], "sup_100": sups[1], "sup_1000": sups[2]}
    return _finish("9 dilation-limit", None, t0, checks, metrics)


# ---------------------------------------------------------------------------


def run_all(fast: bool = False, seed: int = 0, build: BuildResult | None = None) -> list[CriterionResult]:
    """Run every acceptance criterion; `fast` shrinks the statistical suites."""
    build_seconds = 0.0
    if build is None:
        t0 = time.time()
        build = build_self_involute()
        build_seconds = time.time() - t0
    n5 = 30 if fast else 200
    n6 = 150 if fast else 1000
    n7 = 80 if fast else 500
    n8 = 1500 if fast else 10_000
    return [
        criterion_fundamental_root(),
        criterion_theta_iteration(),
        criterion_self_involute_pipeline(build, build_seconds),
        criterion_involute_closed_forms(),
        criterion_length_bound_suite(seed, n5),
        criterion_distance_derivative(seed, n6),
        criterion_perimeter_monotonicity(seed, n7),
        criterion_trig_kernel(seed, n8),
        criterion_dilation_limit(build),
    ]
