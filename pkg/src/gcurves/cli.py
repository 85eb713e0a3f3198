"""Command-line front end: build, verify, plot, and run the acceptance suite.

Reports are JSON with sorted keys so acceptance runs diff cleanly; files are
written atomically (temp + rename).  Plots are chart-plane SVG built from
formatted strings, byte-identical for identical input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import dataclass

import numpy as np

from . import acceptance
from .convex_geometry import _canonical_rotation, _hull_eps, _planar_hull_indices
from .descent_curves import (
    Curve,
    is_g_curve,
    read_curve_csv,
    verify_length_bound,
    write_curve_csv,
)
from .involute_engine import involute_points
from .self_involute_solver import (
    SolverConfig,
    build_self_involute,
    planar_spiral_profile,
    profile_from_theta,
    theta_iterate,
    choose_parameters,
    solve_fundamental_a,
    verify_maximal_length,
)
from .surface_kernel import (
    GeometryError,
    SurfaceKind,
    SurfaceSpec,
    euclidean,
    hyperbolic,
    sphere,
    to_chart_coords,
)


@dataclass
class RunReport:
    """Result envelope of one CLI command."""

    command: str
    inputs: dict
    metrics: dict
    passed: bool

    def to_json(self) -> str:
        payload = {
            "command": self.command,
            "inputs": self.inputs,
            "metrics": self.metrics,
            "pass": self.passed,
        }
        return json.dumps(payload, sort_keys=True, indent=2, default=float) + "\n"


def _atomic_write(path: str, text: str):
    d = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-gcurves-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _surface_from_args(args) -> SurfaceSpec:
    kind = args.surface
    if kind == "sphere":
        return sphere(args.radius)
    if kind == "hyperbolic":
        return hyperbolic(args.radius)
    return euclidean()


# ---------------------------------------------------------------------------
# build


def cmd_build_self_involute(args) -> int:
    config = SolverConfig.from_file(args.config) if args.config else SolverConfig()
    try:
        result = build_self_involute(config)
    except GeometryError as exc:
        report = RunReport(
            "build-self-involute",
            {"config": args.config or "(defaults)"},
            {"error": str(exc)},
            False,
        )
        _emit_report(report, args)
        return 1
    os.makedirs(args.out_dir, exist_ok=True)
    curve_path = os.path.join(args.out_dir, "self_involute.csv")
    theta_path = os.path.join(args.out_dir, "theta_grid.csv")
    write_curve_csv(result.curve, curve_path)
    sol = result.sol
    lines = ["t,theta,theta_prime"]
    for i in range(sol.t.size):
        lines.append(f"{sol.t[i]:.17g},{sol.theta[i]:.17g},{sol.theta_prime[i]:.17g}")
    _atomic_write(theta_path, "\n".join(lines) + "\n")
    report = RunReport(
        "build-self-involute",
        {"config": args.config or "(defaults)", "curve_csv": curve_path, "theta_csv": theta_path},
        result.metrics(),
        result.passed,
    )
    _emit_report(report, args)
    return 0 if result.passed else 1


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args) -> int:
    surface = _surface_from_args(args)
    curve = read_curve_csv(args.curve, surface)
    metrics: dict = {"n_samples": curve.n_samples, "length": curve.length}
    passed = True
    if args.gcurve:
        rep = is_g_curve(curve, args.tol)
        metrics.update(
            {
                "g_ok": rep.ok,
                "g_worst_violation": rep.worst_violation,
                "g_worst_s": rep.worst_s,
            }
        )
        if rep.diameter is not None:
            metrics["diameter"] = rep.diameter
            metrics["diameter_ok"] = rep.diameter_ok
        passed = passed and rep.ok
    if args.bound:
        try:
            rep = verify_length_bound(curve)
            metrics.update(
                {
                    "bound_ok": rep.ok,
                    "hull_perimeter": rep.hull_perimeter,
                    "min_cos_sum": rep.min_cos_sum,
                    "max_sector_opening": rep.max_opening,
                    "min_sector_opening": float(rep.sector_openings[1:].min()),
                }
            )
            passed = passed and rep.ok
        except GeometryError as exc:
            metrics["bound_error"] = str(exc)
            passed = False
    if args.maximal:
        try:
            profile = _profile_for(curve, args)
            rep = verify_maximal_length(curve, profile)
            metrics.update(
                {
                    "maximal_ok": rep.ok,
                    "max_rel_perimeter_defect": rep.max_rel_perimeter_defect,
                    "max_winding_defect": rep.max_winding_defect,
                    "chord_ratio_err": rep.chord_ratio_err,
                }
            )
            passed = passed and rep.ok
        except GeometryError as exc:
            metrics["maximal_error"] = str(exc)
            passed = False
    report = RunReport(
        "verify",
        {"curve": args.curve, "surface": str(surface)},
        metrics,
        passed,
    )
    _emit_report(report, args)
    return 0 if passed else 1


def _profile_for(curve: Curve, args):
    """Profile for the maximal-length verifier: analytic on the plane,
    re-solved from the config on the sphere."""
    if curve.surface.kind is SurfaceKind.EUCLIDEAN:
        a = float(np.median(curve.kappa * curve.s))
        return planar_spiral_profile(a, float(curve.s[-1]))
    if curve.surface.kind is SurfaceKind.SPHERE:
        config = SolverConfig.from_file(args.config) if args.config else SolverConfig(R=curve.surface.radius)
        a_star = solve_fundamental_a()
        A = config.A if config.A is not None else 1.0 / a_star
        params = choose_parameters(A, B=config.B, t0=config.t0)
        sol = theta_iterate(params, config.grid_size, config.tol, config.max_iter)
        return profile_from_theta(sol, config.R, s0_max=config.s0_max, delta_cut_ratio=config.delta_cut_ratio)
    raise GeometryError("maximal-length verification supports spherical and planar curves")


# ---------------------------------------------------------------------------
# plot


def _svg_path(points: np.ndarray, transform) -> str:
    cmds = []
    for k, (x, y) in enumerate(points):
        px, py = transform(x, y)
        cmds.append(f"{'M' if k == 0 else 'L'}{px:.6f} {py:.6f}")
    return " ".join(cmds)


def render_curve_svg(
    curve: Curve,
    show_hull: bool = False,
    overlay_involute: bool = False,
    size: int = 640,
) -> str:
    """Deterministic SVG of the chart image of a curve (plus hull/involute).

    Geodesics appear straight in the chart; for the curved surfaces lengths
    and angles are distorted, which the caption records.
    """
    surface = curve.surface
    rot = _canonical_rotation(surface, curve.points)
    U = to_chart_coords(surface, curve.points @ rot.T)
    layers = []
    if surface.kind is SurfaceKind.HYPERBOLIC:
        lo = np.array([-1.05, -1.05])
        hi = np.array([1.05, 1.05])
    else:
        lo = U.min(axis=0)
        hi = U.max(axis=0)
        pad = 0.05 * max(float((hi - lo).max()), 1e-9)
        lo, hi = lo - pad, hi + pad
    span = float((hi - lo).max())
    margin = 40.0

    def tx(x, y):
        px = margin + (x - lo[0]) / span * (size - 2 * margin)
        py = size - margin - (y - lo[1]) / span * (size - 2 * margin)
        return px, py

    if surface.kind is SurfaceKind.HYPERBOLIC:
        cx, cy = tx(0.0, 0.0)
        rr = (size - 2 * margin) / span
        layers.append(
            f'<circle cx="{cx:.6f}" cy="{cy:.6f}" r="{rr:.6f}" fill="none" stroke="#999999" stroke-width="1"/>'
        )
    if show_hull:
        idx = _planar_hull_indices(U, _hull_eps(U))
        if len(idx) >= 3:
            pts = " ".join(f"{tx(U[i,0],U[i,1])[0]:.6f},{tx(U[i,0],U[i,1])[1]:.6f}" for i in idx)
            layers.append(f'<polygon points="{pts}" fill="#eef5ff" stroke="#7799cc" stroke-width="1"/>')
    layers.append(f'<path d="{_svg_path(U, tx)}" fill="none" stroke="#202020" stroke-width="1.5"/>')
    if overlay_involute:
        P = involute_points(curve) @ rot.T
        V = to_chart_coords(surface, P)
        layers.append(
            f'<path d="{_svg_path(V, tx)}" fill="none" stroke="#cc3333" stroke-width="1.2" stroke-dasharray="6 4"/>'
        )
    caption = f"chart view ({surface})"
    if surface.kind is not SurfaceKind.EUCLIDEAN:
        caption += "; geodesics are straight, but lengths and angles are distorted"
    body = "\n".join(layers)
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">\n'
        f'<rect width="{size}" height="{size}" fill="white"/>\n'
        f"{body}\n"
        f'<text x="{margin}" y="{size - 12}" font-family="monospace" font-size="12" '
        f'fill="#555555">{caption}</text>\n'
        f"</svg>\n"
    )


def cmd_plot(args) -> int:
    surface = _surface_from_args(args)
    curve = read_curve_csv(args.curve, surface)
    svg = render_curve_svg(curve, show_hull=args.hull, overlay_involute=args.involute)
    _atomic_write(args.out, svg)
    print(f"wrote {args.out}")
    return 0


# ---------------------------------------------------------------------------
# suite


def cmd_suite(args) -> int:
    results = acceptance.run_all(fast=args.fast, seed=args.seed)
    for res in results:
        print(res.line())
    passed = all(r.passed for r in results)
    report = RunReport(
        "suite",
        {"fast": args.fast, "seed": args.seed},
        {r.name: r.passed for r in results},
        passed,
    )
    if args.report:
        _atomic_write(args.report, report.to_json())
    print("suite:", "PASS" if passed else "FAIL")
    return 0 if passed else 1


def _emit_report(report: RunReport, args):
    text = report.to_json()
    sys.stdout.write(text)
    if getattr(args, "report", None):
        _atomic_write(args.report, text)


# ---------------------------------------------------------------------------


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="gcurves",
        description="descent-type curves, involutes and self-involutes on model surfaces",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_build = sub.add_parser("build-self-involute", help="run the self-involute pipeline")
    p_build.add_argument("--config", help="key = value config file")
    p_build.add_argument("--out-dir", default=".", help="where to write curve/theta CSVs")
    p_build.add_argument("--report", help="write the JSON report here as well")
    p_build.set_defaults(func=cmd_build_self_involute)

    p_verify = sub.add_parser("verify", help="verify properties of a curve CSV")
    p_verify.add_argument("curve")
    p_verify.add_argument("--surface", choices=["sphere", "euclidean", "hyperbolic"], required=True)
    p_verify.add_argument("--radius", type=float, default=1.0)
    p_verify.add_argument("--gcurve", action="store_true", help="half-plane descent predicate")
    p_verify.add_argument("--bound", action="store_true", help="length vs hull perimeter")
    p_verify.add_argument("--maximal", action="store_true", help="maximal length property")
    p_verify.add_argument("--tol", type=float, default=None)
    p_verify.add_argument("--config", help="solver config (spherical --maximal)")
    p_verify.add_argument("--report", help="write the JSON report here as well")
    p_verify.set_defaults(func=cmd_verify)

    p_plot = sub.add_parser("plot", help="chart-plane SVG of a curve CSV")
    p_plot.add_argument("curve")
    p_plot.add_argument("--surface", choices=["sphere", "euclidean", "hyperbolic"], required=True)
    p_plot.add_argument("--radius", type=float, default=1.0)
    p_plot.add_argument("--out", required=True)
    p_plot.add_argument("--hull", action="store_true")
    p_plot.add_argument("--involute", action="store_true")
    p_plot.set_defaults(func=cmd_plot)

    p_suite = sub.add_parser("suite", help="run the acceptance criteria")
    p_suite.add_argument("--fast", action="store_true", help="smaller statistical suites")
    p_suite.add_argument("--seed", type=int, default=0)
    p_suite.add_argument("--report", help="write the JSON report here")
    p_suite.set_defaults(func=cmd_suite)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GeometryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
