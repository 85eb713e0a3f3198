"""Sampled curves, the half-plane descent predicate, and the length bound.

A Curve is an arc-length-sampled polyline of surface points with unit
tangents and per-sample geodesic curvature.  Predicates are evaluated on the
samples: consecutive samples are joined by geodesics, which are chart-straight,
so half-plane tests on samples bound the interpolated curve as well.

The descent predicate ("is this a curve that never turns back on its past"):
at each sample, every earlier sample must lie in the closed half-plane behind
the normal geodesic there.  Curves with that property have length bounded by
the perimeter of their convex hull, with equality exactly for the
self-involute spirals built in `self_involute_solver`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .convex_geometry import (
    NoConvexHullError,
    NoSectorError,
    _canonical_rotation,
    _hull_eps,
    _minimal_arc,
    _planar_hull_indices,
    _sector_chart_angles,
    sector_phi_angles,
)
from .surface_kernel import (
    GeometryError,
    SurfaceKind,
    SurfacePoint,
    SurfaceSpec,
    TangentVector,
    angle_between,
    chart_metrics,
    chart_pushforward,
    distance,
    geodesic_point,
    log_direction,
    oriented_normal,
    pairwise_distances,
    project_to_tangent,
    random_point,
    random_unit_tangent,
    to_chart_coords,
)


class GenerationError(GeometryError):
    """The incremental curve generator ran out of admissible steps."""


class CurveCsvError(GeometryError):
    """Malformed curve CSV input."""


@dataclass(eq=False)
class Curve:
    """Arc-length-sampled curve on one of the model surfaces.

    `s` holds the arc-length coordinate of each sample.  For curves whose
    ideal start is a curvature singularity (the self-involute spirals) the
    first sample may sit at s > 0; `s` is then the coordinate on the ideal
    curve, so downstream identities (kappa ~ a/s, tau, perimeter = s) can be
    checked directly against it.
    """

    surface: SurfaceSpec
    s: np.ndarray
    points: np.ndarray
    tangents: np.ndarray
    kappa: np.ndarray
    closed: bool = False

    def __post_init__(self):
        self.s = np.asarray(self.s, dtype=float).reshape(-1)
        self.points = np.asarray(self.points, dtype=float).reshape(-1, 3)
        self.tangents = np.asarray(self.tangents, dtype=float).reshape(-1, 3)
        self.kappa = np.asarray(self.kappa, dtype=float).reshape(-1)
        n = self.s.size
        if not (self.points.shape[0] == self.tangents.shape[0] == self.kappa.size == n):
            raise GeometryError("sample arrays have mismatched lengths")

    @property
    def n_samples(self) -> int:
        return self.s.size

    @property
    def length(self) -> float:
        return float(self.s[-1] - self.s[0])

    def point(self, i: int) -> SurfacePoint:
        return SurfacePoint(self.surface, self.points[i])

    def tangent(self, i: int) -> TangentVector:
        return TangentVector(self.point(i), self.tangents[i])

    def sample_index(self, s: float) -> int:
        i = int(np.argmin(np.abs(self.s - s)))
        if abs(self.s[i] - s) > 1e-9 * max(1.0, abs(s)):
            raise GeometryError(f"s={s} is not a sample value")
        return i

    def validate(self, eps_len: float = 1e-2, eps_emb: float = 1e-8):
        if self.s.size < 1:
            raise GeometryError("curve needs at least one sample")
        if self.s[0] < -1e-12:
            raise GeometryError("arc-length values must be nonnegative")
        ds = np.diff(self.s)
        if np.any(ds <= 0.0):
            raise GeometryError("arc-length values must be strictly increasing")
        for i in range(self.n_samples):
            self.point(i).validate(eps_emb)
        norms = self.surface.metric_norm(self.tangents)
        if np.max(np.abs(norms - 1.0)) > 1e-6:
            raise GeometryError("tangents must be unit in the surface metric")
        if self.n_samples >= 2:
            gaps = _row_distances(self.surface, self.points[:-1], self.points[1:])
            rel = np.abs(gaps - ds) / ds
            if np.max(rel) > eps_len:
                raise GeometryError(
                    f"sample spacing deviates from arc-length by {np.max(rel):.2e}"
                )
        return self

    def interpolate_point(self, s: float) -> SurfacePoint:
        """Point of the piecewise-geodesic interpolation at arc value s."""
        if s < self.s[0] - 1e-12 or s > self.s[-1] + 1e-12:
            raise GeometryError(f"s={s} outside the sampled range")
        i = int(np.searchsorted(self.s, s)) - 1
        i = min(max(i, 0), self.n_samples - 2)
        if abs(s - self.s[i]) < 1e-15:
            return self.point(i)
        p, q = self.point(i), self.point(i + 1)
        d = distance(p, q)
        frac = (s - self.s[i]) / (self.s[i + 1] - self.s[i])
        return geodesic_point(p, log_direction(p, q), frac * d)


def _row_distances(surface: SurfaceSpec, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    R = surface.radius
    if surface.kind is SurfaceKind.SPHERE:
        cross = np.linalg.norm(np.cross(A, B), axis=-1)
        dot = (A * B).sum(axis=-1)
        return R * np.arctan2(cross, dot)
    if surface.kind is SurfaceKind.HYPERBOLIC:
        q = np.maximum(surface.metric_dot(A - B, A - B), 0.0)
        return 2.0 * R * np.arcsinh(np.sqrt(q) / (2.0 * R))
    return np.linalg.norm(A - B, axis=-1)


# ---------------------------------------------------------------------------
# CSV interchange

CSV_HEADER = "s,x1,x2,x3,t1,t2,t3,kappa"


def write_curve_csv(curve: Curve, path):
    import os
    import tempfile

    rows = [CSV_HEADER]
    for i in range(curve.n_samples):
        vals = [curve.s[i], *curve.points[i], *curve.tangents[i], curve.kappa[i]]
        rows.append(",".join(f"{v:.17g}" for v in vals))
    text = "\n".join(rows) + "\n"
    d = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-curve-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_curve_csv(path, surface: SurfaceSpec) -> Curve:
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].strip() != CSV_HEADER:
        raise CurveCsvError(f"{path}: line 1: expected header '{CSV_HEADER}'")
    data = []
    for ln, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 8:
            raise CurveCsvError(f"{path}: line {ln}: expected 8 fields, got {len(parts)}")
        try:
            data.append([float(v) for v in parts])
        except ValueError as exc:
            raise CurveCsvError(f"{path}: line {ln}: {exc}") from None
    if not data:
        raise CurveCsvError(f"{path}: no samples")
    arr = np.array(data)
    return Curve(surface, arr[:, 0], arr[:, 1:4], arr[:, 4:7], arr[:, 7])


# ---------------------------------------------------------------------------
# the descent predicate


@dataclass
class GCurveReport:
    ok: bool
    worst_violation: float
    worst_s: float
    tol: float
    diameter: float | None = None
    diameter_ok: bool | None = None


def _chart_setup(curve: Curve):
    """Canonical rotation + chart images + chart tangents for a whole curve."""
    rot = _canonical_rotation(curve.surface, curve.points)
    Xr = curve.points @ rot.T
    Tr = curve.tangents @ rot.T
    U = to_chart_coords(curve.surface, Xr)
    Tch = chart_pushforward(curve.surface, Xr, Tr)
    return rot, U, Tch


def is_g_curve(curve: Curve, tol: float | None = None) -> GCurveReport:
    """Check the half-plane descent condition at every sample.

    At sample i with unit tangent t, every earlier sample must satisfy
    <x - x_i, t>_g <= tol in the chart (the signed chart-metric distance past
    the normal line).  Report-style: never raises on failing curves.
    """
    if tol is None:
        tol = 1e-8 * max(curve.length, 1e-6)
    diameter = None
    diameter_ok = None
    if curve.surface.kind is SurfaceKind.SPHERE:
        diameter = float(pairwise_distances(curve.surface, curve.points).max())
        diameter_ok = diameter < math.pi * curve.surface.radius / 2.0
    try:
        rot, U, Tch = _chart_setup(curve)
    except NoConvexHullError:
        return GCurveReport(False, math.inf, math.nan, tol, diameter, diameter_ok)
    G = chart_metrics(curve.surface, U)
    M = np.einsum("nij,nj->ni", G, Tch)
    diag = (U * M).sum(axis=1)
    n = curve.n_samples
    worst = -math.inf
    worst_i = 0
    block = 1024
    for i0 in range(1, n, block):
        i1 = min(i0 + block, n)
        V = U @ M[i0:i1].T  # V[j, i-i0] = U_j . M_i
        V = V.T - diag[i0:i1, None]
        for k in range(i1 - i0):
            i = i0 + k
            v = float(V[k, :i].max())
            if v > worst:
                worst, worst_i = v, i
    return GCurveReport(worst <= tol, worst, float(curve.s[worst_i]), tol, diameter, diameter_ok)


# ---------------------------------------------------------------------------
# perimeter profiles and the length bound


@dataclass
class PerimeterProfile:
    s: np.ndarray
    p: np.ndarray


def _prefix_perimeters(curve: Curve, rot: np.ndarray, U: np.ndarray, indices) -> np.ndarray:
    """Hull perimeter of the sample prefix 0..i for each i in `indices`."""
    surface = curve.surface
    X = curve.points
    out = np.empty(len(indices))
    for k, i in enumerate(indices):
        if i == 0:
            out[k] = 0.0
            continue
        pts = U[: i + 1]
        idx = _planar_hull_indices(pts, _hull_eps(pts))
        if len(idx) < 3:
            d = pts - pts.mean(axis=0)
            axis = d[np.argmax((d * d).sum(axis=1))]
            proj = d @ axis
            a, b = int(np.argmin(proj)), int(np.argmax(proj))
            out[k] = 2.0 * _row_distances(surface, X[a][None], X[b][None])[0]
        else:
            P = X[idx]
            out[k] = float(_row_distances(surface, P, np.roll(P, -1, axis=0)).sum())
    return out


def perimeter_profile(curve: Curve) -> PerimeterProfile:
    """Perimeter of the convex hull of every sample prefix."""
    rot, U, _ = _chart_setup(curve)
    p = _prefix_perimeters(curve, rot, U, range(curve.n_samples))
    return PerimeterProfile(curve.s.copy(), p)


@dataclass
class LengthBoundReport:
    ok: bool
    length: float
    hull_perimeter: float
    sector_openings: np.ndarray
    cos_sums: np.ndarray
    min_cos_sum: float
    max_opening: float
    lemma_margin: float
    g_report: GCurveReport


def verify_length_bound(curve: Curve, tol: float = 1e-9, g_tol: float | None = None) -> LengthBoundReport:
    """Verify length <= hull perimeter, with the per-sample sector diagnostics.

    Also reports, at every interior sample, the projecting-sector opening and
    cos(phi1) + cos(phi2) (the lower bound for the perimeter growth rate) and
    the worst discrete margin of p'(s) >= cos(phi1) + cos(phi2).
    """
    g_report = is_g_curve(curve, g_tol)
    if not g_report.ok:
        raise GeometryError(
            f"not a descent curve: worst violation {g_report.worst_violation:.3e} "
            f"at s={g_report.worst_s}"
        )
    rot, U, _ = _chart_setup(curve)
    n = curve.n_samples
    openings = np.zeros(n)
    cos_sums = np.full(n, 2.0)
    for i in range(1, n):
        p1, p2, opening = sector_phi_angles(curve, i, rot, U)
        openings[i] = opening
        cos_sums[i] = math.cos(p1) + math.cos(p2)
    profile = _prefix_perimeters(curve, rot, U, range(n))
    length = curve.length
    hull_p = float(profile[-1])
    dp = np.diff(profile) / np.diff(curve.s)
    lemma_margin = float((dp - cos_sums[:-1]).min()) if n > 1 else math.inf
    return LengthBoundReport(
        ok=length <= hull_p + tol,
        length=length,
        hull_perimeter=hull_p,
        sector_openings=openings,
        cos_sums=cos_sums,
        min_cos_sum=float(cos_sums[1:].min()) if n > 1 else 2.0,
        max_opening=float(openings.max()),
        lemma_margin=lemma_margin,
        g_report=g_report,
    )


# ---------------------------------------------------------------------------
# distance derivative (the derivative of s -> d(y, curve(s)))


def distance_derivative(curve: Curve, y: SurfacePoint, s: float) -> float:
    """d/ds of the distance from y to the curve point at s.

    Equals |t| cos(phi) with phi = pi - alpha, alpha the angle at the curve
    point between the forward tangent and the segment toward y.  A target
    straight ahead gives -|t| (distance shrinking), straight behind +|t|.
    When y coincides with the curve point the rate is +|t|.
    """
    if y.surface != curve.surface:
        raise GeometryError("y lies on a different surface")
    i = curve.sample_index(s)
    p = curve.point(i)
    t = curve.tangent(i)
    speed = t.norm()
    if distance(p, y) < 1e-12:
        return speed
    alpha = angle_between(t, log_direction(p, y))
    return -speed * math.cos(alpha)


# ---------------------------------------------------------------------------
# generator of descent curves


_GEN_LENGTH = {
    SurfaceKind.SPHERE: 0.7 * math.pi / 2.0,  # scaled by R; keeps diameter < pi R / 2
    SurfaceKind.EUCLIDEAN: 1.5,
    SurfaceKind.HYPERBOLIC: 1.2,
}


def generate_descent_curve(
    seed: int,
    surface: SurfaceSpec,
    n_steps: int,
    max_turn: float | None = None,
    opening_margin: float = 0.15,
) -> Curve:
    """Grow a curve that satisfies the descent predicate by construction.

    Each step turns left by a random angle drawn inside the projecting
    sector's polar cone, then the exact half-plane conditions are re-checked
    at both ends of the new geodesic step; offending turns are shrunk toward
    a straight continuation, which is always admissible.  The sector opening
    is kept below pi/2 - opening_margin so the curve stays strictly inside
    the regime where cos(phi1) + cos(phi2) >= 1.
    """
    if n_steps < 2:
        raise GeometryError("n_steps must be at least 2")
    rng = np.random.default_rng(seed)
    R = surface.radius
    total = _GEN_LENGTH[surface.kind] * (R if surface.kind is SurfaceKind.SPHERE else 1.0)
    ds = total / (n_steps - 1)
    if max_turn is None:
        max_turn = min(0.1, 4.0 * ds / max(R, 1e-9))

    start = random_point(surface, rng, chart_radius=0.1)
    t0 = random_unit_tangent(start, rng)

    # fixed chart for the whole construction (sphere: start rotated to pole)
    if surface.kind is SurfaceKind.SPHERE:
        from .surface_kernel import rotation_aligning

        rot = rotation_aligning(start.coords / R, np.array([0.0, 0.0, 1.0]))
    else:
        rot = np.eye(3)

    X = [start.coords]
    T = [t0.dir]
    turns = [0.0]
    U = [to_chart_coords(surface, rot @ start.coords)]

    def halfplane_ok(u_at, tangent_at, x_at, U_prev):
        """All chart points of U_prev behind the normal at (x_at, tangent_at)."""
        if not U_prev:
            return True
        tch = chart_pushforward(surface, rot @ x_at, rot @ tangent_at)
        g = chart_metrics(surface, np.asarray(u_at)[None, :])[0]
        m = g @ tch
        vals = (np.asarray(U_prev) - u_at) @ m
        return float(vals.max()) <= 1e-12

    def opening_ok(u_at, tangent_at, x_at, U_all):
        tch = chart_pushforward(surface, rot @ x_at, rot @ tangent_at)
        arr = np.asarray(U_all + [u_at])
        try:
            width, _, _ = _minimal_arc(_sector_chart_angles(arr, arr.shape[0] - 1, -tch))
        except NoSectorError:
            return False
        return width <= math.pi / 2.0 - opening_margin

    for step in range(1, n_steps):
        q = X[-1]
        t = T[-1]
        nvec = oriented_normal(surface, q, t)
        accepted = False
        delta = rng.uniform(0.0, max_turn)
        for attempt in range(24):
            w = math.cos(delta) * t + math.sin(delta) * nvec
            w = project_to_tangent(surface, q, w)
            w /= surface.metric_norm(w)
            p_here = SurfacePoint(surface, q)
            if not halfplane_ok(U[-1], w, q, U[:-1]):
                delta *= 0.5
                continue
            e_pt = geodesic_point(p_here, TangentVector(p_here, w), ds)
            e = e_pt.coords
            # arrival tangent of the geodesic step
            if surface.kind is SurfaceKind.SPHERE:
                te = -math.sin(ds / R) * q / R + math.cos(ds / R) * w
            elif surface.kind is SurfaceKind.HYPERBOLIC:
                te = math.sinh(ds / R) * q / R + math.cosh(ds / R) * w
            else:
                te = w
            te = project_to_tangent(surface, e, te)
            te /= surface.metric_norm(te)
            u_e = to_chart_coords(surface, rot @ e)
            ok = halfplane_ok(u_e, te, e, U)
            ok = ok and opening_ok(u_e, te, e, U)
            if ok and surface.kind is SurfaceKind.SPHERE:
                dists = _row_distances(surface, np.asarray(X), e[None, :].repeat(len(X), 0))
                ok = float(dists.max()) < 0.98 * math.pi * R / 2.0
            if ok and surface.kind is SurfaceKind.HYPERBOLIC:
                ok = float(u_e @ u_e) < 0.81
            if ok:
                T[-1] = w
                turns[-1] = delta
                X.append(e)
                T.append(te)
                turns.append(0.0)
                U.append(u_e)
                accepted = True
                break
            delta *= 0.5
            if attempt > 16:
                delta = 0.0
        if not accepted:
            raise GenerationError(f"no admissible step at sample {step} (seed {seed})")

    kappa = np.array(turns) / ds
    if len(kappa) >= 2:
        kappa[-1] = kappa[-2]
    s = np.arange(n_steps) * ds
    curve = Curve(surface, s, np.asarray(X), np.asarray(T), kappa)
    report = is_g_curve(curve)
    if not report.ok:
        raise GenerationError(
            f"generated curve failed the descent check (seed {seed}, "
            f"violation {report.worst_violation:.3e})"
        )
    return curve
