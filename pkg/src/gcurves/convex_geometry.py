"""Geodesic convexity on the model surfaces, computed through the charts.

Because the central charts send geodesics to straight lines, a subset of the
surface is geodesically convex exactly when its chart image is convex in the
plane.  Hulls are therefore planar monotone-chain hulls of chart images,
mapped back to the surface; perimeters are sums of geodesic side lengths.

On the sphere a hull exists only for sets contained in an open hemisphere:
point sets are first rotated so that their centroid direction points at the
chart pole, and the construction fails if any point still has x3 <= 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .surface_kernel import (
    GeometryError,
    OutOfChartError,
    SurfaceKind,
    SurfacePoint,
    SurfaceSpec,
    TangentVector,
    angle_between,
    chart_pullback,
    chart_pushforward,
    distance,
    rotation_aligning,
    to_chart_coords,
)


class NoConvexHullError(GeometryError):
    """The point set admits no convex hull (no containing open hemisphere)."""


class NoSectorError(GeometryError):
    """The curve prefix fits in no closed half-plane at the vertex."""


@dataclass(eq=False)
class ConvexRegion:
    """Geodesically convex polygon given by its chart-ccw hull vertices."""

    surface: SurfaceSpec
    hull_vertices: list
    degenerate_flag: bool
    _rotation: np.ndarray = field(default=None, repr=False)
    _chart: np.ndarray = field(default=None, repr=False)

    @property
    def n_vertices(self) -> int:
        return len(self.hull_vertices)


def _planar_hull_indices(U: np.ndarray, eps_cross: float) -> list:
    """Monotone-chain hull of (n,2) points; returns ccw vertex indices.

    Points whose turn is within eps_cross of collinear are dropped, so hull
    edges are strict left turns.
    """
    order = np.lexsort((U[:, 1], U[:, 0]))

    def build(idx_iter):
        chain = []
        for k in idx_iter:
            while len(chain) > 1:
                o, a = chain[-2], chain[-1]
                cross = (U[a, 0] - U[o, 0]) * (U[k, 1] - U[o, 1]) - (
                    U[k, 0] - U[o, 0]
                ) * (U[a, 1] - U[o, 1])
                if cross <= eps_cross:
                    chain.pop()
                else:
                    break
            chain.append(k)
        return chain

    lower = build(order)
    upper = build(order[::-1])
    return lower[:-1] + upper[:-1]


def _dedupe(U: np.ndarray, eps: float):
    """Indices of distinct rows, one representative per eps-cluster."""
    order = np.lexsort((U[:, 1], U[:, 0]))
    keep = [int(order[0])]
    last = U[order[0]]
    for idx in order[1:]:
        if np.max(np.abs(U[idx] - last)) > eps:
            keep.append(int(idx))
            last = U[idx]
    return keep


def _canonical_rotation(surface: SurfaceSpec, X: np.ndarray) -> np.ndarray:
    """Rotation sending the centroid direction of a spherical set to the pole."""
    if surface.kind is not SurfaceKind.SPHERE:
        return np.eye(3)
    c = X.mean(axis=0)
    nc = np.linalg.norm(c)
    if nc < 1e-12 * surface.radius:
        raise NoConvexHullError("point set has no containing open hemisphere")
    rot = rotation_aligning(c / nc, np.array([0.0, 0.0, 1.0]))
    if np.any((X @ rot.T)[:, 2] <= 1e-9 * surface.radius):
        raise NoConvexHullError("point set has no containing open hemisphere")
    return rot


def _hull_eps(U: np.ndarray) -> float:
    """Collinearity threshold for cross products, scaled to the point spread."""
    extent = float(np.max(U.max(axis=0) - U.min(axis=0))) if U.shape[0] > 1 else 0.0
    return 1e-12 * max(extent * extent, 1e-300)


def convex_hull(points) -> ConvexRegion:
    """Convex hull of surface points (hull of the chart images, mapped back)."""
    points = list(points)
    if not points:
        raise GeometryError("need at least one point")
    surface = points[0].surface
    for p in points[1:]:
        if p.surface != surface:
            raise GeometryError("all points must lie on one surface")
    X = np.array([p.coords for p in points])
    rot = _canonical_rotation(surface, X)
    U = to_chart_coords(surface, X @ rot.T)

    extent = float(np.max(U.max(axis=0) - U.min(axis=0))) if len(points) > 1 else 0.0
    eps = _hull_eps(U)
    distinct = _dedupe(U, 1e-14 * max(extent, 1e-300))

    if len(distinct) == 1:
        i = distinct[0]
        return ConvexRegion(surface, [points[i]], True, rot, U[[i]])
    if len(distinct) == 2:
        i, j = distinct
        return ConvexRegion(surface, [points[i], points[j]], True, rot, U[[i, j]])

    idx = _planar_hull_indices(U[distinct], eps)
    if len(idx) < 3:
        # all chart points collinear: degenerate segment between the extremes
        sub = U[distinct]
        d = sub - sub.mean(axis=0)
        axis = d[np.argmax((d * d).sum(axis=1))]
        proj = d @ axis
        i = distinct[int(np.argmin(proj))]
        j = distinct[int(np.argmax(proj))]
        return ConvexRegion(surface, [points[i], points[j]], True, rot, U[[i, j]])
    verts = [points[distinct[k]] for k in idx]
    return ConvexRegion(surface, verts, False, rot, U[[distinct[k] for k in idx]])


def perimeter(region: ConvexRegion) -> float:
    """Geodesic perimeter; a degenerate segment counts its boundary twice."""
    verts = region.hull_vertices
    if len(verts) == 1:
        return 0.0
    if region.degenerate_flag:
        total = sum(distance(verts[k], verts[k + 1]) for k in range(len(verts) - 1))
        return 2.0 * total
    total = 0.0
    for k in range(len(verts)):
        total += distance(verts[k], verts[(k + 1) % len(verts)])
    return total


def contains(region: ConvexRegion, p: SurfacePoint, tol: float = 0.0) -> bool:
    """Whether the chart image of p lies in the chart polygon inflated by tol."""
    if p.surface != region.surface:
        raise GeometryError("point lies on a different surface")
    x = p.coords
    if region._rotation is not None:
        x = region._rotation @ x
    if region.surface.kind is SurfaceKind.SPHERE and x[2] <= 0.0:
        raise OutOfChartError("point not in the hull's hemisphere")
    u = to_chart_coords(region.surface, x)
    poly = region._chart
    if region.degenerate_flag:
        if poly.shape[0] == 1:
            return float(np.linalg.norm(u - poly[0])) <= tol
        a, b = poly[0], poly[1]
        ab = b - a
        t = float(np.clip((u - a) @ ab / (ab @ ab), 0.0, 1.0))
        return float(np.linalg.norm(u - (a + t * ab))) <= tol
    m = poly.shape[0]
    for k in range(m):
        a = poly[k]
        b = poly[(k + 1) % m]
        e = b - a
        ne = np.linalg.norm(e)
        cross = e[0] * (u[1] - a[1]) - e[1] * (u[0] - a[0])
        if cross < -tol * ne:
            return False
    return True


# ---------------------------------------------------------------------------
# projecting sectors


def _minimal_arc(angles: np.ndarray):
    """Smallest closed angular interval containing all directions.

    Returns (width, theta_start, theta_end) with the interval swept ccw from
    start to end.  Raises NoSectorError when the directions fit in no
    half-plane (width > pi).
    """
    phi = np.sort(np.mod(angles, 2.0 * math.pi))
    gaps = np.diff(phi, append=phi[0] + 2.0 * math.pi)
    k = int(np.argmax(gaps))
    width = 2.0 * math.pi - gaps[k]
    if width > math.pi + 1e-9:
        raise NoSectorError(f"direction spread {width:.6f} exceeds a half-plane")
    start = phi[(k + 1) % phi.size]
    return width, start, start + width


@dataclass(eq=False)
class ProjectingSector:
    """Smallest closed convex geodesic sector at a curve point containing the prefix."""

    vertex: SurfacePoint
    v1: TangentVector
    v2: TangentVector
    opening: float


def _sector_chart_angles(U: np.ndarray, i: int, back_dir: np.ndarray):
    """Chart angles of directions from chart vertex U[i] to the prefix U[:i].

    back_dir, the chart direction of the backward tangent, joins the set as
    the limiting direction of the immediate past.
    """
    d = U[:i] - U[i]
    norms = np.hypot(d[:, 0], d[:, 1])
    scale = max(norms.max(initial=0.0), 1e-300)
    d = d[norms > 1e-13 * max(1.0, scale)]
    angles = np.arctan2(d[:, 1], d[:, 0])
    back = math.atan2(back_dir[1], back_dir[0])
    return np.append(angles, back)


def projecting_sector(curve, s: float) -> ProjectingSector:
    """Projecting sector of a sampled curve at the sample with arc value s.

    The prefix must be nonempty (s past the first sample).  For a geodesic
    prefix the sector degenerates to opening 0 along the backward tangent.
    """
    surface = curve.surface
    i = int(np.argmin(np.abs(curve.s - s)))
    if abs(curve.s[i] - s) > 1e-9 * max(1.0, abs(s)):
        raise GeometryError(f"s={s} is not a sample of the curve")
    if i == 0:
        raise GeometryError("prefix is empty at the first sample")

    X = curve.points[: i + 1]
    rot = _canonical_rotation(surface, X)
    U = to_chart_coords(surface, X @ rot.T)
    t_rot = rot @ curve.tangents[i]
    back_chart = -chart_pushforward(surface, rot @ curve.points[i], t_rot)

    width, a_start, a_end = _minimal_arc(_sector_chart_angles(U, i, back_chart))
    vert = SurfacePoint(surface, curve.points[i])

    def ray(theta):
        du = np.array([math.cos(theta), math.sin(theta)])
        v = rot.T @ chart_pullback(surface, U[i], du)
        v = v / surface.metric_norm(v)
        return TangentVector(vert, v)

    va, vb = ray(a_start), ray(a_end)
    if width < 1e-12:
        opening = 0.0
        va = vb
    else:
        opening = angle_between(va, vb)
    minus_t = TangentVector(vert, -curve.tangents[i])
    # convention: v2 is the boundary ray nearer the backward tangent
    if angle_between(va, minus_t) < angle_between(vb, minus_t):
        va, vb = vb, va
    return ProjectingSector(vert, va, vb, opening)


def sector_phi_angles(curve, i: int, rot: np.ndarray, U: np.ndarray):
    """(phi1, phi2, opening) at sample i: phi_j = pi - angle(tangent, v_j).

    Shared fast path for the length-bound verifier: the caller supplies one
    canonical rotation and the chart image of the whole curve.
    """
    surface = curve.surface
    t_rot = rot @ curve.tangents[i]
    back_chart = -chart_pushforward(surface, rot @ curve.points[i], t_rot)
    width, a_start, a_end = _minimal_arc(_sector_chart_angles(U, i, back_chart))
    vert = SurfacePoint(surface, curve.points[i])
    tvec = TangentVector(vert, curve.tangents[i])

    def ray(theta):
        du = np.array([math.cos(theta), math.sin(theta)])
        v = rot.T @ chart_pullback(surface, U[i], du)
        return TangentVector(vert, v / surface.metric_norm(v))

    va, vb = ray(a_start), ray(a_end)
    if width < 1e-12:
        vb = va
    phis = sorted(
        (math.pi - angle_between(tvec, va), math.pi - angle_between(tvec, vb))
    )
    opening = 0.0 if width < 1e-12 else angle_between(va, vb)
    return phis[0], phis[1], opening
