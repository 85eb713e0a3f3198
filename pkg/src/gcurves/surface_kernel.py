"""Embedded geometry kernel for the three constant-curvature model surfaces.

The three surfaces are realized as subsets of R^3:

* the sphere of radius R,            x.x = R^2               (curvature +1/R^2)
* the plane x3 = 1,                                          (curvature 0)
* the upper hyperboloid sheet,       x.I21.x = -R^2, x3 > 0  (curvature -1/R^2)

where I21 = diag(1, 1, -1) is the Lorentz form.  Each curved surface comes
with a central-projection chart onto the plane x3 = 1 (gnomonic chart for the
sphere, Klein disc for the hyperboloid) under which geodesics are straight
lines.  Everything downstream (hulls, half-plane predicates, sectors) rides on
that straightness.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

EPS_EMB = 1e-10
EPS_TRIG = 1e-10

_LORENTZ_SIGNS = np.array([1.0, 1.0, -1.0])


class GeometryError(ValueError):
    """Base class for geometry contract violations."""


class SurfaceMismatchError(GeometryError):
    """Operands live on different surfaces."""


class OutOfChartError(GeometryError):
    """Point has no image in the projective chart."""


class DegenerateInputError(GeometryError):
    """Input is geometrically degenerate (antipodal pair, zero vector, ...)."""


class RangeError(GeometryError):
    """Parameter outside the range supported by the closed forms."""


class SurfaceKind(enum.Enum):
    SPHERE = "sphere"
    EUCLIDEAN = "euclidean"
    HYPERBOLIC = "hyperbolic"


@dataclass(frozen=True)
class SurfaceSpec:
    """Which model surface, and its radius (ignored for the Euclidean plane)."""

    kind: SurfaceKind
    radius: float = 1.0

    def __post_init__(self):
        if not self.radius > 0.0:
            raise GeometryError(f"radius must be positive, got {self.radius}")

    def curvature(self) -> float:
        if self.kind is SurfaceKind.SPHERE:
            return 1.0 / self.radius**2
        if self.kind is SurfaceKind.HYPERBOLIC:
            return -1.0 / self.radius**2
        return 0.0

    def metric_dot(self, v, w):
        """Ambient inner product inducing the surface metric (Lorentzian for L^2)."""
        v = np.asarray(v, dtype=float)
        w = np.asarray(w, dtype=float)
        if self.kind is SurfaceKind.HYPERBOLIC:
            return (v * _LORENTZ_SIGNS * w).sum(axis=-1)
        return (v * w).sum(axis=-1)

    def metric_norm(self, v):
        return np.sqrt(np.maximum(self.metric_dot(v, v), 0.0))

    def __str__(self):
        if self.kind is SurfaceKind.EUCLIDEAN:
            return "euclidean"
        return f"{self.kind.value}(R={self.radius:g})"


def sphere(radius: float = 1.0) -> SurfaceSpec:
    return SurfaceSpec(SurfaceKind.SPHERE, radius)


def euclidean() -> SurfaceSpec:
    return SurfaceSpec(SurfaceKind.EUCLIDEAN, 1.0)


def hyperbolic(radius: float = 1.0) -> SurfaceSpec:
    return SurfaceSpec(SurfaceKind.HYPERBOLIC, radius)


@dataclass(eq=False)
class SurfacePoint:
    """A point of the surface in embedding coordinates."""

    surface: SurfaceSpec
    coords: np.ndarray

    def __post_init__(self):
        self.coords = np.asarray(self.coords, dtype=float).reshape(3)

    def validate(self, eps: float = EPS_EMB):
        x = self.coords
        R = self.surface.radius
        kind = self.surface.kind
        if kind is SurfaceKind.SPHERE:
            err = abs(x @ x - R * R)
        elif kind is SurfaceKind.HYPERBOLIC:
            err = abs(self.surface.metric_dot(x, x) + R * R)
            if x[2] <= 0.0:
                raise GeometryError("hyperboloid point must have x3 > 0")
        else:
            err = abs(x[2] - 1.0)
        scale = max(1.0, R * R)
        if err > eps * scale:
            raise GeometryError(f"point off the surface by {err:.3e}")
        return self


@dataclass(eq=False)
class TangentVector:
    """A vector tangent to the surface at a base point."""

    base: SurfacePoint
    dir: np.ndarray

    def __post_init__(self):
        self.dir = np.asarray(self.dir, dtype=float).reshape(3)

    @property
    def surface(self) -> SurfaceSpec:
        return self.base.surface

    def norm(self) -> float:
        return float(self.surface.metric_norm(self.dir))

    def validate(self, eps: float = EPS_EMB):
        surf = self.surface
        x = self.base.coords
        if surf.kind is SurfaceKind.EUCLIDEAN:
            err = abs(self.dir[2])
        else:
            err = abs(surf.metric_dot(x, self.dir)) / max(surf.radius, 1.0)
        if err > eps * max(1.0, self.norm()):
            raise GeometryError(f"vector not tangent, defect {err:.3e}")
        return self


@dataclass(eq=False)
class ChartPoint:
    """Chart image: gnomonic for the sphere, Klein disc for L^2, identity for E^2."""

    surface: SurfaceSpec
    uv: np.ndarray

    def __post_init__(self):
        self.uv = np.asarray(self.uv, dtype=float).reshape(2)

    def validate(self):
        if not np.all(np.isfinite(self.uv)):
            raise OutOfChartError("chart coordinates must be finite")
        if self.surface.kind is SurfaceKind.HYPERBOLIC and self.uv @ self.uv >= 1.0:
            raise OutOfChartError("Klein coordinates must lie inside the unit disc")
        return self


def _check_same_surface(a, b):
    if a.surface != b.surface:
        raise SurfaceMismatchError(f"surfaces differ: {a.surface} vs {b.surface}")


def project_to_surface(surface: SurfaceSpec, x) -> np.ndarray:
    """Renormalize a nearby ambient vector onto the surface (drift control)."""
    x = np.asarray(x, dtype=float)
    R = surface.radius
    if surface.kind is SurfaceKind.SPHERE:
        return x * (R / np.linalg.norm(x))
    if surface.kind is SurfaceKind.HYPERBOLIC:
        q = -surface.metric_dot(x, x)
        if q <= 0.0:
            raise GeometryError("cannot project: vector not timelike")
        return x * (R / math.sqrt(q))
    return np.array([x[0], x[1], 1.0])


def project_to_tangent(surface: SurfaceSpec, x, v) -> np.ndarray:
    """Remove the component of v normal to the surface at x."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    R = surface.radius
    if surface.kind is SurfaceKind.SPHERE:
        return v - x * (x @ v) / (R * R)
    if surface.kind is SurfaceKind.HYPERBOLIC:
        # <x,x>_L = -R^2, so the Lorentz-orthogonal projection adds the defect back
        return v + x * surface.metric_dot(x, v) / (R * R)
    return np.array([v[0], v[1], 0.0])


def geodesic_point(start: SurfacePoint, direction: TangentVector, s: float) -> SurfacePoint:
    """Point of the unit-speed geodesic from `start` with velocity `direction` at arc s.

    Closed forms: cos/sin on the sphere, cosh/sinh on the hyperboloid,
    straight line on the plane.  On the sphere |s| must stay below pi*R.
    """
    surf = start.surface
    _check_same_surface(start, direction)
    nrm = direction.norm()
    if abs(nrm - 1.0) > 1e-8:
        raise GeometryError(f"direction must be unit, |v| = {nrm}")
    x = start.coords
    v = direction.dir
    R = surf.radius
    if surf.kind is SurfaceKind.SPHERE:
        if abs(s) >= math.pi * R:
            raise RangeError(f"|s| = {abs(s)} exceeds injectivity range pi*R = {math.pi * R}")
        c = math.cos(s / R)
        sn = math.sin(s / R)
        return SurfacePoint(surf, c * x + sn * (R * v))
    if surf.kind is SurfaceKind.HYPERBOLIC:
        c = math.cosh(s / R)
        sn = math.sinh(s / R)
        return SurfacePoint(surf, c * x + sn * (R * v))
    return SurfacePoint(surf, x + s * v)


def geodesic_points(start: SurfacePoint, direction: TangentVector, s_values) -> np.ndarray:
    """Vectorized geodesic_point: (n,) arc values -> (n,3) coordinates."""
    surf = start.surface
    s = np.asarray(s_values, dtype=float)
    x = start.coords
    v = direction.dir
    R = surf.radius
    if surf.kind is SurfaceKind.SPHERE:
        return np.outer(np.cos(s / R), x) + np.outer(np.sin(s / R), R * v)
    if surf.kind is SurfaceKind.HYPERBOLIC:
        return np.outer(np.cosh(s / R), x) + np.outer(np.sinh(s / R), R * v)
    return x[None, :] + np.outer(s, v)


def distance(p: SurfacePoint, q: SurfacePoint) -> float:
    """Geodesic distance.  Antipodal sphere pairs are rejected as degenerate."""
    _check_same_surface(p, q)
    surf = p.surface
    x, y = p.coords, q.coords
    R = surf.radius
    if surf.kind is SurfaceKind.SPHERE:
        # atan2 form: well conditioned near 0 (acos is not)
        cross = np.linalg.norm(np.cross(x, y))
        dot = float(x @ y)
        ang = math.atan2(cross, dot)
        if math.pi - ang < 1e-9:
            raise DegenerateInputError("antipodal points have no unique segment")
        return R * ang
    if surf.kind is SurfaceKind.HYPERBOLIC:
        # difference-vector form: well conditioned near 0, exact at range
        # (acosh of the clamped Gram value loses half the digits for nearby points)
        q = max(float(surf.metric_dot(x - y, x - y)), 0.0)
        return 2.0 * R * math.asinh(math.sqrt(q) / (2.0 * R))
    return float(np.linalg.norm(x - y))


def pairwise_distances(surface: SurfaceSpec, X: np.ndarray) -> np.ndarray:
    """All pairwise geodesic distances of points given as an (n,3) array."""
    R = surface.radius
    if surface.kind is SurfaceKind.SPHERE:
        dots = np.clip((X @ X.T) / (R * R), -1.0, 1.0)
        return R * np.arccos(dots)
    if surface.kind is SurfaceKind.HYPERBOLIC:
        XL = X * _LORENTZ_SIGNS
        c = np.maximum(-(XL @ X.T) / (R * R), 1.0)
        return R * np.arccosh(c)
    diff = X[:, None, :] - X[None, :, :]
    return np.linalg.norm(diff, axis=-1)


def log_direction(p: SurfacePoint, q: SurfacePoint) -> TangentVector:
    """Unit initial direction of the geodesic segment from p to q."""
    _check_same_surface(p, q)
    surf = p.surface
    x, y = p.coords, q.coords
    d = distance(p, q)
    if d < 1e-14:
        raise DegenerateInputError("coincident points have no direction")
    R = surf.radius
    if surf.kind is SurfaceKind.SPHERE:
        t = d / R
        v = (y - math.cos(t) * x) / (R * math.sin(t))
    elif surf.kind is SurfaceKind.HYPERBOLIC:
        t = d / R
        v = (y - math.cosh(t) * x) / (R * math.sinh(t))
    else:
        v = (y - x) / d
    return TangentVector(p, v)


def angle_between(v: TangentVector, w: TangentVector) -> float:
    """Metric angle in [0, pi] between two tangent vectors at the same point."""
    if v.surface != w.surface:
        raise SurfaceMismatchError("tangent vectors on different surfaces")
    if not np.allclose(v.base.coords, w.base.coords, atol=1e-9):
        raise GeometryError("tangent vectors must share a base point")
    surf = v.surface
    nv, nw = v.norm(), w.norm()
    if nv < 1e-14 or nw < 1e-14:
        raise GeometryError("angle of a zero vector is undefined")
    c = surf.metric_dot(v.dir, w.dir) / (nv * nw)
    return math.acos(min(1.0, max(-1.0, float(c))))


def oriented_normal(surface: SurfaceSpec, x, t) -> np.ndarray:
    """Unit normal n with (x, t, n) positively oriented in R^3.

    In the chart this is the left normal of the tangent direction, which fixes
    the sign convention of the geodesic curvature everywhere in the package.
    """
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    R = surface.radius
    if surface.kind is SurfaceKind.SPHERE:
        return np.cross(x, t) / R
    if surface.kind is SurfaceKind.HYPERBOLIC:
        return _LORENTZ_SIGNS * np.cross(x, t) / R
    return np.array([-t[1], t[0], 0.0])


def oriented_normals(surface: SurfaceSpec, X: np.ndarray, T: np.ndarray) -> np.ndarray:
    R = surface.radius
    if surface.kind is SurfaceKind.SPHERE:
        return np.cross(X, T) / R
    if surface.kind is SurfaceKind.HYPERBOLIC:
        return np.cross(X, T) * _LORENTZ_SIGNS / R
    out = np.zeros_like(T)
    out[:, 0] = -T[:, 1]
    out[:, 1] = T[:, 0]
    return out


# ---------------------------------------------------------------------------
# charts


def to_chart_coords(surface: SurfaceSpec, X) -> np.ndarray:
    """Chart coordinates of an (..., 3) array of embedding coordinates."""
    X = np.asarray(X, dtype=float)
    if surface.kind is SurfaceKind.EUCLIDEAN:
        return X[..., :2].copy()
    x3 = X[..., 2]
    if surface.kind is SurfaceKind.SPHERE and np.any(x3 <= 0.0):
        raise OutOfChartError("gnomonic chart needs x3 > 0 (open upper hemisphere)")
    return X[..., :2] / x3[..., None]


def from_chart_coords(surface: SurfaceSpec, U) -> np.ndarray:
    """Embedding coordinates of an (..., 2) array of chart coordinates."""
    U = np.asarray(U, dtype=float)
    r2 = (U * U).sum(axis=-1)
    R = surface.radius
    if surface.kind is SurfaceKind.EUCLIDEAN:
        out = np.concatenate([U, np.ones(U.shape[:-1] + (1,))], axis=-1)
        return out
    if surface.kind is SurfaceKind.HYPERBOLIC and np.any(r2 >= 1.0):
        raise OutOfChartError("Klein coordinates must lie inside the unit disc")
    if surface.kind is SurfaceKind.SPHERE:
        w = np.sqrt(1.0 + r2)
    else:
        w = np.sqrt(1.0 - r2)
    out = np.concatenate([U, np.ones(U.shape[:-1] + (1,))], axis=-1)
    return out * (R / w)[..., None]


def to_chart(p: SurfacePoint) -> ChartPoint:
    return ChartPoint(p.surface, to_chart_coords(p.surface, p.coords))


def from_chart(c: ChartPoint) -> SurfacePoint:
    c.validate()
    return SurfacePoint(c.surface, from_chart_coords(c.surface, c.uv))


def chart_metric_at(c: ChartPoint) -> np.ndarray:
    """Pulled-back surface metric at a chart point, as a 2x2 SPD matrix.

    Sphere:      R^2 [ (1+r^2) I - u u^T ] / (1+r^2)^2
    Klein disc:  R^2 [ (1-r^2) I + u u^T ] / (1-r^2)^2
    Plane:       I

    The spherical form matches the printed pullback metric of the gnomonic
    projection; the Klein form is the analogous pullback through the
    hyperboloid parameterization (derived once symbolically, frozen here, and
    cross-checked in tests against finite differences of the distance).
    """
    c.validate()
    u = c.uv
    r2 = float(u @ u)
    R2 = c.surface.radius**2
    if c.surface.kind is SurfaceKind.SPHERE:
        return R2 * ((1.0 + r2) * np.eye(2) - np.outer(u, u)) / (1.0 + r2) ** 2
    if c.surface.kind is SurfaceKind.HYPERBOLIC:
        return R2 * ((1.0 - r2) * np.eye(2) + np.outer(u, u)) / (1.0 - r2) ** 2
    return np.eye(2)


def chart_metrics(surface: SurfaceSpec, U: np.ndarray) -> np.ndarray:
    """Vectorized chart_metric_at: (n,2) chart points -> (n,2,2) matrices."""
    U = np.asarray(U, dtype=float)
    n = U.shape[0]
    r2 = (U * U).sum(axis=1)
    R2 = surface.radius**2
    eye = np.eye(2)[None, :, :]
    uu = U[:, :, None] * U[:, None, :]
    if surface.kind is SurfaceKind.SPHERE:
        return R2 * ((1.0 + r2)[:, None, None] * eye - uu) / (1.0 + r2)[:, None, None] ** 2
    if surface.kind is SurfaceKind.HYPERBOLIC:
        return R2 * ((1.0 - r2)[:, None, None] * eye + uu) / (1.0 - r2)[:, None, None] ** 2
    return np.broadcast_to(eye, (n, 2, 2)).copy()


def chart_pushforward(surface: SurfaceSpec, x, v) -> np.ndarray:
    """Differential of the chart map applied to a tangent vector at x."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    if surface.kind is SurfaceKind.EUCLIDEAN:
        return v[..., :2].copy()
    x3 = x[..., 2]
    return (v[..., :2] * x3[..., None] - x[..., :2] * v[..., 2][..., None]) / (x3 * x3)[..., None]


def chart_pullback(surface: SurfaceSpec, u, du) -> np.ndarray:
    """Inverse differential: chart velocity du at chart point u -> ambient tangent."""
    u = np.asarray(u, dtype=float)
    du = np.asarray(du, dtype=float)
    R = surface.radius
    r2 = float(u @ u)
    e = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
    if surface.kind is SurfaceKind.EUCLIDEAN:
        return e @ du
    u3 = np.array([u[0], u[1], 1.0])
    if surface.kind is SurfaceKind.SPHERE:
        w = math.sqrt(1.0 + r2)
        jac = R * (e * w * w - np.outer(u3, u)) / w**3
    else:
        w = math.sqrt(1.0 - r2)
        jac = R * (e * w * w + np.outer(u3, u)) / w**3
    return jac @ du


def rotation_aligning(a, b) -> np.ndarray:
    """Rotation matrix taking unit vector a to unit vector b (Rodrigues)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    v = np.cross(a, b)
    c = float(a @ b)
    s = np.linalg.norm(v)
    if s < 1e-15:
        if c > 0.0:
            return np.eye(3)
        # antipodal: rotate pi about any axis orthogonal to a
        axis = np.cross(a, [1.0, 0.0, 0.0])
        if np.linalg.norm(axis) < 1e-6:
            axis = np.cross(a, [0.0, 1.0, 0.0])
        axis /= np.linalg.norm(axis)
        K = np.array([[0, -axis[2], axis[1]], [axis[2], 0, -axis[0]], [-axis[1], axis[0], 0]])
        return np.eye(3) + 2.0 * K @ K
    K = np.array([[0, -v[2], v[1]], [v[2], 0, -v[0]], [-v[1], v[0], 0]])
    return np.eye(3) + K + K @ K * ((1.0 - c) / (s * s))


# ---------------------------------------------------------------------------
# triangle trigonometry


def triangle_solve(surface: SurfaceSpec, a: float, b: float, c: float):
    """Interior angles (alpha, beta, gamma) opposite the sides (a, b, c).

    Uses the side law of cosines of the matching geometry; existence is
    checked first (triangle inequality, and perimeter < 2*pi*R on the sphere).
    """
    sides = (a, b, c)
    if min(sides) <= 0.0:
        raise GeometryError("triangle sides must be positive")
    if a >= b + c or b >= a + c or c >= a + b:
        raise GeometryError(f"triangle inequality fails for sides {sides}")
    R = surface.radius
    if surface.kind is SurfaceKind.SPHERE:
        if a + b + c >= 2.0 * math.pi * R:
            raise GeometryError("spherical triangle perimeter must be < 2*pi*R")
        ra, rb, rc = a / R, b / R, c / R

        def angle(x, y, z):
            num = math.cos(x) - math.cos(y) * math.cos(z)
            den = math.sin(y) * math.sin(z)
            return math.acos(min(1.0, max(-1.0, num / den)))

        return angle(ra, rb, rc), angle(rb, rc, ra), angle(rc, ra, rb)
    if surface.kind is SurfaceKind.HYPERBOLIC:
        ra, rb, rc = a / R, b / R, c / R

        def angle(x, y, z):
            num = math.cosh(y) * math.cosh(z) - math.cosh(x)
            den = math.sinh(y) * math.sinh(z)
            return math.acos(min(1.0, max(-1.0, num / den)))

        return angle(ra, rb, rc), angle(rb, rc, ra), angle(rc, ra, rb)

    def angle(x, y, z):
        return math.acos(min(1.0, max(-1.0, (y * y + z * z - x * x) / (2.0 * y * z))))

    return angle(a, b, c), angle(b, c, a), angle(c, a, b)


def sine_law_ratio(surface: SurfaceSpec, angle: float, side: float) -> float:
    """sin(angle) / f(side), with f = sin, id, sinh matched to the surface."""
    R = surface.radius
    if surface.kind is SurfaceKind.SPHERE:
        return math.sin(angle) / math.sin(side / R)
    if surface.kind is SurfaceKind.HYPERBOLIC:
        return math.sin(angle) / math.sinh(side / R)
    return math.sin(angle) / side


# ---------------------------------------------------------------------------
# random sampling helpers (used by the curve generator and the test suites)


def random_point(surface: SurfaceSpec, rng: np.random.Generator, chart_radius: float = 0.8) -> SurfacePoint:
    """Random surface point with chart image in a disc of the given radius."""
    r = chart_radius * math.sqrt(rng.uniform())
    phi = rng.uniform(0.0, 2.0 * math.pi)
    uv = np.array([r * math.cos(phi), r * math.sin(phi)])
    return SurfacePoint(surface, from_chart_coords(surface, uv))


def random_unit_tangent(p: SurfacePoint, rng: np.random.Generator) -> TangentVector:
    v = project_to_tangent(p.surface, p.coords, rng.standard_normal(3))
    n = p.surface.metric_norm(v)
    if n < 1e-12:
        return random_unit_tangent(p, rng)
    return TangentVector(p, v / n)
