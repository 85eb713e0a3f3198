"""Frenet apparatus, the involute operator, dilation, and the limit spiral.

The involute of an arc-length curve unwinds a geodesic string from its start
point; per curvature sign the unwinding point has the closed forms

    sphere:      cos(s/R) x  - sin(s/R) R t
    plane:       x - s t
    hyperboloid: cosh(s/R) x - sinh(s/R) R t

The involute's own Frenet data follows in closed form too: its tangent is
minus the generating curve's normal, its speed relative to the string
parameter is R sin(s/R) kappa (resp. s kappa, R sinh(s/R) kappa), and its
curvature is cot/1/s/coth of the string parameter.  A curve is (almost)
self-involute when it is congruent to the initial arc of its own involute;
the congruence is encoded by a z-axis orthogonal matrix together with the
limit slope a of the reparameterization map tau.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from .descent_curves import Curve
from .surface_kernel import (
    GeometryError,
    RangeError,
    SurfaceKind,
    SurfaceSpec,
    TangentVector,
    distance,
    geodesic_point,
    log_direction,
    oriented_normal,
    oriented_normals,
    sphere,
    to_chart_coords,
)


class MonotonicityError(GeometryError):
    """Involute arc length fails to increase (needs kappa > 0)."""


class NotAlmostSelfInvoluteError(GeometryError):
    """Congruence fit between a curve and its involute's initial arc failed."""


def string_speed(surface: SurfaceSpec, s):
    """ds~/ds factor of the involute: R sin(s/R), s, or R sinh(s/R)."""
    s = np.asarray(s, dtype=float)
    R = surface.radius
    if surface.kind is SurfaceKind.SPHERE:
        return R * np.sin(s / R)
    if surface.kind is SurfaceKind.HYPERBOLIC:
        return R * np.sinh(s / R)
    return s.copy()


def involute_curvature(surface: SurfaceSpec, s):
    """Closed-form curvature of the involute at string parameter s."""
    s = np.asarray(s, dtype=float)
    R = surface.radius
    if surface.kind is SurfaceKind.SPHERE:
        return (1.0 / R) / np.tan(s / R)
    if surface.kind is SurfaceKind.HYPERBOLIC:
        return (1.0 / R) / np.tanh(s / R)
    return 1.0 / s


# ---------------------------------------------------------------------------
# Frenet data from samples


def frenet_data(curve: Curve, s: float):
    """(tangent, normal, kappa) at a sample, kappa by central differences.

    kappa comes from the covariant derivative of the tangent: t' plus the
    curvature term K <t,t> x pulling the ambient derivative back onto the
    surface, contracted with the oriented normal.
    """
    i = curve.sample_index(s)
    if i == 0 or i == curve.n_samples - 1:
        raise RangeError("frenet_data needs a sample with neighbors on both sides")
    surf = curve.surface
    h_m = curve.s[i] - curve.s[i - 1]
    h_p = curve.s[i + 1] - curve.s[i]
    c_m = -h_p / (h_m * (h_p + h_m))
    c_0 = (h_p - h_m) / (h_p * h_m)
    c_p = h_m / (h_p * (h_p + h_m))
    tdot = c_m * curve.tangents[i - 1] + c_0 * curve.tangents[i] + c_p * curve.tangents[i + 1]
    x = curve.points[i]
    t = curve.tangents[i]
    nabla = tdot + surf.curvature() * float(surf.metric_dot(t, t)) * x
    n = oriented_normal(surf, x, t)
    kappa = float(surf.metric_dot(nabla, n))
    p = curve.point(i)
    return TangentVector(p, t), TangentVector(p, n), kappa


# ---------------------------------------------------------------------------
# the involute operator


def involute_points(curve: Curve) -> np.ndarray:
    """Involute positions at every sample, by the closed forms (total function)."""
    surf = curve.surface
    R = surf.radius
    s = curve.s
    X = curve.points
    T = curve.tangents
    if surf.kind is SurfaceKind.SPHERE:
        return np.cos(s / R)[:, None] * X - np.sin(s / R)[:, None] * (R * T)
    if surf.kind is SurfaceKind.HYPERBOLIC:
        return np.cosh(s / R)[:, None] * X - np.sinh(s / R)[:, None] * (R * T)
    return X - s[:, None] * T


def involute(curve: Curve) -> Curve:
    """The involute as a curve in its own arc-length parameterization.

    Requires kappa > 0 at the samples so the involute arc length increases;
    use involute_points for curves (geodesics) where it degenerates to a
    point.  Samples at string parameter 0 are dropped (the involute curvature
    blows up there).  On the sphere the closed forms for the involute frame
    hold for s < pi R / 2 only, which is enforced.
    """
    surf = curve.surface
    R = surf.radius
    if surf.kind is SurfaceKind.SPHERE and curve.s[-1] >= math.pi * R / 2.0:
        raise RangeError("involute frame formulas require s < pi R / 2 on the sphere")
    keep = slice(1, None) if curve.s[0] == 0.0 else slice(None)
    if np.any(curve.kappa[keep] <= 0.0):
        raise MonotonicityError("involute arc length needs kappa > 0 at all samples")
    speed = string_speed(surf, curve.s) * curve.kappa
    s_tilde = np.concatenate([[0.0], np.cumsum((speed[1:] + speed[:-1]) / 2.0 * np.diff(curve.s))])
    pts = involute_points(curve)
    # the generating normal is tangent at the involute point too, and the
    # involute's unit tangent is its negative
    tans = -oriented_normals(surf, curve.points, curve.tangents)
    kap = involute_curvature(surf, curve.s[keep])
    out = Curve(surf, s_tilde[keep], pts[keep], tans[keep], kap)
    if np.any(np.diff(out.s) <= 0.0):
        raise MonotonicityError("involute arc length not strictly increasing")
    return out


def involute_normals(curve: Curve) -> np.ndarray:
    """Closed-form unit normals of the involute at each string parameter."""
    surf = curve.surface
    R = surf.radius
    s = curve.s
    X = curve.points
    T = curve.tangents
    if surf.kind is SurfaceKind.SPHERE:
        return np.sin(s / R)[:, None] * X / R + np.cos(s / R)[:, None] * T
    if surf.kind is SurfaceKind.HYPERBOLIC:
        return np.sinh(s / R)[:, None] * X / R + np.cosh(s / R)[:, None] * T
    return T.copy()


# ---------------------------------------------------------------------------
# function tables and the self-involute system residual


@dataclass(eq=False)
class FunctionTable:
    """Sampled function with an optional high-accuracy off-grid evaluator.

    Plain tables interpolate monotonically (PCHIP).  Tables produced by the
    self-involute solver carry closed-form evaluators riding on the solved
    profile, which is what makes residuals at the 1e-6 scale measurable next
    to curvatures of order 1/s.
    """

    grid: np.ndarray
    values: np.ndarray
    evaluator: object = None
    domain: tuple | None = None

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float).reshape(-1)
        self.values = np.asarray(self.values, dtype=float).reshape(-1)
        if self.grid.size != self.values.size:
            raise GeometryError("grid/value length mismatch")
        if np.any(np.diff(self.grid) <= 0.0):
            raise GeometryError("grid must be strictly increasing")
        self._pchip = None
        if self.domain is None:
            self.domain = (float(self.grid[0]), float(self.grid[-1]))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        lo, hi = self.domain
        if np.any(x < lo - 1e-12) or np.any(x > hi + 1e-12):
            raise GeometryError(f"query outside table domain [{lo}, {hi}]")
        if self.evaluator is not None:
            return self.evaluator(x)
        if self._pchip is None:
            self._pchip = PchipInterpolator(self.grid, self.values)
        return self._pchip(x)


@dataclass
class SystemResidual:
    ode: float      # max |tau' - string_speed * kappa|
    closure: float  # max |kappa(tau_s) - involute_curvature(s)|

    @property
    def max(self) -> float:
        return max(self.ode, self.closure)


def system_residual(kappa: FunctionTable, tau: FunctionTable, surface: SurfaceSpec) -> SystemResidual:
    """Residuals of the self-involute system on the tau grid.

    tau' is measured by central differences; kappa at the shifted points
    tau_s through the table's interpolation.
    """
    s = tau.grid
    tv = tau.values
    if np.any(np.diff(tv) <= 0.0):
        raise GeometryError("tau must be strictly increasing")
    h_m = s[1:-1] - s[:-2]
    h_p = s[2:] - s[1:-1]
    tdot = (
        -h_p / (h_m * (h_p + h_m)) * tv[:-2]
        + (h_p - h_m) / (h_p * h_m) * tv[1:-1]
        + h_m / (h_p * (h_p + h_m)) * tv[2:]
    )
    if np.allclose(kappa.grid.shape, s.shape) and np.array_equal(kappa.grid, s):
        kap_on_grid = kappa.values
    else:
        kap_on_grid = kappa(s)
    ode = float(np.max(np.abs(tdot - string_speed(surface, s[1:-1]) * kap_on_grid[1:-1])))
    closure = float(np.max(np.abs(kappa(tv) - involute_curvature(surface, s))))
    return SystemResidual(ode=ode, closure=closure)


# ---------------------------------------------------------------------------
# dilation and the Euclidean limit spiral


def dilate(curve: Curve, lam: float, truncate: bool = True) -> Curve:
    """Dilation of a spherical curve onto the sphere of radius lam * R.

    The dilated curve s -> lam * eta(s / lam) is arc-length over
    [0, lam * L]; with `truncate` (the default, matching the construction the
    dilation serves) only its initial arc of the original length L is kept.
    Curvature scales by 1/lam.
    """
    if curve.surface.kind is not SurfaceKind.SPHERE:
        raise GeometryError("dilation is defined for spherical curves")
    if not lam > 0.0:
        raise GeometryError("lambda must be positive")
    if lam == 1.0:
        return Curve(curve.surface, curve.s.copy(), curve.points.copy(), curve.tangents.copy(), curve.kappa.copy())
    L = curve.s[-1]
    keep = curve.s <= L / lam + 1e-15 if truncate else np.ones(curve.n_samples, dtype=bool)
    if keep.sum() < 2:
        raise GeometryError("dilated truncation keeps fewer than 2 samples")
    new_surf = sphere(lam * curve.surface.radius)
    return Curve(
        new_surf,
        lam * curve.s[keep],
        lam * curve.points[keep],
        curve.tangents[keep].copy(),
        curve.kappa[keep] / lam,
    )


def limit_spiral(a: float, L: float, s_min: float | None = None, turn_step: float = 0.02) -> Curve:
    """The planar logarithmic spiral with curvature a/s, arc-length sampled.

    This is the mirror orientation of the classical parameterization, so its
    signed curvature under this package's left-normal frame is +a/s.  The
    sample grid is geometric: constant turning per step.
    """
    if not a > 1.0:
        raise GeometryError("spiral parameter a must exceed 1")
    if not L > 0.0:
        raise GeometryError("spiral length must be positive")
    if s_min is None:
        s_min = 1e-4 * L
    n = min(int(math.ceil(a * math.log(L / s_min) / turn_step)) + 1, 200_000)
    s = np.geomspace(s_min, L, n)
    c = math.sqrt(1.0 + a * a)
    theta = a * np.log(s / c)
    r = s / c
    pts = np.stack([r * np.cos(theta), r * np.sin(theta), np.ones(n)], axis=1)
    tans = np.stack(
        [
            (np.cos(theta) - a * np.sin(theta)) / c,
            (np.sin(theta) + a * np.cos(theta)) / c,
            np.zeros(n),
        ],
        axis=1,
    )
    from .surface_kernel import euclidean

    return Curve(euclidean(), s, pts, tans, a / s)


# ---------------------------------------------------------------------------
# fundamental pairs


@dataclass
class FundamentalPair:
    """Congruence data of an almost self-involute.

    `a` is the limit of tau' at the start; the z-axis orthogonal matrix built
    from (rotation_angle, reflect) maps the curve onto the initial arc of its
    own involute.  rotation_angle == 0 with reflect == False means the curve
    is self-involute.
    """

    a: float
    rotation_angle: float
    reflect: bool
    fit_residual: float = 0.0

    def matrix(self) -> np.ndarray:
        c, sn = math.cos(self.rotation_angle), math.sin(self.rotation_angle)
        if self.reflect:
            return np.array([[c, sn, 0.0], [sn, -c, 0.0], [0.0, 0.0, 1.0]])
        return np.array([[c, -sn, 0.0], [sn, c, 0.0], [0.0, 0.0, 1.0]])


def _interp_on_curve(curve: Curve, sigma: np.ndarray) -> np.ndarray:
    """Points of the piecewise-geodesic interpolation at arc values sigma."""
    out = np.empty((sigma.size, 3))
    idx = np.clip(np.searchsorted(curve.s, sigma) - 1, 0, curve.n_samples - 2)
    for k in range(sigma.size):
        i = idx[k]
        p = curve.point(i)
        q = curve.point(i + 1)
        if sigma[k] <= curve.s[i] + 1e-15:
            out[k] = curve.points[i]
            continue
        d = distance(p, q)
        frac = (sigma[k] - curve.s[i]) / (curve.s[i + 1] - curve.s[i])
        out[k] = geodesic_point(p, log_direction(p, q), frac * d).coords
    return out


def fundamental_pair(
    curve: Curve,
    fit_fraction: float = 0.1,
    residual_tol: float | None = None,
) -> FundamentalPair:
    """Extract (a, rotation) aligning a curve with its involute's initial arc.

    `a` comes from a linear fit of tau' = string_speed * kappa over the first
    `fit_fraction` of samples, extrapolated to the start.  The alignment is a
    least-squares fit over chart coordinates of matched arc-length samples;
    both z-rotations and the reflected family are tried, lower residual wins
    (ties prefer the pure rotation).
    """
    surf = curve.surface
    if surf.kind is SurfaceKind.HYPERBOLIC:
        raise GeometryError("fundamental pairs are defined on the sphere and the plane")
    R = surf.radius
    pole = np.array([0.0, 0.0, R if surf.kind is SurfaceKind.SPHERE else 1.0])
    if np.linalg.norm(curve.points[0] - pole) > 0.02 * max(R, 1.0):
        raise GeometryError("curve must start at the canonical chart pole")
    if np.any(curve.kappa <= 0.0):
        raise GeometryError("fundamental pair needs kappa > 0")

    tau_dot = string_speed(surf, curve.s) * curve.kappa
    n_fit = max(3, int(math.ceil(fit_fraction * curve.n_samples)))
    coef = np.polyfit(curve.s[:n_fit], tau_dot[:n_fit], 1)
    slope, a = float(coef[0]), float(coef[1])
    if not a > 1.0:
        raise GeometryError(f"extrapolated tau'(0) = {a:.6f} should exceed 1")
    tau0 = a * curve.s[0] + slope * curve.s[0] ** 2 / 2.0
    sigma = tau0 + np.concatenate(
        [[0.0], np.cumsum((tau_dot[1:] + tau_dot[:-1]) / 2.0 * np.diff(curve.s))]
    )

    P = involute_points(curve)
    mask = sigma <= curve.s[-1] + 1e-15
    if mask.sum() < 8:
        raise NotAlmostSelfInvoluteError("too few matched samples for the congruence fit")
    targets = _interp_on_curve(curve, sigma[mask])
    x = to_chart_coords(surf, targets)
    y = to_chart_coords(surf, P[mask])

    def procrustes(xs):
        dot = float((xs * y).sum())
        cross = float((xs[:, 0] * y[:, 1] - xs[:, 1] * y[:, 0]).sum())
        theta = math.atan2(cross, dot)
        c, sn = math.cos(theta), math.sin(theta)
        rx = np.stack([c * xs[:, 0] - sn * xs[:, 1], sn * xs[:, 0] + c * xs[:, 1]], axis=1)
        return theta, float(((rx - y) ** 2).sum())

    theta_rot, res_rot = procrustes(x)
    x_ref = np.stack([x[:, 0], -x[:, 1]], axis=1)
    theta_ref, res_ref = procrustes(x_ref)
    if res_ref < res_rot - 1e-12:
        reflect, theta, res = True, theta_ref, res_ref
    else:
        reflect, theta, res = False, theta_rot, res_rot
    rms = math.sqrt(res / mask.sum())
    scale = math.sqrt(float((y**2).sum()) / mask.sum())
    if residual_tol is None:
        residual_tol = 0.05 * max(scale, 1e-9)
    if rms > residual_tol:
        raise NotAlmostSelfInvoluteError(
            f"congruence fit residual {rms:.3e} exceeds tolerance {residual_tol:.3e}"
        )
    theta = math.remainder(theta, 2.0 * math.pi)
    if theta <= -math.pi:
        theta += 2.0 * math.pi
    return FundamentalPair(a, theta, reflect, rms)
