"""Curves of steepest-descent type on constant-curvature surfaces.

Length bounds via convex hull perimeters, involutes and self-involutes, and
the constructive solver for spherical self-involute spirals.
"""

from .surface_kernel import (
    ChartPoint,
    DegenerateInputError,
    GeometryError,
    OutOfChartError,
    RangeError,
    SurfaceKind,
    SurfacePoint,
    SurfaceSpec,
    TangentVector,
    angle_between,
    chart_metric_at,
    distance,
    euclidean,
    from_chart,
    geodesic_point,
    hyperbolic,
    sphere,
    to_chart,
    triangle_solve,
)
from .convex_geometry import (
    ConvexRegion,
    NoConvexHullError,
    NoSectorError,
    ProjectingSector,
    contains,
    convex_hull,
    perimeter,
    projecting_sector,
)
from .descent_curves import (
    Curve,
    GenerationError,
    PerimeterProfile,
    distance_derivative,
    generate_descent_curve,
    is_g_curve,
    perimeter_profile,
    read_curve_csv,
    verify_length_bound,
    write_curve_csv,
)
from .involute_engine import (
    FunctionTable,
    FundamentalPair,
    MonotonicityError,
    NotAlmostSelfInvoluteError,
    dilate,
    frenet_data,
    fundamental_pair,
    involute,
    involute_points,
    limit_spiral,
    system_residual,
)
from .self_involute_solver import (
    BuildResult,
    ConvergenceError,
    ClaimViolationError,
    IterationParams,
    ParameterSearchError,
    SelfInvoluteProfile,
    SolverConfig,
    ThetaSolution,
    build_self_involute,
    choose_parameters,
    integrate_curve,
    planar_spiral_profile,
    profile_from_theta,
    solve_fundamental_a,
    theta_iterate,
    verify_maximal_length,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
