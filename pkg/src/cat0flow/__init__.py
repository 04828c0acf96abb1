"""Descent curves of convex functionals on CAT(0) spaces.

The library computes proximal descent steps and the curves they generate
(fixed-time and time-dependent), chases moving convex targets, and finds
barycenters, on four exact model geometries: Euclidean space, the closed
quadrant, finite metric trees, and products of these.
"""

from __future__ import annotations

from .errors import (
    Cat0FlowError,
    CapabilityError,
    ConfigError,
    ContractError,
    DataError,
    DomainError,
    RegionTooSmallError,
    SolverError,
    StepSizeError,
    UsageError,
    ValidationError,
)
from .functionals import (
    Functional,
    HoelderData,
    linear_drift,
    min_coordinate,
    moving_min,
    sum_squared,
    weighted_sum,
)
from .geometry import (
    EuclideanSpace,
    ProductSpace,
    QuadrantSpace,
    TangentVector,
    TreeGerm,
    TreePoint,
    TreeSpace,
)
from .flow import (
    SchemeInfo,
    Termination,
    Trajectory,
    dyadic_error_bound,
    dyadic_scheme,
    euler_scheme,
    fixed_time_curve,
    flow_map,
    refinement_study,
    time_dependent_curve,
)
from .pursuit import (
    BallTarget,
    EvaderSet,
    MovingTarget,
    PointTarget,
    SegmentTarget,
    SubtreeTarget,
    barycenter,
    distance_to_target,
    pursue,
    pursue_barycenter,
)
from .resolvent import resolve, resolve_numeric
from .oracles import convergence_order, oracle_resolve, reference_trajectory

__version__ = "0.1.0"

__all__ = [
    "BallTarget",
    "CapabilityError",
    "Cat0FlowError",
    "ConfigError",
    "ContractError",
    "DataError",
    "DomainError",
    "EuclideanSpace",
    "EvaderSet",
    "Functional",
    "HoelderData",
    "MovingTarget",
    "PointTarget",
    "ProductSpace",
    "QuadrantSpace",
    "RegionTooSmallError",
    "SchemeInfo",
    "SegmentTarget",
    "SolverError",
    "StepSizeError",
    "SubtreeTarget",
    "TangentVector",
    "Termination",
    "Trajectory",
    "TreeGerm",
    "TreePoint",
    "TreeSpace",
    "UsageError",
    "ValidationError",
    "barycenter",
    "convergence_order",
    "distance_to_target",
    "dyadic_error_bound",
    "dyadic_scheme",
    "euler_scheme",
    "fixed_time_curve",
    "flow_map",
    "linear_drift",
    "min_coordinate",
    "moving_min",
    "oracle_resolve",
    "pursue",
    "pursue_barycenter",
    "reference_trajectory",
    "refinement_study",
    "resolve",
    "resolve_numeric",
    "sum_squared",
    "time_dependent_curve",
    "weighted_sum",
    "__version__",
]
