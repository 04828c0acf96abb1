"""Convex targets, footpoint projection, pursuit curves, and barycenters.

A pursuit curve is the descent curve of the moving distance functional
F(t, p) = d(p, Y_t). Each proximal step moves the pursuer along the
geodesic toward the current footpoint by min(h, gap), which is exactly
the closed-form minimizer of the step energy for a distance function.

Targets are keyframed: the defining data (point, endpoints, center and
radius, or edge portions) is interpolated at constant velocity between
keyframes, and the unit-speed motion contract is validated rather than
assumed.
"""

from __future__ import annotations

import math
import random
from bisect import bisect_right
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

from . import flow as flow_mod
from . import geometry as geo
from . import kernels
from .errors import ContractError, SolverError, UsageError, ValidationError
from .functionals import Functional, HoelderData, sum_squared
from .geometry import EuclideanSpace, ProductSpace, QuadrantSpace, TreeSpace
from .resolvent import resolve

__all__ = [
    "BallTarget",
    "CallableMovingTarget",
    "ConvexTarget",
    "EvaderSet",
    "MovingTarget",
    "PointTarget",
    "SegmentTarget",
    "SubtreeTarget",
    "barycenter",
    "barycenter_curve_target",
    "barycenter_lipschitz_check",
    "distance_to_target",
    "evaders_from_spec",
    "footpoint_stability_check",
    "hausdorff_distance",
    "pursue",
    "pursue_barycenter",
    "target_from_spec",
    "validate_motion",
    "write_pursuit_csv",
]

BARY_STEP = 0.5
BARY_CAP = 200
BARY_TOL = 1e-10


# ---------------------------------------------------------------------------
# static convex targets


class ConvexTarget:
    kind = "abstract"

    def footpoint(self, x):
        raise NotImplementedError

    def distance(self, x) -> float:
        return self.space.distance(x, self.footpoint(x))

    def extreme_points(self, samples: int = 64):
        """Points where a convex function over the target attains its max.
        Exact for flat kinds; boundary samples for balls."""
        raise NotImplementedError

    def sample_point(self, rng):
        raise NotImplementedError


@dataclass(frozen=True)
class PointTarget(ConvexTarget):
    space: geo.Space
    point: object
    kind = "point"

    def footpoint(self, x):
        return self.point

    def distance(self, x) -> float:
        return self.space.distance(x, self.point)

    def extreme_points(self, samples: int = 64):
        return [self.point]

    def sample_point(self, rng):
        return self.point


@dataclass(frozen=True)
class SegmentTarget(ConvexTarget):
    """Geodesic segment between two points of the space."""

    space: geo.Space
    a: object
    b: object
    kind = "segment"

    def footpoint(self, x):
        space = self.space
        if isinstance(space, (EuclideanSpace, QuadrantSpace)):
            num = 0.0
            den = 0.0
            for xa, aa, bb in zip(x, self.a, self.b):
                num += (xa - aa) * (bb - aa)
                den += (bb - aa) * (bb - aa)
            if den == 0.0:
                return self.a
            u = min(1.0, max(0.0, num / den))
            return geo.geodesic_point(space, self.a, self.b, u)
        if isinstance(space, TreeSpace):
            return _tree_segment_footpoint(space, self.a, self.b, x)
        if isinstance(space, ProductSpace):
            def g(u):
                return space.distance(x, geo.geodesic_point(space, self.a, self.b, u))
            u = _ternary_min(g, 0.0, 1.0)
            return geo.geodesic_point(space, self.a, self.b, u)
        raise UsageError(f"segment targets unsupported on space kind {space.kind}")

    def extreme_points(self, samples: int = 64):
        return [self.a, self.b]

    def sample_point(self, rng):
        return geo.geodesic_point(self.space, self.a, self.b, rng.random())


@dataclass(frozen=True)
class BallTarget(ConvexTarget):
    space: geo.Space
    center: object
    radius: float
    kind = "ball"

    def footpoint(self, x):
        d = self.space.distance(self.center, x)
        if d <= self.radius:
            return x
        return geo.geodesic_point(self.space, self.center, x, self.radius / d)

    def distance(self, x) -> float:
        return max(0.0, self.space.distance(self.center, x) - self.radius)

    def extreme_points(self, samples: int = 64):
        space = self.space
        if self.radius == 0.0:
            return [self.center]
        if isinstance(space, (EuclideanSpace, QuadrantSpace)) and len(self.center) == 2:
            pts = []
            for k in range(samples):
                ang = 2.0 * math.pi * k / samples
                p = (self.center[0] + self.radius * math.cos(ang), self.center[1] + self.radius * math.sin(ang))
                if isinstance(space, QuadrantSpace):
                    p = (max(0.0, p[0]), max(0.0, p[1]))
                pts.append(p)
            return pts
        if isinstance(space, TreeSpace):
            pts = []
            for germ in space.germs_at(space.canonicalize(self.center)):
                pts.append(space.walk(self.center, germ, self.radius))
            return pts
        raise UsageError(f"ball extreme-point sampling unsupported on space kind {space.kind}")

    def sample_point(self, rng):
        space = self.space
        if isinstance(space, (EuclideanSpace, QuadrantSpace)) and len(self.center) == 2:
            ang = 2.0 * math.pi * rng.random()
            r = self.radius * math.sqrt(rng.random())
            p = (self.center[0] + r * math.cos(ang), self.center[1] + r * math.sin(ang))
            if isinstance(space, QuadrantSpace):
                p = (max(0.0, p[0]), max(0.0, p[1]))
            return p
        if isinstance(space, TreeSpace):
            germs = space.germs_at(space.canonicalize(self.center))
            germ = germs[int(rng.integers(len(germs)))]
            return space.walk(self.center, germ, self.radius * rng.random())
        raise UsageError(f"ball sampling unsupported on space kind {space.kind}")


@dataclass(frozen=True)
class SubtreeTarget(ConvexTarget):
    """Connected union of whole or partial edges of a metric tree.

    segments: tuple of (edge, lo, hi) offset ranges.
    """

    space: TreeSpace
    segments: Tuple[Tuple[int, float, float], ...]
    kind = "subtree"

    def __post_init__(self):
        if not isinstance(self.space, TreeSpace):
            raise ValidationError("subtree targets require a tree space")
        if not self.segments:
            raise ValidationError("subtree target needs at least one edge segment")
        for e, lo, hi in self.segments:
            if not 0 <= e < len(self.space.edges):
                raise ValidationError(f"subtree segment edge id {e!r} out of range")
            length = self.space.edge_length(e)
            if not (0.0 <= lo <= hi <= length):
                raise ValidationError(
                    f"subtree segment on edge {e!r}: need 0 <= lo <= hi <= {length}, got [{lo}, {hi}]"
                )

    def footpoint(self, x):
        best = None
        best_d = math.inf
        for e, lo, hi in self.segments:
            a = self.space.canonicalize(geo.TreePoint(e, lo))
            b = self.space.canonicalize(geo.TreePoint(e, hi))
            fp = _tree_segment_footpoint(self.space, a, b, x)
            d = self.space.distance(x, fp)
            if d < best_d:
                best_d = d
                best = fp
        return best

    def extreme_points(self, samples: int = 64):
        pts = []
        for e, lo, hi in self.segments:
            pts.append(self.space.canonicalize(geo.TreePoint(e, lo)))
            pts.append(self.space.canonicalize(geo.TreePoint(e, hi)))
        return pts

    def sample_point(self, rng):
        e, lo, hi = self.segments[int(rng.integers(len(self.segments)))]
        return self.space.canonicalize(geo.TreePoint(e, lo + (hi - lo) * rng.random()))


def _tree_segment_footpoint(space: TreeSpace, a, b, x):
    """Nearest point of the geodesic [a, b] in a tree, via the meeting
    point of the three pairwise geodesics."""
    dab = space.distance(a, b)
    if dab == 0.0:
        return a
    off = 0.5 * (space.distance(x, a) + dab - space.distance(x, b))
    off = min(dab, max(0.0, off))
    return space.geodesic_point(a, b, off / dab)


def _ternary_min(g: Callable, lo: float, hi: float, iters: int = 200, tol: float = 1e-12) -> float:
    for _ in range(iters):
        if hi - lo <= tol:
            break
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if g(m1) <= g(m2):
            hi = m2
        else:
            lo = m1
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# Hausdorff distance between targets


def hausdorff_distance(a: ConvexTarget, b: ConvexTarget, samples: int = 64):
    """Returns (value, exact). Closed forms where available; otherwise the
    sup runs over extreme points, which is exact for flat kinds and a
    boundary approximation for balls."""
    if a.kind == "point" and b.kind == "point":
        return a.space.distance(a.point, b.point), True
    if a.kind == "ball" and b.kind == "ball" and abs(a.radius - b.radius) <= 1e-15:
        return a.space.distance(a.center, b.center), True
    if a.kind == "segment" and b.kind == "segment" and isinstance(a.space, (EuclideanSpace, QuadrantSpace)):
        da = tuple(q - p for p, q in zip(a.a, a.b))
        db = tuple(q - p for p, q in zip(b.a, b.b))
        if max(abs(p - q) for p, q in zip(da, db)) <= 1e-12:
            return a.space.distance(a.a, b.a), True
    exact = a.kind != "ball" and b.kind != "ball"
    forward = max(b.distance(p) for p in a.extreme_points(samples))
    backward = max(a.distance(p) for p in b.extreme_points(samples))
    return max(forward, backward), exact


# ---------------------------------------------------------------------------
# moving targets


def _interp_scalar(p: float, q: float, u: float) -> float:
    return p + u * (q - p)


class MovingTarget:
    """Keyframed convex target with constant-velocity data interpolation.

    Point keyframes on Euclidean spaces interpolate with the same
    arithmetic as the compiled pursuit kernel, so both paths see the same
    target positions bit for bit.
    """

    def __init__(self, space, kind: str, key_times: Sequence[float], key_data: Sequence):
        if len(key_times) != len(key_data) or not key_times:
            raise ValidationError("keyframes: need matching nonempty times and data")
        for i in range(len(key_times) - 1):
            if not key_times[i] < key_times[i + 1]:
                raise ValidationError("keyframes: times must be strictly increasing")
        self.space = space
        self.kind = kind
        self.key_times = [float(t) for t in key_times]
        self.key_data = list(key_data)
        self._check_keyframe_speeds()

    # -- data interpolation per kind

    def _make(self, data) -> ConvexTarget:
        if self.kind == "point":
            return PointTarget(self.space, data)
        if self.kind == "segment":
            return SegmentTarget(self.space, data[0], data[1])
        if self.kind == "ball":
            return BallTarget(self.space, data[0], data[1])
        if self.kind == "subtree":
            return SubtreeTarget(self.space, tuple(data))
        raise ValidationError(f"unknown target kind {self.kind!r}")

    def _interp_data(self, d0, d1, u: float):
        sp = self.space
        if self.kind == "point":
            return geo.geodesic_point(sp, d0, d1, u)
        if self.kind == "segment":
            return (geo.geodesic_point(sp, d0[0], d1[0], u), geo.geodesic_point(sp, d0[1], d1[1], u))
        if self.kind == "ball":
            return (geo.geodesic_point(sp, d0[0], d1[0], u), _interp_scalar(d0[1], d1[1], u))
        if self.kind == "subtree":
            out = []
            for (e0, lo0, hi0), (e1, lo1, hi1) in zip(d0, d1):
                if e0 != e1:
                    raise ValidationError("subtree keyframes must keep the same edge set")
                out.append((e0, _interp_scalar(lo0, lo1, u), _interp_scalar(hi0, hi1, u)))
            return tuple(out)
        raise ValidationError(f"unknown target kind {self.kind!r}")

    def position(self, t: float) -> ConvexTarget:
        kt = self.key_times
        if t <= kt[0]:
            return self._make(self.key_data[0])
        if t >= kt[-1]:
            return self._make(self.key_data[-1])
        seg = min(bisect_right(kt, t) - 1, len(kt) - 2)
        u = (t - kt[seg]) / (kt[seg + 1] - kt[seg])
        return self._make(self._interp_data(self.key_data[seg], self.key_data[seg + 1], u))

    def footpoint(self, t: float, x):
        return self.position(t).footpoint(x)

    def distance(self, t: float, x) -> float:
        return self.position(t).distance(x)

    def _check_keyframe_speeds(self):
        for i in range(len(self.key_times) - 1):
            dt = self.key_times[i + 1] - self.key_times[i]
            dh, _ = hausdorff_distance(self._make(self.key_data[i]), self._make(self.key_data[i + 1]))
            if dh > dt * (1.0 + 1e-6):
                raise ValidationError(
                    f"keyframes[{i}]..[{i + 1}]: target moves {dh:.6g} over {dt:.6g}, faster than unit speed"
                )

    def describe(self) -> dict:
        return {"kind": self.kind, "keyframes": len(self.key_times)}


class CallableMovingTarget:
    """Moving target given by an arbitrary time -> target map (used for
    barycenter curves on spaces where the mean has no linear form)."""

    def __init__(self, space, kind: str, position_fn: Callable, span: Tuple[float, float]):
        self.space = space
        self.kind = kind
        self._fn = position_fn
        self.key_times = [span[0], span[1]]

    def position(self, t: float) -> ConvexTarget:
        return self._fn(t)

    def footpoint(self, t: float, x):
        return self.position(t).footpoint(x)

    def distance(self, t: float, x) -> float:
        return self.position(t).distance(x)

    def describe(self) -> dict:
        return {"kind": self.kind, "keyframes": None}


def validate_motion(moving, pairs: int = 200, slack: float = 1e-6, rng=None, raise_on_fail: bool = False):
    """Sampled unit-speed contract: Hausdorff shift <= elapsed time."""
    rng = rng or random.Random(20260815)
    lo, hi = moving.key_times[0], moving.key_times[-1]
    worst = -math.inf
    worst_pair = None
    approx = False
    for _ in range(pairs):
        t1 = lo + (hi - lo) * rng.random()
        t2 = lo + (hi - lo) * rng.random()
        if t1 == t2:
            continue
        dh, exact = hausdorff_distance(moving.position(t1), moving.position(t2))
        approx = approx or not exact
        excess = dh - abs(t1 - t2)
        if excess > worst:
            worst = excess
            worst_pair = (t1, t2)
        if excess > slack and raise_on_fail:
            raise ContractError(
                f"target moved {dh:.6g} between t={t1:.6g} and t={t2:.6g}, violating unit speed",
                detail={"t1": t1, "t2": t2, "hausdorff": dh},
            )
    ok = worst <= slack
    return {"ok": ok, "pairs": pairs, "worst_excess": worst, "worst_pair": worst_pair, "approximate": approx}


# ---------------------------------------------------------------------------
# the moving distance functional


def distance_to_target(space, moving) -> Functional:
    """F(t, p) = distance from p to the target at time t; 0-convex and
    1-Lipschitz in each variable, with a closed-form proximal step."""

    def ev(t, x):
        return moving.distance(t, x)

    def gr(t, x):
        fp = moving.footpoint(t, x)
        d = space.distance(x, fp)
        if d == 0.0:
            return geo.TangentVector(space, x, None, 0.0)
        v = geo.log_direction(space, x, fp)
        return v.scaled(1.0 / v.length)

    def res(t, x, h):
        fp = moving.footpoint(t, x)
        d = space.distance(x, fp)
        if d == 0.0 or d <= h:
            return fp
        return geo.geodesic_point(space, x, fp, h / d)

    def cand(t, x, h):
        return moving.footpoint(t, x)

    time_dep = len(moving.key_times) > 1

    f = Functional(
        space=space,
        name="distance_to_target",
        lam=0.0,
        eval_fn=ev,
        grad_fn=gr,
        lipschitz_x=1.0,
        lipschitz_t=1.0,
        time_dependent=time_dep,
        analytic_resolvent=res,
        candidate_target=cand,
        params={"kind": "distance_to_target", "target": moving.describe()},
    )
    f.moving = moving
    return f


def footpoint_stability_check(moving, p, t: float, tp: float, slack: float = 1e-9):
    """Footpoints under a unit-speed target drift by at most
    (sqrt(dt) + 2 sqrt(gap + dt)) sqrt(dt), and the gap itself is
    1-Lipschitz in time. Returns (ok, details)."""
    qt = moving.footpoint(t, p)
    qtp = moving.footpoint(tp, p)
    dt = abs(t - tp)
    moved = moving.space.distance(qt, qtp)
    gap_t = moving.space.distance(p, qt)
    gap_tp = moving.space.distance(p, qtp)
    bound1 = (math.sqrt(dt) + 2.0 * math.sqrt(gap_t + dt)) * math.sqrt(dt)
    ok1 = moved <= bound1 + slack
    ok2 = abs(gap_t - gap_tp) <= dt + slack
    return ok1 and ok2, {
        "footpoint_move": moved,
        "footpoint_bound": bound1,
        "gap_change": abs(gap_t - gap_tp),
        "dt": dt,
    }


# ---------------------------------------------------------------------------
# pursuit


def _gap_on_grid(f: Functional, x, t_lo: float, t_hi: float, samples: int = 65):
    """Min and max of t -> F(t, x) on a grid, with a one-Lipschitz margin,
    plus a contract tripwire between neighboring samples."""
    if t_hi <= t_lo:
        v = f.eval_fn(t_lo, x)
        return v, v, 0.0
    step = (t_hi - t_lo) / (samples - 1)
    vals = []
    for i in range(samples):
        vals.append(f.eval_fn(t_lo + i * step, x))
    for i in range(samples - 1):
        if abs(vals[i + 1] - vals[i]) > step * (1.0 + 1e-6) + 1e-9:
            raise ContractError(
                "target outran unit speed between t=%.6g and t=%.6g" % (t_lo + i * step, t_lo + (i + 1) * step),
                detail={"t1": t_lo + i * step, "t2": t_lo + (i + 1) * step},
            )
    return min(vals), max(vals), step


def pursue(
    moving,
    x0,
    t_end: float,
    scheme: flow_mod.SchemeInfo,
    capture_eps: Optional[float] = None,
    t0: float = 0.0,
    record_every: int = 1,
    validate_contract: bool = True,
) -> Tuple[flow_mod.Trajectory, dict]:
    """Chase a moving convex target from x0 over [t0, t_end].

    Returns (trajectory, report). The trajectory carries a per-sample gap
    column; the report carries the per-leg existence bookkeeping: each leg
    of length T is certified when the gap stays above 2T over the leg
    (halving T as needed), and legs where certification failed down to the
    step size are flagged.
    """
    space = moving.space
    x0 = space.validate_point(x0)
    if t_end <= t0:
        raise UsageError("t_end must exceed t0")
    f = distance_to_target(space, moving)
    gap0 = f.eval_fn(t0, x0)
    if capture_eps is None:
        capture_eps = 1e-6 * gap0
    h_step = scheme.h if scheme.kind == "euler_proximal" else (t_end - t0) / float(2**scheme.n) / scheme.m

    if validate_contract and isinstance(moving, MovingTarget):
        validate_motion(moving, pairs=128, raise_on_fail=True)

    traj = flow_mod.Trajectory(
        space=space,
        functional_name=f.name,
        t0=t0,
        horizon=t_end - t0,
        scheme=scheme,
        termination=flow_mod.Termination("completed", time=t_end),
    )
    legs: List[dict] = []

    if gap0 <= capture_eps:
        traj.times = [t0]
        traj.points = [x0]
        traj.gaps = [gap0]
        traj.termination = flow_mod.Termination("captured", time=t0, detail="already within capture_eps")
        return traj, _pursuit_report(f, traj, legs, capture_eps, gap0, h_step)

    def stop(t, x):
        gap = f.eval_fn(t, x)
        if gap <= capture_eps:
            return flow_mod.Termination("captured", time=t, detail=f"gap {gap:.3e} <= capture_eps")
        return None

    t_cur = t0
    x_cur = x0
    r_overall = gap0
    while t_cur < t_end - 1e-12 * max(1.0, abs(t_end)):
        remaining = t_end - t_cur
        T = remaining
        verified = False
        gmin = gmax = None
        while T >= h_step:
            gmin, gmax, margin = _gap_on_grid(f, x_cur, t_cur, t_cur + T)
            if gmin - margin > 2.0 * T:
                verified = True
                break
            T *= 0.5
        if not verified:
            T = remaining
            gmin, gmax, margin = _gap_on_grid(f, x_cur, t_cur, t_cur + T)
        R = gmax + (margin if T > 0 else 0.0)
        r_overall = max(r_overall, R)
        B = 10.0 * math.sqrt(R) / (math.sqrt(3.0) * T) if T > 0 else math.inf
        B0 = min(R, T * T / (100.0 * R)) if R > 0 else 0.0
        legs.append(
            {
                "t_start": t_cur,
                "T": T,
                "R": R,
                "B": B,
                "B0": B0,
                "alpha": 0.5,
                "existence_verified": verified,
            }
        )
        leg_traj = _run_leg(f, moving, t_cur, x_cur, T, scheme, record_every, stop, capture_eps)
        _append_leg(traj, leg_traj)
        t_cur = leg_traj.times[-1]
        x_cur = leg_traj.points[-1]
        if leg_traj.termination.kind != "completed":
            traj.termination = leg_traj.termination
            break
    else:
        traj.termination = flow_mod.Termination("completed", time=traj.times[-1])

    traj.gaps = [f.eval_fn(t, p) for t, p in zip(traj.times, traj.points)]
    if legs:
        f.hoelder = HoelderData(
            B=max(leg["B"] for leg in legs), alpha=0.5, B0=min(leg["B0"] for leg in legs)
        )
    return traj, _pursuit_report(f, traj, legs, capture_eps, gap0, h_step)


def _run_leg(f, moving, t_start, x_start, T, scheme, record_every, stop, capture_eps):
    if scheme.kind == "euler_proximal":
        fast = _pursuit_kernel_route(f, moving, t_start, x_start, T, scheme.h, record_every, capture_eps)
        if fast is not None:
            return fast
    return flow_mod.time_dependent_curve(
        f, t_start, x_start, T, scheme, record_every=record_every, stop_condition=stop
    )


def _pursuit_kernel_route(f, moving, t_start, x_start, T, h, record_every, capture_eps):
    if not (isinstance(f.space, EuclideanSpace) and f.space.dim <= 64):
        return None
    if not (isinstance(moving, MovingTarget) and moving.kind == "point"):
        return None
    n_steps = round(T / h)
    if n_steps < 1 or abs(n_steps * h - T) > 1e-9 * max(1.0, T):
        return None
    rt, rx, rg, captured, t_capture, _ = kernels.pursue_point_steps(
        list(x_start), t_start, h, n_steps, moving.key_times, [list(p) for p in moving.key_data],
        capture_eps, record_every,
    )
    traj = flow_mod.Trajectory(
        space=f.space,
        functional_name=f.name,
        t0=t_start,
        horizon=T,
        scheme=flow_mod.euler_scheme(h),
        times=rt,
        points=[tuple(p) for p in rx],
        gaps=list(rg),
    )
    if captured:
        traj.termination = flow_mod.Termination("captured", time=t_capture, detail="gap <= capture_eps")
    else:
        traj.termination = flow_mod.Termination("completed", time=rt[-1])
    return traj


def _append_leg(traj, leg):
    start = 0
    if traj.times and leg.times and leg.times[0] == traj.times[-1]:
        start = 1
    traj.times.extend(leg.times[start:])
    traj.points.extend(leg.points[start:])


def _pursuit_report(f, traj, legs, capture_eps, gap0, h_step):
    report = flow_mod.run_report(f, traj)
    report.update(
        {
            "capture_eps": capture_eps,
            "initial_gap": gap0,
            "legs": legs,
            "existence_verified_all": all(leg["existence_verified"] for leg in legs) if legs else False,
            "capture_resolution_guaranteed": h_step <= capture_eps / 4.0,
        }
    )
    if not report["existence_verified_all"]:
        report["flags"] = ["existence condition unverified"]
    return report


def write_pursuit_csv(traj, path):
    """Rows t,<coords...>,gap with 17 significant digits."""
    space = traj.space
    labels = geo.coordinate_labels(space)
    if traj.gaps is None or len(traj.gaps) != len(traj.times):
        raise UsageError("trajectory carries no gap column")
    lines = ["t," + ",".join(labels) + ",gap"]
    for t, p, g in zip(traj.times, traj.points, traj.gaps):
        coords = geo.flatten_point(space, p)
        cells = [format(float(t), ".17g")] + [format(float(c), ".17g") for c in coords]
        cells.append(format(float(g), ".17g"))
        lines.append(",".join(cells))
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


# ---------------------------------------------------------------------------
# barycenters


def barycenter(space, points: Sequence):
    """Minimizer of the mean squared distance to the given points.

    Arithmetic mean on Euclidean spaces; elsewhere a fixed-point iteration
    of the mean-squared-distance proximal step, which contracts with
    factor 1/(1+2h) per iteration.
    """
    if not points:
        raise UsageError("barycenter of an empty set")
    pts = [space.validate_point(p) for p in points]
    if len(pts) == 1:
        return pts[0]
    if isinstance(space, EuclideanSpace):
        n = len(pts)
        return tuple(sum(p[i] for p in pts) / n for i in range(space.dim))
    f = sum_squared(space, pts)
    x = pts[0]
    for _ in range(BARY_CAP):
        x1 = resolve(f, 0.0, x, BARY_STEP, verify_descent=False)
        if space.distance(x, x1) < BARY_TOL:
            return x1
        x = x1
    raise SolverError("barycenter iteration did not converge", best=x)


def barycenter_lipschitz_check(evaders: "EvaderSet", t: float, tp: float, tol: float = 1e-7):
    """d(b(t), b(t')) is at most the mean evader displacement, hence at
    most |t - t'| for unit-speed evaders. Returns (ok, details)."""
    bt = evaders.barycenter_at(t)
    btp = evaders.barycenter_at(tp)
    lhs = evaders.space.distance(bt, btp)
    mean_move = sum(
        evaders.space.distance(ev.position(t).point, ev.position(tp).point) for ev in evaders.evaders
    ) / len(evaders.evaders)
    ok = lhs <= mean_move + tol and lhs <= abs(t - tp) + tol
    return ok, {"moved": lhs, "mean_evader_move": mean_move, "dt": abs(t - tp)}


class EvaderSet:
    """Finitely many unit-speed point evaders given as keyframed curves."""

    def __init__(self, evaders: Sequence[MovingTarget]):
        if not evaders:
            raise ValidationError("evaders: need at least one")
        for i, ev in enumerate(evaders):
            if ev.kind != "point":
                raise ValidationError(f"evaders[{i}]: must be a point target, got {ev.kind!r}")
        if len({repr(ev.space.describe()) for ev in evaders}) > 1:
            raise ValidationError("evaders: all must live on the same space")
        self.evaders = list(evaders)
        self.space = evaders[0].space

    def positions_at(self, t: float):
        return [ev.position(t).point for ev in self.evaders]

    def barycenter_at(self, t: float):
        return barycenter(self.space, self.positions_at(t))

    @property
    def key_times(self):
        lo = min(ev.key_times[0] for ev in self.evaders)
        hi = max(ev.key_times[-1] for ev in self.evaders)
        return [lo, hi]


def barycenter_curve_target(evaders: EvaderSet):
    """The barycenter of the evaders as a moving point target.

    On Euclidean spaces the mean of piecewise-linear curves is itself
    piecewise linear, so the target is keyframed exactly on the union of
    the evader keyframe times; elsewhere the barycenter is solved on
    demand.
    """
    space = evaders.space
    if isinstance(space, EuclideanSpace):
        knots = sorted({t for ev in evaders.evaders for t in ev.key_times})
        data = [evaders.barycenter_at(t) for t in knots]
        return MovingTarget(space, "point", knots, data)
    span = evaders.key_times

    def pos(t):
        return PointTarget(space, evaders.barycenter_at(t))

    return CallableMovingTarget(space, "point", pos, (span[0], span[-1]))


def pursue_barycenter(
    evaders: EvaderSet,
    x0,
    t_end: float,
    scheme: flow_mod.SchemeInfo,
    capture_eps: Optional[float] = None,
    t0: float = 0.0,
    record_every: int = 1,
):
    """Chase the (1-Lipschitz) barycenter curve of the evaders."""
    target = barycenter_curve_target(evaders)
    traj, report = pursue(
        target, x0, t_end, scheme, capture_eps=capture_eps, t0=t0, record_every=record_every,
        validate_contract=isinstance(target, MovingTarget),
    )
    report["evaders"] = len(evaders.evaders)
    return traj, report


# ---------------------------------------------------------------------------
# structured-text specs


def _keyframes_from_spec(space, obj, field_name, parse_data):
    frames = obj.get("keyframes")
    if not isinstance(frames, list) or not frames:
        raise ValidationError(f"{field_name}.keyframes: required nonempty list")
    times = []
    data = []
    for i, kf in enumerate(frames):
        if not isinstance(kf, (list, tuple)) or len(kf) != 2:
            raise ValidationError(f"{field_name}.keyframes[{i}]: expected [time, data]")
        t, d = kf
        if not isinstance(t, (int, float)):
            raise ValidationError(f"{field_name}.keyframes[{i}].t: expected a number, got {t!r}")
        times.append(float(t))
        data.append(parse_data(d, f"{field_name}.keyframes[{i}]"))
    return times, data


def target_from_spec(space, obj, field_name: str = "target"):
    if not isinstance(obj, dict):
        raise ValidationError(f"{field_name}: expected an object")
    kind = obj.get("kind")
    if kind == "point":
        times, data = _keyframes_from_spec(
            space, obj, field_name, lambda d, fn: geo.point_from_spec(space, d, fn)
        )
        return MovingTarget(space, "point", times, data)
    if kind == "segment":
        def parse(d, fn):
            if not isinstance(d, (list, tuple)) or len(d) != 2:
                raise ValidationError(f"{fn}: expected [endpoint_a, endpoint_b]")
            return (geo.point_from_spec(space, d[0], fn + "[0]"), geo.point_from_spec(space, d[1], fn + "[1]"))
        times, data = _keyframes_from_spec(space, obj, field_name, parse)
        return MovingTarget(space, "segment", times, data)
    if kind == "ball":
        def parse(d, fn):
            if not isinstance(d, dict) or "center" not in d or "radius" not in d:
                raise ValidationError(f"{fn}: expected {{center, radius}}")
            r = d["radius"]
            if not isinstance(r, (int, float)) or r < 0:
                raise ValidationError(f"{fn}.radius: expected a nonnegative number, got {r!r}")
            return (geo.point_from_spec(space, d["center"], fn + ".center"), float(r))
        times, data = _keyframes_from_spec(space, obj, field_name, parse)
        return MovingTarget(space, "ball", times, data)
    if kind == "subtree":
        if not isinstance(space, TreeSpace):
            raise ValidationError(f"{field_name}: subtree targets require a tree space")
        edges = obj.get("edges")
        if not isinstance(edges, list) or not edges:
            raise ValidationError(f"{field_name}.edges: required nonempty list")
        segs = []
        for i, entry in enumerate(edges):
            if isinstance(entry, int) and not isinstance(entry, bool):
                if not 0 <= entry < len(space.edges):
                    raise ValidationError(f"{field_name}.edges[{i}]: edge id {entry} out of range")
                segs.append((entry, 0.0, space.edge_length(entry)))
            elif isinstance(entry, (list, tuple)) and len(entry) == 3:
                segs.append((int(entry[0]), float(entry[1]), float(entry[2])))
            else:
                raise ValidationError(f"{field_name}.edges[{i}]: expected an edge id or [edge, lo, hi]")
        frames = obj.get("keyframes")
        if frames is None:
            return MovingTarget(space, "subtree", [0.0], [tuple(segs)])
        raise ValidationError(f"{field_name}.keyframes: subtree targets are static; omit keyframes")
    raise ValidationError(f"{field_name}.kind: expected point|segment|ball|subtree, got {kind!r}")


def evaders_from_spec(space, obj, field_name: str = "evaders"):
    if isinstance(obj, dict):
        obj = obj.get("evaders")
    if not isinstance(obj, list) or not obj:
        raise ValidationError(f"{field_name}: expected a nonempty list of point target specs")
    evs = []
    for i, spec in enumerate(obj):
        ev = target_from_spec(space, spec, f"{field_name}[{i}]")
        if ev.kind != "point":
            raise ValidationError(f"{field_name}[{i}].kind: evaders must be point targets")
        evs.append(ev)
    return EvaderSet(evs)
