"""Descent curves built from iterated step-energy minimizers.

Two layers:

* fixed time: the energy is frozen at t0 and the resolvent is iterated,
  giving the classical minimizing-movement curve s -> mu_{x0,t0}(s);
* time dependent: the horizon is cut into blocks, the energy is frozen on
  each block, and the frozen flows are chained. The `dyadic` scheme uses
  2^n blocks (each realized with m substeps); `euler_proximal` freezes the
  energy over every single step of size h.

Curves of the moving-kink catalog entry can stop existing when they hit
the kink; the stepping loop watches for a descent-direction jump larger
than pi/4 combined with the functional's kink predicate and reports the
termination time instead of marching through.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

from . import geometry as geo
from . import kernels
from .errors import StepSizeError, UsageError, ValidationError
from .functionals import Functional
from .geometry import EuclideanSpace, ProductSpace, QuadrantSpace, TreeSpace
from .resolvent import check_step, resolve

__all__ = [
    "SchemeInfo",
    "Termination",
    "Trajectory",
    "dyadic_error_bound",
    "dyadic_scheme",
    "euler_scheme",
    "fixed_time_contraction_check",
    "fixed_time_curve",
    "flow_map",
    "flow_map_split_gap",
    "frozen_time_limit",
    "refinement_study",
    "run_report",
    "scheme_from_spec",
    "semigroup_restart_gap",
    "time_dependent_curve",
    "time_shift_check",
    "write_trajectory_csv",
]

ANGLE_JUMP = math.pi / 4.0


@dataclass(frozen=True)
class SchemeInfo:
    kind: str
    h: Optional[float] = None
    n: Optional[int] = None
    m: Optional[int] = None

    def describe(self) -> dict:
        if self.kind == "euler_proximal":
            return {"kind": "euler_proximal", "h": self.h}
        return {"kind": "dyadic", "n": self.n, "m": self.m}


def euler_scheme(h: float) -> SchemeInfo:
    if not h > 0.0:
        raise ValidationError(f"scheme.h: must be positive, got {h}")
    return SchemeInfo(kind="euler_proximal", h=float(h))


def dyadic_scheme(n: int, m: int = 8) -> SchemeInfo:
    if not isinstance(n, int) or n < 0:
        raise ValidationError(f"scheme.n: must be a nonnegative integer, got {n!r}")
    if not isinstance(m, int) or m < 1:
        raise ValidationError(f"scheme.m: must be a positive integer, got {m!r}")
    return SchemeInfo(kind="dyadic", n=n, m=m)


def scheme_from_spec(obj: dict, field_name: str = "scheme") -> SchemeInfo:
    if not isinstance(obj, dict) or len(obj) != 1:
        raise ValidationError(f"{field_name}: expected exactly one of 'euler_proximal' or 'dyadic'")
    if "euler_proximal" in obj:
        body = obj["euler_proximal"]
        if not isinstance(body, dict) or "h" not in body:
            raise ValidationError(f"{field_name}.euler_proximal.h: required")
        h = body["h"]
        if not isinstance(h, (int, float)) or not h > 0:
            raise ValidationError(f"{field_name}.euler_proximal.h: must be positive, got {h!r}")
        return euler_scheme(float(h))
    if "dyadic" in obj:
        body = obj["dyadic"]
        if not isinstance(body, dict) or "n" not in body:
            raise ValidationError(f"{field_name}.dyadic.n: required")
        n = body["n"]
        m = body.get("m", 8)
        if not isinstance(n, int) or n < 0:
            raise ValidationError(f"{field_name}.dyadic.n: must be a nonnegative integer, got {n!r}")
        if not isinstance(m, int) or m < 1:
            raise ValidationError(f"{field_name}.dyadic.m: must be a positive integer, got {m!r}")
        return dyadic_scheme(n, m)
    raise ValidationError(f"{field_name}: unknown scheme {sorted(obj)!r}")


@dataclass(frozen=True)
class Termination:
    kind: str  # completed | singular_locus | captured
    time: Optional[float] = None
    detail: str = ""

    def describe(self) -> dict:
        return {"kind": self.kind, "time": self.time, "detail": self.detail}


@dataclass
class Trajectory:
    space: geo.Space
    functional_name: str
    t0: float
    horizon: float
    scheme: SchemeInfo
    times: list = field(default_factory=list)
    points: list = field(default_factory=list)
    gaps: Optional[list] = None
    termination: Termination = Termination("completed")

    @property
    def end_time(self) -> float:
        return self.times[-1]

    @property
    def end_point(self):
        return self.points[-1]


def frozen_time_limit(lam: float) -> float:
    """Horizon within which freezing errors stay geometric: 1.25/|lam| when
    the convexity modulus is negative, unbounded otherwise."""
    if lam >= 0.0:
        return math.inf
    return 1.25 / abs(lam)


def _integer_steps(total: float, h: float):
    n = round(total / h)
    if n >= 1 and abs(n * h - total) <= 1e-9 * max(1.0, abs(total)):
        return n
    return None


def fixed_time_curve(f: Functional, t0: float, x0, s: float, n: int, return_path: bool = False):
    """n resolvent steps of size s/n with the energy frozen at t0."""
    if n < 1:
        raise UsageError("fixed_time_curve needs at least one step")
    if s == 0.0:
        return (x0, [x0]) if return_path else x0
    if s < 0.0:
        raise UsageError("curve length s must be nonnegative")
    h = s / n
    check_step(f, h)
    x = f.space.validate_point(x0)
    path = [x]
    for _ in range(n):
        x = resolve(f, t0, x, h, verify_descent=False)
        if return_path:
            path.append(x)
    return (x, path) if return_path else x


def flow_map(f: Functional, t: float, length: float, x, n: int):
    """Frozen-time flow over `length` realized with n substeps."""
    return fixed_time_curve(f, t, x, length, n)


def _direction_angle(space, v, w) -> float:
    """Angle between direction data of two tangent vectors, ignoring bases."""
    if isinstance(space, (EuclideanSpace, QuadrantSpace)):
        dot = sum(a * b for a, b in zip(v.data, w.data))
        return math.acos(min(1.0, max(-1.0, dot)))
    if isinstance(space, TreeSpace):
        return 0.0 if v.data == w.data else math.pi
    raise UsageError(f"no transported angle on space kind {space.kind}")


def _check_scheme_admissible(f: Functional, s_total: float, scheme: SchemeInfo):
    if scheme.kind == "euler_proximal":
        check_step(f, scheme.h)
        return
    block = s_total / float(2**scheme.n)
    cap = frozen_time_limit(f.lam)
    if f.hoelder is not None:
        cap = min(cap, f.hoelder.B0)
    if block > cap:
        raise StepSizeError(
            f"dyadic block {block} exceeds the admissible freezing window {cap}; raise n"
        )
    check_step(f, block / scheme.m)


def time_dependent_curve(
    f: Functional,
    t0: float,
    x0,
    s_total: float,
    scheme: SchemeInfo,
    record_every: int = 1,
    stop_condition: Optional[Callable] = None,
) -> Trajectory:
    """Descent curve of the time-dependent energy over [t0, t0 + s_total].

    stop_condition(t, x) may return a Termination to end the run at a node
    (used for capture detection in pursuit).
    """
    if s_total <= 0.0:
        raise UsageError("horizon must be positive")
    if record_every < 1:
        raise UsageError("record_every must be >= 1")
    x0 = f.space.validate_point(x0)
    _check_scheme_admissible(f, s_total, scheme)

    traj = Trajectory(
        space=f.space,
        functional_name=f.name,
        t0=t0,
        horizon=s_total,
        scheme=scheme,
        termination=Termination("completed", time=t0 + s_total),
    )

    # a time-dependent run cannot start on the singular set
    if f.time_dependent and f.singular is not None and f.singular(t0, x0, 1e-9):
        traj.times = [t0]
        traj.points = [x0]
        traj.termination = Termination("singular_locus", time=t0, detail="start lies on the singular set")
        return traj

    if scheme.kind == "euler_proximal":
        h = scheme.h
        n_steps = _integer_steps(s_total, h)
        partial = None
        if n_steps is None:
            n_steps = int(s_total / h)
            partial = s_total - n_steps * h
            if partial <= 1e-12 * max(1.0, s_total):
                partial = None
        if partial is None and stop_condition is None and f.singular is None:
            fast = _kernel_route(f, t0, x0, h, n_steps, record_every)
            if fast is not None:
                traj.times, traj.points = fast
                return traj
        _node_loop(f, traj, t0, x0, h, n_steps, record_every, stop_condition)
        if traj.termination.kind == "completed" and partial is not None:
            xe = resolve(f, t0 + n_steps * h, traj.points[-1], partial, verify_descent=False)
            traj.times.append(t0 + s_total)
            traj.points.append(xe)
        return traj

    # dyadic: 2^n frozen blocks, each realized with m substeps
    nblocks = 2**scheme.n
    block = s_total / float(nblocks)
    _node_loop(f, traj, t0, x0, block, nblocks, record_every, stop_condition, substeps=scheme.m)
    return traj


def _node_loop(f, traj, t0, x0, h, n_steps, record_every, stop_condition, substeps: int = 1):
    """Shared stepping loop; records node i when i % record_every == 0,
    at the final node, and at any terminating node."""
    space = f.space
    x = x0
    watch = f.singular is not None
    g_prev = f.grad_fn(t0, x) if watch else None
    for i in range(n_steps + 1):
        t = t0 + i * h
        stop = stop_condition(t, x) if stop_condition is not None else None
        if watch and i > 0:
            g_now = f.grad_fn(t, x)
            jumped = (
                not g_now.is_vertex
                and not g_prev.is_vertex
                and _direction_angle(space, g_prev, g_now) > ANGLE_JUMP + 1e-12
                and f.singular(t, x, 2.0 * h)
            )
            # an iterate glued exactly onto a moving singular set would slide
            # along it forever instead of reporting the stop, so catch the
            # landing itself as well
            landed = f.time_dependent and f.singular(t, x, 1e-9)
            if stop is None and (jumped or landed):
                stop = Termination("singular_locus", time=t, detail="descent direction jump at the singular set")
            g_prev = g_now
        if i % record_every == 0 or i == n_steps or stop is not None:
            traj.times.append(t)
            traj.points.append(x)
        if stop is not None:
            traj.termination = stop
            return
        if i < n_steps:
            if substeps == 1:
                x = resolve(f, t, x, h, verify_descent=False)
            else:
                x = flow_map(f, t, h, x, substeps)


def _kernel_route(f, t0, x0, h, n_steps, record_every):
    """Dispatch to a step kernel when an exact specialized loop exists."""
    if f.name == "linear_drift":
        rt, rx = kernels.linear_drift_steps(x0[0], t0, h, n_steps, record_every)
        return rt, [(v,) for v in rx]
    if f.name == "sum_squared" and isinstance(f.space, EuclideanSpace) and f.space.dim <= 64:
        anchors = f.anchors
        n = len(anchors)
        mean = [sum(a[i] for a in anchors) / n for i in range(f.space.dim)]
        rt, rx = kernels.sum_squared_steps(list(x0), mean, t0, h, n_steps, record_every)
        return rt, [tuple(v) for v in rx]
    return None


def dyadic_error_bound(n: int, s: float, B: float, alpha: float, lam: float) -> float:
    """Distance from the level-n dyadic curve to the limit curve."""
    if not 0.0 < alpha <= 1.0:
        raise UsageError(f"alpha must lie in (0, 1], got {alpha}")
    lam0 = min(0.0, lam)
    bprime = B / (1.0 - 2.0 ** (-alpha))
    return bprime * s ** (1.0 + alpha) * 2.0 ** (-alpha * n) * math.exp(-lam0 * s)


def refinement_study(f: Functional, t0: float, x0, s: float, n_values, m: int = 8):
    """Consecutive dyadic-level distances against their predicted decay.

    Rows: {n, measured, predicted}; measured = d(end_n, end_{n+1}),
    predicted = B s e^{-lam0 s} (s / 2^(n+1))^alpha from the declared data.
    """
    if f.hoelder is None:
        raise UsageError(f"{f.name} declares no time regularity data")
    hd = f.hoelder
    lam0 = min(0.0, f.lam)
    ends = {}
    levels = sorted(set(n_values) | {n + 1 for n in n_values})
    for n in levels:
        traj = time_dependent_curve(f, t0, x0, s, dyadic_scheme(n, m), record_every=2**n)
        if traj.termination.kind != "completed":
            raise UsageError(f"refinement run terminated early at level {n}")
        ends[n] = traj.end_point
    rows = []
    for n in sorted(n_values):
        measured = f.space.distance(ends[n], ends[n + 1])
        predicted = hd.B * s * math.exp(-lam0 * s) * (s / 2.0 ** (n + 1)) ** hd.alpha
        rows.append({"n": n, "measured": measured, "predicted": predicted})
    return rows


def fixed_time_contraction_check(f: Functional, t0: float, x1, x2, s: float, n: int, tol_scale: float = 10.0):
    """Distance decay e^(-lam s) between frozen-time curves from two starts.

    Returns (ok, ratio, bound) with bound e^(-lam s) + tol_scale * (s/n).
    """
    d0 = f.space.distance(x1, x2)
    if d0 == 0.0:
        raise UsageError("need distinct starting points")
    e1 = fixed_time_curve(f, t0, x1, s, n)
    e2 = fixed_time_curve(f, t0, x2, s, n)
    ratio = f.space.distance(e1, e2) / d0
    bound = math.exp(-f.lam * s) + tol_scale * (s / n)
    return ratio <= bound, ratio, bound


def curve_contraction_check(f: Functional, t0: float, x1, x2, s: float, scheme: SchemeInfo, tol_scale: float = 10.0):
    """Same decay check along the time-dependent curves."""
    d0 = f.space.distance(x1, x2)
    if d0 == 0.0:
        raise UsageError("need distinct starting points")
    tr1 = time_dependent_curve(f, t0, x1, s, scheme, record_every=max(1, 2**30))
    tr2 = time_dependent_curve(f, t0, x2, s, scheme, record_every=max(1, 2**30))
    if tr1.termination.kind != "completed" or tr2.termination.kind != "completed":
        raise UsageError("curve terminated before the horizon")
    ratio = f.space.distance(tr1.end_point, tr2.end_point) / d0
    h = scheme.h if scheme.kind == "euler_proximal" else s / 2**scheme.n
    bound = math.exp(-f.lam * s) + tol_scale * h
    return ratio <= bound, ratio, bound


def time_shift_check(f: Functional, x0, t1: float, t2: float, s: float, n: int, hoelder=None):
    """Frozen-time curves from one start at two freeze times.

    Returns (ok, measured, bound) with bound 2 B s |t1 - t2|^alpha from the
    declared (or supplied) time regularity data.
    """
    hd = hoelder if hoelder is not None else f.hoelder
    if hd is None:
        raise UsageError(f"{f.name} declares no time regularity data")
    if abs(t1 - t2) > hd.B0:
        raise UsageError(f"|t1 - t2| exceeds the regularity window {hd.B0}")
    cap = frozen_time_limit(f.lam)
    if s > cap:
        raise UsageError(f"s={s} exceeds the comparison horizon {cap}")
    e1 = fixed_time_curve(f, t1, x0, s, n)
    e2 = fixed_time_curve(f, t2, x0, s, n)
    measured = f.space.distance(e1, e2)
    bound = 2.0 * hd.B * s * abs(t1 - t2) ** hd.alpha
    slack = 10.0 * (s / n) * (1.0 + abs(f.lam))
    return measured <= bound + slack, measured, bound


def flow_map_split_gap(f: Functional, t: float, x, h: float, n1: int, n2: int) -> float:
    """Frozen-time semigroup property: n1+n2 steps at once versus chained
    legs of n1 and n2 steps with the same substep h. Zero when exact."""
    full = flow_map(f, t, (n1 + n2) * h, x, n1 + n2)
    mid = flow_map(f, t, n1 * h, x, n1)
    two = flow_map(f, t, n2 * h, mid, n2)
    return f.space.distance(full, two)


def semigroup_restart_gap(f: Functional, t0: float, x0, s1: float, s2: float, scheme: SchemeInfo) -> float:
    """Restart error of the time-dependent curve: run to t0+s1+s2 at once
    versus restarting from the point reached at t0+s1."""
    big = 2**30
    full = time_dependent_curve(f, t0, x0, s1 + s2, scheme, record_every=big)
    first = time_dependent_curve(f, t0, x0, s1, scheme, record_every=big)
    second = time_dependent_curve(f, t0 + s1, first.end_point, s2, scheme, record_every=big)
    if any(tr.termination.kind != "completed" for tr in (full, first, second)):
        raise UsageError("curve terminated before the horizon")
    return f.space.distance(full.end_point, second.end_point)


def run_report(f: Functional, traj: Trajectory) -> dict:
    hd = f.hoelder
    lam0 = min(0.0, f.lam)
    constants = {
        "lambda": f.lam,
        "B": hd.B if hd else None,
        "alpha": hd.alpha if hd else None,
        "B0": (hd.B0 if math.isfinite(hd.B0) else None) if hd else None,
        "lambda0": lam0,
        "Bprime": (hd.B / (1.0 - 2.0 ** (-hd.alpha))) if hd else None,
    }
    error_bound = None
    if traj.scheme.kind == "dyadic" and hd is not None:
        error_bound = dyadic_error_bound(traj.scheme.n, traj.horizon, hd.B, hd.alpha, f.lam)
    report = {
        "scheme": traj.scheme.kind,
        "n": traj.scheme.n,
        "m": traj.scheme.m,
        "h": traj.scheme.h,
        "functional": f.describe(),
        "space": f.space.describe(),
        "t0": traj.t0,
        "horizon": traj.horizon,
        "constants": constants,
        "termination": traj.termination.describe(),
        "error_bound": error_bound,
    }
    return report


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def write_trajectory_csv(f: Functional, traj: Trajectory, path):
    """Rows t,<coords...>,F,grad_norm with 17 significant digits."""
    labels = geo.coordinate_labels(f.space)
    lines = ["t," + ",".join(labels) + ",F,grad_norm"]
    for t, p in zip(traj.times, traj.points):
        coords = geo.flatten_point(f.space, p)
        val = f.eval_fn(t, p)
        g = f.grad_fn(t, p)
        cells = [_fmt(t)] + [_fmt(c) for c in coords] + [_fmt(val), _fmt(g.length)]
        lines.append(",".join(cells))
    text = "\n".join(lines) + "\n"
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return path
