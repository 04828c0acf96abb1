"""Catalog of geodesically convex energies with descent-direction data.

Every functional carries: a value map eval(t, x), a convexity modulus lam
(convexity along geodesics with modulus lam), local Lipschitz data, optional
Hoelder-in-time data for its descent vector field, and optional closed-form
hooks (resolvent, per-germ slopes) that the solvers exploit.

The descent vector at (t, x) is the tangent vector v characterized by
  slope of F at x along any w  >=  -<v, w>,   slope along v = -|v|^2,
so |v| is the steepest local decay rate of F(t, .) at x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

from . import geometry as geo
from .errors import CapabilityError, DomainError, UsageError, ValidationError
from .geometry import (
    EuclideanSpace,
    ProductSpace,
    QuadrantSpace,
    Space,
    TangentVector,
    TreeSpace,
)

__all__ = [
    "Functional",
    "HoelderData",
    "absolute_gradient_estimate",
    "directional_derivative",
    "evaluate",
    "functional_from_spec",
    "gradient",
    "gradient_pair_check",
    "gradient_support_check",
    "hoelder_check",
    "lambda_convexity_check",
    "linear_drift",
    "min_coordinate",
    "moving_min",
    "random_point_near",
    "sum_squared",
    "weighted_sum",
]

DIAG = math.sqrt(0.5)


@dataclass(frozen=True)
class HoelderData:
    """Time regularity of the descent field: cone-distance between the
    descent vectors at times t, t' is at most B |t - t'|**alpha whenever
    |t - t'| <= B0."""

    B: float
    alpha: float
    B0: float


@dataclass
class Functional:
    space: Space
    name: str
    lam: float
    eval_fn: Callable
    grad_fn: Callable
    lipschitz_x: object = 1.0  # float, or callable (t, center, radius) -> float
    lipschitz_t: object = 0.0
    hoelder: Optional[HoelderData] = None
    growth_a: float = 0.0
    time_dependent: bool = False
    analytic_resolvent: Optional[Callable] = None  # (t, x, h) -> point
    candidate_target: Optional[Callable] = None  # (t, x, h) -> far point for 1-d search
    singular: Optional[Callable] = None  # (t, x, margin) -> bool
    germ_slope_fn: Optional[Callable] = None  # (t, x, germ) -> one-sided slope
    quadratic_data: Optional[Callable] = None  # (t,) -> (a, b_vec) with F = a|y|^2 + b.y + c
    params: dict = field(default_factory=dict)

    def eval(self, t: float, x) -> float:
        return self.eval_fn(t, x)

    def gradient(self, t: float, x) -> TangentVector:
        return self.grad_fn(t, x)

    def lipschitz_x_on(self, t: float, center, radius: float) -> float:
        if callable(self.lipschitz_x):
            return self.lipschitz_x(t, center, radius)
        return float(self.lipschitz_x)

    def lipschitz_t_on(self, center, radius: float) -> float:
        if callable(self.lipschitz_t):
            return self.lipschitz_t(center, radius)
        return float(self.lipschitz_t)

    def describe(self) -> dict:
        return dict(self.params) or {"kind": self.name}


def evaluate(f: Functional, t: float, x) -> float:
    """Validated evaluation; raises DomainError off the space."""
    try:
        x = f.space.validate_point(x)
    except ValidationError as exc:
        raise DomainError(str(exc)) from None
    return f.eval_fn(t, x)


def gradient(f: Functional, t: float, x) -> TangentVector:
    return f.grad_fn(t, x)


# ---------------------------------------------------------------------------
# catalog entries


def linear_drift() -> Functional:
    """F(t, x) = -(t + 1) x on the real line; steepest descent pushes +x."""

    space = EuclideanSpace(1)

    def ev(t, x):
        return -(t + 1.0) * x[0]

    def gr(t, x):
        return TangentVector(space, x, (1.0,), t + 1.0)

    def res(t, x, h):
        return (x[0] + (t + 1.0) * h,)

    def qdata(t):
        return 0.0, (-(t + 1.0),)

    return Functional(
        space=space,
        name="linear_drift",
        lam=0.0,
        eval_fn=ev,
        grad_fn=gr,
        lipschitz_x=lambda t, c, r: abs(t) + 1.0,
        lipschitz_t=lambda c, r: abs(c[0]) + r,
        hoelder=HoelderData(B=1.0, alpha=1.0, B0=math.inf),
        time_dependent=True,
        analytic_resolvent=res,
        quadratic_data=qdata,
        params={"kind": "linear_drift"},
    )


def _min_like_resolvent(t_shift: float, x, h):
    """Shared piecewise resolvent for -min(x - c, y) on the quadrant.

    Three candidates: the two smooth regions and the kink line y = x - c.
    Ties go to the kink-line candidate.
    """
    c = t_shift
    x0, y0 = x

    def energy(p):
        return -min(p[0] - c, p[1]) + ((p[0] - x0) ** 2 + (p[1] - y0) ** 2) / (2.0 * h)

    region = None
    if x0 + h - c < y0:
        region = (x0 + h, y0)
    elif y0 + h < x0 - c:
        region = (x0, y0 + h)
    yk = max(0.0, 0.5 * (x0 + y0 - c + h))
    kink = (yk + c, yk)
    if region is None:
        return kink
    ek, er = energy(kink), energy(region)
    # equal-energy ties resolve to the kink-line candidate
    return region if er < ek - 1e-15 * max(1.0, abs(ek)) else kink


def min_coordinate() -> Functional:
    """F(x, y) = -min(x, y) on the quadrant; kinked along the diagonal."""

    space = QuadrantSpace()

    def ev(t, x):
        return -min(x[0], x[1])

    def gr(t, x):
        if x[0] < x[1]:
            return TangentVector(space, x, (1.0, 0.0), 1.0)
        if x[1] < x[0]:
            return TangentVector(space, x, (0.0, 1.0), 1.0)
        return TangentVector(space, x, (DIAG, DIAG), DIAG)

    def res(t, x, h):
        return _min_like_resolvent(0.0, x, h)

    def sing(t, x, margin=1e-9):
        return abs(x[0] - x[1]) <= margin

    return Functional(
        space=space,
        name="min_coordinate",
        lam=0.0,
        eval_fn=ev,
        grad_fn=gr,
        lipschitz_x=1.0,
        lipschitz_t=0.0,
        hoelder=HoelderData(B=1.0, alpha=1.0, B0=math.inf),
        analytic_resolvent=res,
        singular=sing,
        params={"kind": "min_coordinate"},
    )


def moving_min() -> Functional:
    """F(t, (x, y)) = -min(x - t, y): the kink line y = x - t sweeps right.

    The descent field is discontinuous across the moving kink, so no
    time-Hoelder data is declared; descent curves hitting the kink stop.
    """

    space = QuadrantSpace()

    def ev(t, x):
        return -min(x[0] - t, x[1])

    def gr(t, x):
        lhs = x[0] - t
        if lhs < x[1]:
            return TangentVector(space, x, (1.0, 0.0), 1.0)
        if x[1] < lhs:
            return TangentVector(space, x, (0.0, 1.0), 1.0)
        return TangentVector(space, x, (DIAG, DIAG), DIAG)

    def res(t, x, h):
        return _min_like_resolvent(t, x, h)

    def sing(t, x, margin=1e-9):
        return abs(x[1] - (x[0] - t)) <= margin

    return Functional(
        space=space,
        name="moving_min",
        lam=0.0,
        eval_fn=ev,
        grad_fn=gr,
        lipschitz_x=1.0,
        lipschitz_t=1.0,
        hoelder=None,
        time_dependent=True,
        analytic_resolvent=res,
        singular=sing,
        params={"kind": "moving_min"},
    )


def _anchor_components(space: ProductSpace, anchors):
    left = [a[0] for a in anchors]
    right = [a[1] for a in anchors]
    return left, right


def _sum_sq_eval(space, anchors, x):
    n = len(anchors)
    return sum(space.distance(x, a) ** 2 for a in anchors) / n


def _sum_sq_grad(space, anchors, x) -> TangentVector:
    n = len(anchors)
    if isinstance(space, (EuclideanSpace, QuadrantSpace)):
        m = tuple(sum(a[i] for a in anchors) / n for i in range(len(x)))
        v = geo.log_direction(space, x, m)
        return v.scaled(2.0)
    if isinstance(space, TreeSpace):
        best_g, best_s = None, 0.0
        for germ in space.germs_at(x):
            s = _tree_sum_sq_slope(space, anchors, x, germ)
            if s < best_s:
                best_g, best_s = germ, s
        if best_g is None:
            return TangentVector(space, x, None, 0.0)
        return TangentVector(space, space.canonicalize(x), best_g, -best_s)
    if isinstance(space, ProductSpace):
        la, ra = _anchor_components(space, anchors)
        vl = _sum_sq_grad(space.left, la, x[0])
        vr = _sum_sq_grad(space.right, ra, x[1])
        length = math.hypot(vl.length, vr.length)
        if length == 0.0:
            return TangentVector(space, x, None, 0.0)
        return TangentVector(space, x, (vl, vr), length)
    raise CapabilityError(f"mean squared distance has no gradient rule on {space.kind}")


def _tree_sum_sq_slope(space: TreeSpace, anchors, x, germ) -> float:
    """One-sided slope of the mean squared distance along a germ (exact)."""
    n = len(anchors)
    total = 0.0
    for a in anchors:
        d = space.distance(x, a)
        if d == 0.0:
            continue
        toward = space.log_direction(x, a).data
        cos = 1.0 if toward == germ else -1.0
        total += -2.0 * d * cos
    return total / n


def _tree_quadratic_argmin(space: TreeSpace, terms, x0=None, inv2h: float = 0.0):
    """Exact minimizer over a tree of sum_j c_j d(., z_j)^2 (+ inv2h * d(., x0)^2).

    Each squared distance restricted to an edge is piecewise quadratic with
    unit curvature and one breakpoint, so per-edge minimization is closed
    form; the global minimum scans all edges.
    """
    all_terms = [(c, z) for c, z in terms]
    if inv2h > 0.0:
        all_terms.append((inv2h, x0))
    best_p, best_v = None, math.inf
    for eid, (u, v, length) in enumerate(space.edges):
        pieces = []  # (eps_j, gamma_j, c_j): d_j(s) = eps*s + gamma on the interval
        breaks = {0.0, length}
        plans = []
        for c, z in all_terms:
            z = space.canonicalize(z)
            if z.edge == eid:
                plans.append((c, "on", z.offset, None))
                breaks.add(z.offset)
            else:
                zu = space.point_vertex_distance(z, u)
                zv = space.point_vertex_distance(z, v)
                s_star = 0.5 * (length + zv - zu)
                plans.append((c, "off", zu, zv))
                if 0.0 < s_star < length:
                    breaks.add(s_star)
        cuts = sorted(breaks)
        for lo, hi in zip(cuts, cuts[1:]):
            mid = 0.5 * (lo + hi)
            csum, lin = 0.0, 0.0
            val_terms = []
            for c, kind, a1, a2 in plans:
                if kind == "on":
                    eps, gamma = (1.0, -a1) if mid >= a1 else (-1.0, a1)
                else:
                    via_u = mid + a1
                    via_v = (length - mid) + a2
                    eps, gamma = (1.0, a1) if via_u <= via_v else (-1.0, length + a2)
                csum += c
                lin += c * gamma * eps
                val_terms.append((c, eps, gamma))
            s_min = min(max(-lin / csum, lo), hi) if csum > 0.0 else lo
            for s in (s_min, lo, hi):
                val = sum(c * (eps * s + gamma) ** 2 for c, eps, gamma in val_terms)
                if best_p is None or val < best_v - 1e-15 * max(1.0, abs(best_v)):
                    best_v = val
                    best_p = space.canonicalize(geo.TreePoint(eid, s))
    return best_p, best_v


def _sum_sq_resolvent(space, anchors, x, h):
    n = len(anchors)
    if isinstance(space, (EuclideanSpace, QuadrantSpace)):
        m = tuple(sum(a[i] for a in anchors) / n for i in range(len(x)))
        return tuple((xi + 2.0 * h * mi) / (1.0 + 2.0 * h) for xi, mi in zip(x, m))
    if isinstance(space, TreeSpace):
        terms = [(1.0 / n, a) for a in anchors]
        p, _ = _tree_quadratic_argmin(space, terms, x0=x, inv2h=1.0 / (2.0 * h))
        return p
    if isinstance(space, ProductSpace):
        la, ra = _anchor_components(space, anchors)
        return (
            _sum_sq_resolvent(space.left, la, x[0], h),
            _sum_sq_resolvent(space.right, ra, x[1], h),
        )
    raise CapabilityError(f"mean squared distance has no resolvent rule on {space.kind}")


def sum_squared(space: Space, anchors) -> Functional:
    """Mean squared distance to a finite anchor set; 2-convex along geodesics."""

    if not anchors:
        raise ValidationError("sum_squared needs at least one anchor")
    anchors = [space.validate_point(a) for a in anchors]
    n = len(anchors)

    def ev(t, x):
        return _sum_sq_eval(space, anchors, x)

    def gr(t, x):
        return _sum_sq_grad(space, anchors, x)

    def res(t, x, h):
        return _sum_sq_resolvent(space, anchors, x, h)

    diam = max((space.distance(a, b) for a in anchors for b in anchors), default=0.0)

    f = Functional(
        space=space,
        name="sum_squared",
        lam=2.0,
        eval_fn=ev,
        grad_fn=gr,
        lipschitz_x=lambda t, c, r: 2.0 * (max(space.distance(c, a) for a in anchors) + r),
        lipschitz_t=0.0,
        hoelder=HoelderData(B=1.0, alpha=1.0, B0=math.inf),
        analytic_resolvent=res,
        params={"kind": "sum_squared", "anchors": [geo.point_to_spec(space, a) for a in anchors]},
    )
    f.anchors = anchors
    if isinstance(space, EuclideanSpace):
        m = tuple(sum(a[i] for a in anchors) / n for i in range(space.dim))

        def qdata(t, m=m):
            return 1.0, tuple(-2.0 * c for c in m)

        f.quadratic_data = qdata
    if isinstance(space, TreeSpace):

        def germ_slope(t, x, germ):
            return _tree_sum_sq_slope(space, anchors, x, germ)

        f.germ_slope_fn = germ_slope
    return f


def weighted_sum(space: Space, terms) -> Functional:
    """Nonnegative combination sum_i w_i F_i on a shared space.

    Convexity moduli add. Declared time regularity combines conservatively:
    alpha = min alpha_i, B0 = min B0_i, and each B_i is inflated by
    B0**(alpha_i - alpha) to remain valid down to the common exponent.
    """

    if not terms:
        raise ValidationError("weighted_sum needs at least one term")
    ws, fs = [], []
    for w, f in terms:
        if w < 0:
            raise ValidationError(f"weighted_sum weight {w} is negative")
        if f.space.describe() != space.describe():
            raise ValidationError("weighted_sum terms must share one space")
        ws.append(float(w))
        fs.append(f)
    lam = sum(w * f.lam for w, f in zip(ws, fs))

    def ev(t, x):
        return sum(w * f.eval_fn(t, x) for w, f in zip(ws, fs))

    def gr(t, x):
        if isinstance(space, (EuclideanSpace, QuadrantSpace)):
            dim = len(x)
            acc = [0.0] * dim
            for w, f in zip(ws, fs):
                v = f.grad_fn(t, x)
                if v.is_vertex:
                    continue
                for i in range(dim):
                    acc[i] += w * v.length * v.data[i]
            norm = math.sqrt(sum(c * c for c in acc))
            if norm == 0.0:
                return TangentVector(space, x, None, 0.0)
            return TangentVector(space, x, tuple(c / norm for c in acc), norm)
        if isinstance(space, TreeSpace):
            best_g, best_s = None, 0.0
            for germ in space.germs_at(x):
                s = sum(w * _germ_slope(f, t, x, germ) for w, f in zip(ws, fs))
                if s < best_s:
                    best_g, best_s = germ, s
            if best_g is None:
                return TangentVector(space, x, None, 0.0)
            return TangentVector(space, space.canonicalize(x), best_g, -best_s)
        raise CapabilityError(f"weighted_sum gradient unavailable on {space.kind}")

    hoelder = None
    datas = [f.hoelder for f in fs]
    if all(d is not None for d in datas):
        alpha = min(d.alpha for d in datas)
        b0 = min(d.B0 for d in datas)
        B = 0.0
        for w, d in zip(ws, datas):
            infl = 1.0 if (d.alpha == alpha or not math.isfinite(b0)) else max(1.0, b0 ** (d.alpha - alpha))
            B += w * d.B * infl
        hoelder = HoelderData(B=B, alpha=alpha, B0=b0)

    out = Functional(
        space=space,
        name="weighted_sum",
        lam=lam,
        eval_fn=ev,
        grad_fn=gr,
        lipschitz_x=lambda t, c, r: sum(w * f.lipschitz_x_on(t, c, r) for w, f in zip(ws, fs)),
        lipschitz_t=lambda c, r: sum(w * f.lipschitz_t_on(c, r) for w, f in zip(ws, fs)),
        hoelder=hoelder,
        time_dependent=any(f.time_dependent for f in fs),
        params={
            "kind": "weighted_sum",
            "terms": [{"weight": w, "f": f.describe()} for w, f in zip(ws, fs)],
        },
    )
    out.terms = list(zip(ws, fs))

    if all(f.quadratic_data is not None for f in fs) and isinstance(space, EuclideanSpace):

        def qdata(t):
            a_tot, b_tot = 0.0, [0.0] * space.dim
            for w, f in zip(ws, fs):
                a, b = f.quadratic_data(t)
                a_tot += w * a
                for i in range(space.dim):
                    b_tot[i] += w * b[i]
            return a_tot, tuple(b_tot)

        out.quadratic_data = qdata

        def res(t, x, h):
            a, b = qdata(t)
            denom = 1.0 + 2.0 * a * h
            return tuple((xi - h * bi) / denom for xi, bi in zip(x, b))

        out.analytic_resolvent = res
    return out


def _germ_slope(f: Functional, t, x, germ) -> float:
    """One-sided slope of f(t, .) along a tree germ, analytic when declared."""
    if f.germ_slope_fn is not None:
        return f.germ_slope_fn(t, x, germ)
    space = f.space
    room = _germ_room(space, x, germ)
    if room <= 0.0:
        raise UsageError("germ has no room to move")
    y = space.walk(space.canonicalize(x), germ, min(room, 0.5))
    return directional_derivative(f, t, x, y)


def _germ_room(space: TreeSpace, x, germ) -> float:
    x = space.canonicalize(x)
    u, v, length = space.edges[germ.edge]
    if x.edge == germ.edge:
        pos = x.offset
    else:
        pos = 0.0 if space.at_vertex(x) == u else length
    return (length - pos) if germ.sign > 0 else pos


# ---------------------------------------------------------------------------
# numeric differentials and sampled checks


def directional_derivative(f: Functional, t: float, x, y, rel_tol: float = 1e-6) -> float:
    """One-sided unit-speed slope of f(t, .) at x along the geodesic toward y.

    Forward difference quotients at halving arc lengths, accelerated with
    one Richardson step (the quotient error is linear in the arc for the
    piecewise-smooth catalog).
    """
    space = f.space
    d = space.distance(x, y)
    if d == 0.0:
        raise UsageError("directional derivative needs a distinct target point")
    f0 = f.eval_fn(t, x)
    prev_q = None
    prev_r = None
    frac = 0.25
    for _ in range(45):
        s = frac * d
        q = (f.eval_fn(t, space.geodesic_point(x, y, frac)) - f0) / s
        if prev_q is not None:
            r = 2.0 * q - prev_q
            if prev_r is not None and abs(r - prev_r) <= rel_tol * max(1.0, abs(r)):
                return r
            prev_r = r
        prev_q = q
        frac *= 0.5
        if frac * d < 1e-12:
            break
    return prev_r if prev_r is not None else prev_q


def lambda_convexity_check(f: Functional, t: float, x0, x1, tau: float, tol: float = 1e-9):
    """Convexity along the geodesic x0 -> x1 with modulus f.lam; (ok, slack)."""
    space = f.space
    m = space.geodesic_point(x0, x1, tau)
    d2 = space.distance(x0, x1) ** 2
    rhs = (1.0 - tau) * f.eval_fn(t, x0) + tau * f.eval_fn(t, x1) - 0.5 * f.lam * tau * (1.0 - tau) * d2
    slack = rhs - f.eval_fn(t, m)
    scale = max(1.0, abs(rhs))
    return slack >= -tol * scale, slack


def gradient_support_check(f: Functional, t: float, x, y, tol: float = 1e-5):
    """Descent vector support inequality toward a witness point y; (ok, slack).

    slope along [x -> y] >= -<v, log(x -> y)> / d(x, y), with the slope
    computed by difference quotients.
    """
    space = f.space
    d = space.distance(x, y)
    if d == 0.0:
        raise UsageError("witness point coincides with the base point")
    v = f.grad_fn(t, x)
    w = space.log_direction(x, y)
    slope = directional_derivative(f, t, x, y)
    lower = 0.0 if v.is_vertex else -geo.inner_product(v, w) / d
    slack = slope - lower
    return slack >= -tol * max(1.0, abs(lower)), slack


def gradient_pair_check(f: Functional, t: float, x, y, tol: float = 1e-9):
    """Monotonicity of the descent field between two points; (ok, slack).

    <xi_xy, v_x> + <xi_yx, v_y> >= lam * d(x, y) for unit xi along the
    connecting geodesic.
    """
    space = f.space
    d = space.distance(x, y)
    if d == 0.0:
        raise UsageError("need two distinct points")
    xi1 = space.log_direction(x, y).scaled(1.0 / d)
    xi2 = space.log_direction(y, x).scaled(1.0 / d)
    vx = f.grad_fn(t, x)
    vy = f.grad_fn(t, y)
    lhs = geo.inner_product(xi1, vx) + geo.inner_product(xi2, vy)
    slack = lhs - f.lam * d
    return slack >= -tol * max(1.0, abs(f.lam * d)), slack


def hoelder_check(f: Functional, x, t1: float, t2: float, tol: float = 1e-9):
    """Declared time regularity of the descent field at one point; (ok, slack)."""
    if f.hoelder is None:
        raise UsageError(f"{f.name} declares no time regularity data")
    hd = f.hoelder
    if abs(t1 - t2) > hd.B0:
        raise UsageError(f"|t1 - t2| exceeds the declared window {hd.B0}")
    v1 = f.grad_fn(t1, x)
    v2 = f.grad_fn(t2, x)
    rho = geo.cone_distance(v1, v2)
    bound = hd.B * abs(t1 - t2) ** hd.alpha
    slack = bound - rho
    return slack >= -tol * max(1.0, bound), slack


def random_point_near(space: Space, x, radius: float, rng):
    """Random point at distance about `radius` from x (exact on open ground)."""
    if isinstance(space, EuclideanSpace):
        vec = rng.normal(0.0, 1.0, size=space.dim)
        norm = math.sqrt(float(sum(c * c for c in vec)))
        if norm == 0.0:
            return x
        return tuple(xi + radius * float(c) / norm for xi, c in zip(x, vec))
    if isinstance(space, QuadrantSpace):
        a = float(rng.uniform(0.0, 2.0 * math.pi))
        return (max(0.0, x[0] + radius * math.cos(a)), max(0.0, x[1] + radius * math.sin(a)))
    if isinstance(space, TreeSpace):
        germs = space.germs_at(space.canonicalize(x))
        germ = germs[int(rng.integers(0, len(germs)))]

        def chooser(options):
            return options[int(rng.integers(0, len(options)))]

        return space.walk(space.canonicalize(x), germ, radius, chooser=chooser)
    if isinstance(space, ProductSpace):
        a = float(rng.uniform(0.0, 0.5 * math.pi))
        return (
            random_point_near(space.left, x[0], radius * math.cos(a), rng),
            random_point_near(space.right, x[1], radius * math.sin(a), rng),
        )
    raise CapabilityError(f"no near-point sampler for space kind {space.kind}")


def absolute_gradient_estimate(f: Functional, t: float, x, sample_count: int, radius_schedule, rng) -> float:
    """Sampling estimate of the local steepest decay rate of f(t, .) at x.

    max over sampled y of (F(x) - F(y)) / d(x, y), clipped at 0, computed on
    each radius and extrapolated linearly to radius 0. Matches the descent
    vector length on the catalog.
    """
    radii = list(radius_schedule)
    if not radii:
        raise UsageError("radius schedule must be nonempty")
    if sample_count < 1:
        raise UsageError("sample_count must be positive")
    space = f.space
    f0 = f.eval_fn(t, x)
    slopes = []
    for r in radii:
        best = 0.0
        for _ in range(sample_count):
            y = random_point_near(space, x, r, rng)
            d = space.distance(x, y)
            if d == 0.0:
                continue
            best = max(best, (f0 - f.eval_fn(t, y)) / d)
        slopes.append(best)
    if len(radii) == 1:
        return max(0.0, slopes[0])
    # least-squares line slope(r) ~ s0 + c r, report the intercept
    n = len(radii)
    mr = sum(radii) / n
    ms = sum(slopes) / n
    denom = sum((r - mr) ** 2 for r in radii)
    if denom == 0.0:
        return max(0.0, ms)
    c = sum((r - mr) * (s - ms) for r, s in zip(radii, slopes)) / denom
    return max(0.0, ms - c * mr)


def functional_from_spec(space: Space, obj: dict, field_name: str = "functional") -> Functional:
    """Build a catalog functional from its config mapping."""
    if not isinstance(obj, dict):
        raise ValidationError(f"{field_name}: expected a mapping")
    kind = obj.get("kind")
    if kind == "linear_drift":
        if space.describe() != {"kind": "euclidean", "dim": 1}:
            raise ValidationError(f"{field_name}: linear_drift lives on euclidean dim 1")
        return linear_drift()
    if kind == "min_coordinate":
        if space.kind != "quadrant":
            raise ValidationError(f"{field_name}: min_coordinate lives on the quadrant")
        return min_coordinate()
    if kind == "moving_min":
        if space.kind != "quadrant":
            raise ValidationError(f"{field_name}: moving_min lives on the quadrant")
        return moving_min()
    if kind == "sum_squared":
        anchors = obj.get("anchors")
        if not isinstance(anchors, list) or not anchors:
            raise ValidationError(f"{field_name}.anchors: expected a nonempty list")
        try:
            pts = [geo.point_from_spec(space, a, f"{field_name}.anchors[{i}]") for i, a in enumerate(anchors)]
        except ValidationError:
            raise
        return sum_squared(space, pts)
    if kind == "distance_to_target":
        from . import pursuit

        tgt = obj.get("target")
        if tgt is None:
            raise ValidationError(f"{field_name}.target: required for distance_to_target")
        moving = pursuit.target_from_spec(space, tgt, f"{field_name}.target")
        return pursuit.distance_to_target(space, moving)
    if kind == "weighted_sum":
        terms = obj.get("terms")
        if not isinstance(terms, list) or not terms:
            raise ValidationError(f"{field_name}.terms: expected a nonempty list")
        built = []
        for i, term in enumerate(terms):
            if not isinstance(term, dict) or "weight" not in term or "f" not in term:
                raise ValidationError(f"{field_name}.terms[{i}]: needs 'weight' and 'f'")
            w = term["weight"]
            if not isinstance(w, (int, float)) or w < 0:
                raise ValidationError(f"{field_name}.terms[{i}].weight: must be nonnegative")
            built.append((float(w), functional_from_spec(space, term["f"], f"{field_name}.terms[{i}].f")))
        return weighted_sum(space, built)
    raise ValidationError(f"{field_name}.kind: unknown functional kind {kind!r}")
