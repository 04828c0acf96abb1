"""Implicit descent steps: minimizers of the step energy
F(t0, y) + d(x0, y)^2 / (2h).

For convexity modulus lam the map x0 -> minimizer contracts distances by
1/(1 + lam h), which is what every curve construction in this package
iterates. Step sizes must stay inside the admissible interval: positive,
below -1/(2 lam) when lam < 0, and within the quadratic-growth window
(0, 1/(16 A)] when a growth constant A > 0 is declared.
"""

from __future__ import annotations

import math

from .errors import CapabilityError, SolverError, StepSizeError
from .functionals import Functional

__all__ = [
    "admissible_upper_bound",
    "check_step",
    "resolve",
    "resolve_numeric",
    "resolvent_contraction_check",
    "step_energy",
]

TERNARY_MAX_ITER = 200
TERNARY_TOL = 1e-10


def admissible_upper_bound(f: Functional) -> float:
    """Supremum of admissible step sizes (math.inf when unconstrained)."""
    hi = math.inf
    if f.lam < 0.0:
        hi = min(hi, -1.0 / (2.0 * f.lam))
    if f.growth_a > 0.0:
        hi = min(hi, 1.0 / (16.0 * f.growth_a))
    return hi


def check_step(f: Functional, h: float):
    if not h > 0.0:
        raise StepSizeError(f"step size must be positive, got {h}")
    if f.lam < 0.0 and h >= -1.0 / (2.0 * f.lam):
        raise StepSizeError(f"step {h} >= {-1.0 / (2.0 * f.lam)} is inadmissible for lam={f.lam}")
    if f.growth_a > 0.0 and h > 1.0 / (16.0 * f.growth_a):
        raise StepSizeError(f"step {h} outside the growth window (0, {1.0 / (16.0 * f.growth_a)}]")


def step_energy(f: Functional, t0: float, x0, h: float):
    """The strictly convex objective whose minimizer is the descent step."""
    check_step(f, h)
    space = f.space
    inv2h = 1.0 / (2.0 * h)

    def energy(y):
        return f.eval_fn(t0, y) + space.distance(x0, y) ** 2 * inv2h

    return energy


def resolve(f: Functional, t0: float, x0, h: float, verify_descent: bool = True):
    """Step-energy minimizer, analytic when the functional provides one.

    verify_descent re-evaluates the energy at the result and raises
    SolverError if it exceeds the energy at x0 (which is F(t0, x0)).
    """
    check_step(f, h)
    if f.analytic_resolvent is not None:
        out = f.analytic_resolvent(t0, x0, h)
    else:
        out = resolve_numeric(f, t0, x0, h)
    if verify_descent:
        e0 = f.eval_fn(t0, x0)
        e1 = f.eval_fn(t0, out) + f.space.distance(x0, out) ** 2 / (2.0 * h)
        if e1 > e0 + 1e-9 * max(1.0, abs(e0)):
            raise SolverError(f"step energy increased ({e1} > {e0}) at t={t0}", best=out)
    return out


def resolve_numeric(f: Functional, t0: float, x0, h: float, tol: float = TERNARY_TOL):
    """Ternary search for the step-energy minimizer on a candidate geodesic.

    The functional must provide candidate_target(t0, x0, h) returning a far
    point y with the minimizer on [x0, y]; the restricted energy is strictly
    convex there, so bracketing is safe.
    """
    check_step(f, h)
    if f.candidate_target is None:
        raise CapabilityError(f"{f.name} provides neither a closed-form resolvent nor a search segment")
    space = f.space
    y_far = f.candidate_target(t0, x0, h)
    d = space.distance(x0, y_far)
    if d == 0.0:
        return x0
    energy = step_energy(f, t0, x0, h)

    def at(s: float):
        return space.geodesic_point(x0, y_far, s / d)

    lo, hi = 0.0, d
    for _ in range(TERNARY_MAX_ITER):
        if hi - lo <= tol:
            break
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if energy(at(m1)) <= energy(at(m2)):
            hi = m2
        else:
            lo = m1
    else:
        raise SolverError("ternary search did not reach tolerance", best=at(0.5 * (lo + hi)))
    return at(0.5 * (lo + hi))


def resolvent_contraction_check(f: Functional, t0: float, x, y, h: float, numeric_tol: float = 0.0):
    """One-step contraction ratio versus the 1/(1 + lam h) bound.

    Returns (ok, ratio, bound). numeric_tol loosens the bound by
    2 * numeric_tol / d(x, y) to absorb search tolerances.
    """
    space = f.space
    d0 = space.distance(x, y)
    if d0 == 0.0:
        raise StepSizeError("contraction ratio needs distinct start points")
    jx = resolve(f, t0, x, h, verify_descent=False)
    jy = resolve(f, t0, y, h, verify_descent=False)
    ratio = space.distance(jx, jy) / d0
    bound = (1.0 + 1e-9) / (1.0 + f.lam * h) + 2.0 * numeric_tol / d0
    return ratio <= bound, ratio, bound
