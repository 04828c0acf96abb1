"""Proximal steps: admissibility, energy descent, contraction."""

from __future__ import annotations

import math

import pytest

from cat0flow.errors import CapabilityError, SolverError, StepSizeError
from cat0flow.functionals import Functional, linear_drift, min_coordinate, sum_squared
from cat0flow.geometry import EuclideanSpace, TangentVector
from cat0flow.resolvent import (
    admissible_upper_bound,
    check_step,
    resolve,
    resolve_numeric,
    resolvent_contraction_check,
    step_energy,
)


def _concave_quadratic(lam=-1.0):
    """F(x) = lam/2 x^2 on the line: the lam < 0 edge of the admissible window."""
    sp = EuclideanSpace(1)

    def ev(t, x):
        return 0.5 * lam * x[0] * x[0]

    def gr(t, x):
        mag = abs(lam * x[0])
        if mag == 0.0:
            return TangentVector(sp, x, None, 0.0)
        return TangentVector(sp, x, (1.0 if lam * x[0] < 0 else -1.0,), mag)

    def res(t, x, h):
        # minimizer of lam/2 y^2 + (y - x)^2 / 2h, valid while 1 + lam h > 0
        return (x[0] / (1.0 + lam * h),)

    return Functional(
        space=sp,
        name="concave_quadratic",
        lam=lam,
        eval_fn=ev,
        grad_fn=gr,
        analytic_resolvent=res,
    )


def test_step_must_be_positive():
    f = linear_drift()
    with pytest.raises(StepSizeError):
        check_step(f, 0.0)
    with pytest.raises(StepSizeError):
        check_step(f, -0.1)


def test_negative_modulus_narrows_the_window():
    f = _concave_quadratic(lam=-1.0)
    assert admissible_upper_bound(f) == pytest.approx(0.5)
    check_step(f, 0.49)
    with pytest.raises(StepSizeError):
        check_step(f, 0.5)
    with pytest.raises(StepSizeError):
        resolve(f, 0.0, (1.0,), 0.75)


def test_growth_window_caps_steps():
    f = linear_drift()
    f.growth_a = 1.0
    check_step(f, 1.0 / 16.0)
    with pytest.raises(StepSizeError):
        check_step(f, 1.0 / 16.0 + 1e-9)


def test_nonnegative_modulus_is_unconstrained():
    assert admissible_upper_bound(linear_drift()) == math.inf
    check_step(min_coordinate(), 1e6)


def test_resolve_decreases_step_energy():
    f = sum_squared(EuclideanSpace(2), [(1.0, 0.0), (0.0, 1.0)])
    x = (3.0, 3.0)
    out = resolve(f, 0.0, x, 0.2)
    energy = step_energy(f, 0.0, x, 0.2)
    assert energy(out) <= f.eval(0.0, x)


def test_resolve_flags_ascent():
    f = linear_drift()
    f.analytic_resolvent = lambda t, x, h: (x[0] - 1.0,)  # walks uphill
    with pytest.raises(SolverError):
        resolve(f, 0.0, (0.0,), 0.1)


def test_resolve_numeric_matches_analytic():
    sp = EuclideanSpace(1)
    f = sum_squared(sp, [(1.0,)])
    want = f.analytic_resolvent(0.0, (0.0,), 0.3)
    f.analytic_resolvent = None
    f.candidate_target = lambda t, x, h: (1.0,)
    got = resolve_numeric(f, 0.0, (0.0,), 0.3)
    assert got[0] == pytest.approx(want[0], abs=1e-8)


def test_resolve_numeric_needs_a_segment():
    f = linear_drift()
    f.analytic_resolvent = None
    with pytest.raises(CapabilityError):
        resolve(f, 0.0, (0.0,), 0.1)


def test_contraction_bound_negative_modulus(rng):
    # 1/(1 + lam h) exceeds one when lam < 0: steps may spread points apart,
    # but never faster than the bound
    f = _concave_quadratic(lam=-1.0)
    for h in (0.1, 0.25):
        for _ in range(50):
            x = (float(rng.normal(0.0, 2.0)),)
            y = (float(rng.normal(0.0, 2.0)),)
            if x == y:
                continue
            ok, ratio, bound = resolvent_contraction_check(f, 0.0, x, y, h)
            assert ok, (ratio, bound)
            assert ratio == pytest.approx(1.0 / (1.0 - h), rel=1e-12)


def test_contraction_sampled_catalog(rng):
    fs = [
        linear_drift(),
        min_coordinate(),
        sum_squared(EuclideanSpace(2), [(0.0, 0.0), (2.0, 2.0)]),
    ]
    for f in fs:
        for _ in range(50):
            x = f.space.random_point(rng)
            y = f.space.random_point(rng)
            if f.space.distance(x, y) == 0.0:
                continue
            ok, ratio, bound = resolvent_contraction_check(f, 0.0, x, y, 0.1)
            assert ok, (f.name, ratio, bound)


def test_contraction_rejects_coincident_points():
    f = linear_drift()
    with pytest.raises(StepSizeError):
        resolvent_contraction_check(f, 0.0, (1.0,), (1.0,), 0.1)
