"""Descent curves: schemes, closed-form paths, semigroup and shift bounds."""

from __future__ import annotations

import math

import pytest

from cat0flow import flow
from cat0flow.errors import StepSizeError, UsageError, ValidationError
from cat0flow.flow import (
    dyadic_scheme,
    euler_scheme,
    fixed_time_curve,
    flow_map_split_gap,
    refinement_study,
    run_report,
    scheme_from_spec,
    semigroup_restart_gap,
    time_dependent_curve,
    time_shift_check,
    write_trajectory_csv,
)
from cat0flow.functionals import HoelderData, linear_drift, min_coordinate, moving_min, sum_squared
from cat0flow.geometry import EuclideanSpace
from cat0flow.pursuit import MovingTarget, distance_to_target


def _drift_exact(t):
    return t * t / 2.0 + t


def test_scheme_from_spec_round_trip():
    s1 = scheme_from_spec({"euler_proximal": {"h": 0.25}})
    assert (s1.kind, s1.h) == ("euler_proximal", 0.25)
    s2 = scheme_from_spec({"dyadic": {"n": 4, "m": 2}})
    assert (s2.kind, s2.n, s2.m) == ("dyadic", 4, 2)
    assert scheme_from_spec({"dyadic": {"n": 4}}).m == 8


def test_scheme_from_spec_diagnostics():
    with pytest.raises(ValidationError, match="scheme"):
        scheme_from_spec({"leapfrog": {}})
    with pytest.raises(ValidationError, match="scheme.euler_proximal.h"):
        scheme_from_spec({"euler_proximal": {"h": -1.0}})
    with pytest.raises(ValidationError, match="scheme.dyadic.n"):
        scheme_from_spec({"dyadic": {"n": -1}})
    with pytest.raises(ValidationError):
        euler_scheme(0.0)
    with pytest.raises(ValidationError):
        dyadic_scheme(3, 0)


def test_linear_drift_euler_tracks_closed_form():
    f = linear_drift()
    traj = time_dependent_curve(f, 0.0, (0.0,), 2.0, euler_scheme(1e-2))
    worst = max(abs(p[0] - _drift_exact(t)) for t, p in zip(traj.times, traj.points))
    assert worst <= 2e-2
    assert traj.termination.kind == "completed"
    assert traj.times[0] == 0.0 and traj.times[-1] == pytest.approx(2.0)


def test_dyadic_matches_euler_on_linear_drift():
    f = linear_drift()
    # a dyadic run with n blocks of m substeps is the euler run at h = s/(2^n m)
    tr_d = time_dependent_curve(f, 0.0, (0.0,), 2.0, dyadic_scheme(3, 4), record_every=2**12)
    h = 2.0 / (2**3 * 4)
    tr_e = time_dependent_curve(f, 0.0, (0.0,), 2.0, euler_scheme(h), record_every=2**12)
    assert tr_d.end_point[0] != tr_e.end_point[0]  # freeze times differ
    # but both land within the first-order error of the limit curve
    assert abs(tr_d.end_point[0] - _drift_exact(2.0)) <= 2.0 * h * 4
    assert abs(tr_e.end_point[0] - _drift_exact(2.0)) <= 2.0 * h


def test_record_every_keeps_endpoints():
    f = linear_drift()
    traj = time_dependent_curve(f, 0.0, (0.0,), 1.0, euler_scheme(0.01), record_every=17)
    assert traj.times[0] == 0.0
    assert traj.times[-1] == pytest.approx(1.0)
    assert len(traj.times) < 102


def test_partial_final_step():
    f = linear_drift()
    traj = time_dependent_curve(f, 0.0, (0.0,), 0.25, euler_scheme(0.1))
    assert traj.times[-1] == pytest.approx(0.25)
    assert abs(traj.end_point[0] - _drift_exact(0.25)) <= 0.2


def test_horizon_and_record_every_validation():
    f = linear_drift()
    with pytest.raises(UsageError):
        time_dependent_curve(f, 0.0, (0.0,), 0.0, euler_scheme(0.1))
    with pytest.raises(UsageError):
        time_dependent_curve(f, 0.0, (0.0,), 1.0, euler_scheme(0.1), record_every=0)


def test_fixed_time_curve_min_coordinate_slide():
    f = min_coordinate()
    out = fixed_time_curve(f, 0.0, (1.0, 0.0), 0.5, 500)
    assert out == pytest.approx((1.0, 0.5), abs=1e-3)
    out2 = fixed_time_curve(f, 0.0, (1.0, 0.0), 2.0, 2000)
    assert out2 == pytest.approx((1.5, 1.5), abs=1e-3)


def test_moving_min_stops_on_the_sweeping_kink():
    f = moving_min()
    traj = time_dependent_curve(f, 0.0, (2.0, 0.5), 3.0, euler_scheme(1e-2))
    assert traj.termination.kind == "singular_locus"
    assert traj.termination.time == pytest.approx(0.75, abs=5e-2)
    assert f.space.distance(traj.end_point, (2.0, 1.25)) <= 5e-2


def test_moving_min_above_the_kink_completes():
    f = moving_min()
    traj = time_dependent_curve(f, 0.0, (0.5, 2.0), 3.0, euler_scheme(1e-2))
    assert traj.termination.kind == "completed"
    assert traj.end_point[1] == pytest.approx(2.0)


def test_moving_min_singular_start_reports_immediately():
    f = moving_min()
    traj = time_dependent_curve(f, 0.0, (1.0, 1.0), 1.0, euler_scheme(0.1))
    assert traj.termination.kind == "singular_locus"
    assert traj.times == [0.0]


def test_static_diagonal_slide_is_not_a_stop():
    # the static kink is a valid resting set: the curve glues to it and slides
    f = min_coordinate()
    traj = time_dependent_curve(f, 0.0, (1.0, 0.0), 2.0, euler_scheme(1e-3))
    assert traj.termination.kind == "completed"
    assert traj.end_point == pytest.approx((1.5, 1.5), abs=1e-2)


def test_flow_map_split_gap_zero_for_translation():
    f = linear_drift()
    assert flow_map_split_gap(f, 0.3, (0.7,), 0.01, 37, 63) == 0.0


def test_semigroup_restart_gap_small():
    f = min_coordinate()
    gap = semigroup_restart_gap(f, 0.0, (1.0, 0.0), 1.0, 1.0, dyadic_scheme(10))
    assert gap <= 1e-3


def test_refinement_study_decays_at_first_order():
    f = linear_drift()
    rows = refinement_study(f, 0.0, (0.0,), 2.0, range(4, 8))
    for row in rows:
        assert row["measured"] <= row["predicted"]
    ratios = [b["measured"] / a["measured"] for a, b in zip(rows, rows[1:])]
    for r in ratios:
        assert r == pytest.approx(0.5, rel=0.15)


def test_refinement_study_needs_regularity_data():
    with pytest.raises(UsageError):
        refinement_study(moving_min(), 0.0, (0.5, 2.0), 1.0, [4, 5])


def test_time_shift_linear_drift_is_exact():
    f = linear_drift()
    for t1, t2, s in ((0.0, 0.5, 1.0), (0.2, 0.9, 0.7)):
        ok, measured, bound = time_shift_check(f, (0.0,), t1, t2, s, 64)
        assert ok
        assert measured == pytest.approx(s * abs(t1 - t2), abs=1e-12)
        assert bound == pytest.approx(2.0 * s * abs(t1 - t2))


def test_time_shift_respects_declared_window():
    f = linear_drift()
    tight = HoelderData(B=1.0, alpha=1.0, B0=0.1)
    with pytest.raises(UsageError):
        time_shift_check(f, (0.0,), 0.0, 0.5, 1.0, 16, hoelder=tight)


def test_dyadic_block_admissibility():
    sp = EuclideanSpace(2)
    f = sum_squared(sp, [(0.0, 0.0)])
    f.hoelder = HoelderData(B=1.0, alpha=1.0, B0=0.01)
    with pytest.raises(StepSizeError, match="raise n"):
        time_dependent_curve(f, 0.0, (1.0, 1.0), 1.0, dyadic_scheme(2))
    traj = time_dependent_curve(f, 0.0, (1.0, 1.0), 1.0, dyadic_scheme(7), record_every=2**10)
    assert traj.termination.kind == "completed"


def test_run_report_shape():
    f = linear_drift()
    traj = time_dependent_curve(f, 0.0, (0.0,), 1.0, dyadic_scheme(4), record_every=4)
    report = run_report(f, traj)
    assert report["scheme"] == "dyadic"
    assert report["constants"]["lambda"] == 0.0
    assert report["constants"]["B"] == 1.0
    assert report["error_bound"] == pytest.approx(2.0 * 1.0 * 2.0 ** (-4))
    assert report["termination"]["kind"] == "completed"


def test_trajectory_csv_format(tmp_path):
    f = linear_drift()
    traj = time_dependent_curve(f, 0.0, (0.0,), 0.5, euler_scheme(0.1))
    path = tmp_path / "traj.csv"
    write_trajectory_csv(f, traj, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "t,x,F,grad_norm"
    assert len(lines) == len(traj.times) + 1
    cells = lines[1].split(",")
    assert float(cells[0]) == 0.0 and float(cells[1]) == 0.0
    # full precision cells survive a float round trip
    assert all(format(float(c), ".17g") == c for c in cells)


def test_kernel_route_agrees_with_generic_loop():
    f = linear_drift()
    fast = time_dependent_curve(f, 0.0, (0.0,), 1.0, euler_scheme(0.01))
    f.singular = lambda t, x, margin=0.0: False  # forces the generic loop
    f.time_dependent = True
    slow = time_dependent_curve(f, 0.0, (0.0,), 1.0, euler_scheme(0.01))
    assert fast.times == slow.times
    assert all(a == b for a, b in zip(fast.points, slow.points))


def test_pursuit_functional_curve_follows_target():
    sp = EuclideanSpace(2)
    target = MovingTarget(sp, "point", [0.0, 10.0], [(5.0, 0.0), (5.0, 10.0)])
    f = distance_to_target(sp, target)
    traj = time_dependent_curve(f, 0.0, (0.0, 0.0), 2.0, euler_scheme(0.01), record_every=10)
    # unit-speed chase strictly shrinks the gap against this slower transverse runner
    assert f.eval(2.0, traj.end_point) < f.eval(0.0, (0.0, 0.0))
