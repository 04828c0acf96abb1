"""Step kernels: the compiled and pure-Python backends must agree bitwise."""

from __future__ import annotations

import pytest

from cat0flow import kernels
from cat0flow.kernels import _pykernels as pyk


def test_backend_is_reported():
    assert kernels.backend() in ("compiled", "python")


def test_linear_drift_steps_bitwise():
    fast = kernels.linear_drift_steps(0.0, 0.0, 1e-3, 2000, 7)
    slow = pyk.linear_drift_steps(0.0, 0.0, 1e-3, 2000, 7)
    assert list(fast[0]) == list(slow[0])
    assert list(fast[1]) == list(slow[1])


def test_sum_squared_steps_bitwise():
    fast = kernels.sum_squared_steps([3.0, -1.0], [0.5, 0.5], 0.0, 0.01, 500, 3)
    slow = pyk.sum_squared_steps([3.0, -1.0], [0.5, 0.5], 0.0, 0.01, 500, 3)
    assert list(fast[0]) == list(slow[0])
    assert [list(p) for p in fast[1]] == [list(p) for p in slow[1]]


def test_pursue_point_steps_bitwise():
    key_t = [0.0, 5.0]
    key_p = [[4.0, 0.0], [4.0, 5.0]]
    args = ([0.0, 0.0], 0.0, 0.01, 500, key_t, key_p, 1e-3, 1)
    fast = kernels.pursue_point_steps(*args)
    slow = pyk.pursue_point_steps(*args)
    assert list(fast[0]) == list(slow[0])
    assert [list(p) for p in fast[1]] == [list(p) for p in slow[1]]
    assert list(fast[2]) == list(slow[2])
    assert fast[3] == slow[3]  # captured flag
    assert fast[4] == slow[4]  # capture time
    assert fast[5] == slow[5]  # final step index


def test_pursue_point_steps_capture_semantics():
    # stationary target two units away, h = 0.1: capture on the grid node
    # right after the gap first dips under eps
    rt, rx, rg, captured, t_cap, last = pyk.pursue_point_steps(
        [0.0, 0.0], 0.0, 0.1, 100, [0.0], [[2.0, 0.0]], 1e-9, 1
    )
    assert captured
    assert t_cap == pytest.approx(2.0, abs=0.1 + 1e-12)
    assert rg[-1] <= 1e-9


def test_kernel_trajectory_matches_direct_formula():
    times, xs = pyk.linear_drift_steps(0.0, 0.0, 0.5, 4, 1)
    # x_{k+1} = x_k + (t_k + 1) h with t_k = k h
    want = [0.0]
    for k in range(4):
        want.append(want[-1] + (k * 0.5 + 1.0) * 0.5)
    assert xs == pytest.approx(want)
    assert times == pytest.approx([0.0, 0.5, 1.0, 1.5, 2.0])
