"""Pure-Python step loops for the three hottest integration paths.

The compiled extension (_ckernels) implements the same three functions with
identical arithmetic and operation order, so both backends produce
bit-identical trajectories. Keep any edit here in lockstep with the .pyx.
"""

from __future__ import annotations

import math

BACKEND = "python"


def linear_drift_steps(x0: float, t0: float, h: float, n_steps: int, record_every: int):
    """Explicit steps x += (t + 1) h for the linear drift energy on the line.

    Returns (times, positions) recorded every record_every nodes plus the
    final node.
    """
    x = x0
    rec_t = []
    rec_x = []
    for i in range(n_steps):
        t = t0 + i * h
        if i % record_every == 0:
            rec_t.append(t)
            rec_x.append(x)
        x = x + (t + 1.0) * h
    rec_t.append(t0 + n_steps * h)
    rec_x.append(x)
    return rec_t, rec_x


def sum_squared_steps(x0, mean, t0: float, h: float, n_steps: int, record_every: int):
    """Implicit steps x -> (x + 2 h m) / (1 + 2 h) toward the anchor mean."""
    d = len(x0)
    x = list(x0)
    m = list(mean)
    denom = 1.0 + 2.0 * h
    rec_t = []
    rec_x = []
    for i in range(n_steps):
        t = t0 + i * h
        if i % record_every == 0:
            rec_t.append(t)
            rec_x.append(list(x))
        for j in range(d):
            x[j] = (x[j] + 2.0 * h * m[j]) / denom
    rec_t.append(t0 + n_steps * h)
    rec_x.append(list(x))
    return rec_t, rec_x


def pursue_point_steps(x0, t0: float, h: float, n_steps: int, key_t, key_p, capture_eps: float, record_every: int):
    """Chase a keyframed point target: step min(h, gap) toward it per node.

    key_t / key_p hold the target keyframes (strictly increasing times).
    Returns (times, positions, gaps, captured, t_capture, nodes_done); the
    capture node is always recorded.
    """
    d = len(x0)
    nk = len(key_t)
    x = list(x0)
    e = [0.0] * d
    rec_t = []
    rec_x = []
    rec_gap = []
    captured = False
    t_capture = -1.0
    last = n_steps
    seg = 0
    for i in range(n_steps + 1):
        t = t0 + i * h
        # piecewise-linear target position; seg only moves forward
        while seg < nk - 2 and t >= key_t[seg + 1]:
            seg += 1
        if t <= key_t[0]:
            for j in range(d):
                e[j] = key_p[0][j]
        elif t >= key_t[nk - 1]:
            for j in range(d):
                e[j] = key_p[nk - 1][j]
        else:
            u = (t - key_t[seg]) / (key_t[seg + 1] - key_t[seg])
            for j in range(d):
                e[j] = key_p[seg][j] + u * (key_p[seg + 1][j] - key_p[seg][j])
        s = 0.0
        for j in range(d):
            diff = x[j] - e[j]
            s += diff * diff
        gap = math.sqrt(s)
        hit = gap <= capture_eps
        if i % record_every == 0 or i == n_steps or hit:
            rec_t.append(t)
            rec_x.append(list(x))
            rec_gap.append(gap)
        if hit:
            captured = True
            t_capture = t
            last = i
            break
        if i < n_steps:
            frac = (h if h < gap else gap) / gap
            for j in range(d):
                x[j] = x[j] + frac * (e[j] - x[j])
    return rec_t, rec_x, rec_gap, captured, t_capture, last
