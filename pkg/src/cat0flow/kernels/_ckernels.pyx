# cython: boundscheck=False, wraparound=False
"""Compiled mirror of _pykernels. Same arithmetic, same operation order,
so results are bit-identical to the fallback; only the speed differs.
Keep any edit in lockstep with _pykernels.py."""

import numpy as np

from libc.math cimport sqrt

BACKEND = "compiled"


def linear_drift_steps(double x0, double t0, double h, long n_steps, long record_every):
    cdef double x = x0
    cdef double t = t0
    cdef long i
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


def sum_squared_steps(x0, mean, double t0, double h, long n_steps, long record_every):
    cdef long d = len(x0)
    if d > 64:
        raise ValueError("dimension too large for the compiled kernel")
    cdef double xbuf[64]
    cdef double mbuf[64]
    cdef long i, j
    cdef double t
    cdef double denom = 1.0 + 2.0 * h
    for j in range(d):
        xbuf[j] = x0[j]
        mbuf[j] = mean[j]
    rec_t = []
    rec_x = []
    for i in range(n_steps):
        t = t0 + i * h
        if i % record_every == 0:
            rec_t.append(t)
            rec_x.append([xbuf[j] for j in range(d)])
        for j in range(d):
            xbuf[j] = (xbuf[j] + 2.0 * h * mbuf[j]) / denom
    rec_t.append(t0 + n_steps * h)
    rec_x.append([xbuf[j] for j in range(d)])
    return rec_t, rec_x


def pursue_point_steps(x0, double t0, double h, long n_steps, key_t, key_p,
                       double capture_eps, long record_every):
    cdef long d = len(x0)
    if d > 64:
        raise ValueError("dimension too large for the compiled kernel")
    cdef double[::1] kt = np.ascontiguousarray(key_t, dtype=np.float64)
    cdef double[:, ::1] kp = np.ascontiguousarray(key_p, dtype=np.float64)
    cdef long nk = kt.shape[0]
    cdef double xbuf[64]
    cdef double ebuf[64]
    cdef long i, j
    cdef long seg = 0
    cdef long last = n_steps
    cdef double t, u, s, diff, gap, frac
    cdef bint captured = False
    cdef bint hit
    cdef double t_capture = -1.0
    for j in range(d):
        xbuf[j] = x0[j]
    rec_t = []
    rec_x = []
    rec_gap = []
    for i in range(n_steps + 1):
        t = t0 + i * h
        while seg < nk - 2 and t >= kt[seg + 1]:
            seg += 1
        if t <= kt[0]:
            for j in range(d):
                ebuf[j] = kp[0, j]
        elif t >= kt[nk - 1]:
            for j in range(d):
                ebuf[j] = kp[nk - 1, j]
        else:
            u = (t - kt[seg]) / (kt[seg + 1] - kt[seg])
            for j in range(d):
                ebuf[j] = kp[seg, j] + u * (kp[seg + 1, j] - kp[seg, j])
        s = 0.0
        for j in range(d):
            diff = xbuf[j] - ebuf[j]
            s += diff * diff
        gap = sqrt(s)
        hit = gap <= capture_eps
        if i % record_every == 0 or i == n_steps or hit:
            rec_t.append(t)
            rec_x.append([xbuf[j] for j in range(d)])
            rec_gap.append(gap)
        if hit:
            captured = True
            t_capture = t
            last = i
            break
        if i < n_steps:
            frac = (h if h < gap else gap) / gap
            for j in range(d):
                xbuf[j] = xbuf[j] + frac * (ebuf[j] - xbuf[j])
    return rec_t, rec_x, rec_gap, bool(captured), t_capture, last
