"""Time the compiled step kernels against the pure-Python fallback.

Usage: python benchmarks/benchmark_kernels.py [--steps N] [--repeat K]

Each kernel runs the same workload on both backends; the table reports the
best-of-K wall time per backend and the speedup. Results are also checked
for bitwise equality, since the two implementations promise identical
arithmetic.
"""

from __future__ import annotations

import argparse
import time

from cat0flow import kernels
from cat0flow.kernels import _pykernels


def _best_of(fn, args, repeat: int) -> tuple[float, object]:
    best = float("inf")
    out = None
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - start)
    return best, out


def _workloads(steps: int):
    key_t = [0.25 * k for k in range(41)]
    key_p = [[5.0 + 4.0 * ((k % 4) - 1.5), 5.0 - 4.0 * ((k % 3) - 1.0)] for k in range(41)]
    return [
        ("linear_drift_steps", (0.0, 0.0, 1e-4, steps, 1000)),
        ("sum_squared_steps", ([3.0, -1.0, 2.0], [0.5, 0.5, 0.0], 0.0, 1e-4, steps, 1000)),
        ("pursue_point_steps", ([0.0, 0.0], 0.0, 1e-4, steps, key_t, key_p, 1e-9, 1000)),
    ]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--steps", type=int, default=200_000, help="nodes per kernel run")
    parser.add_argument("--repeat", type=int, default=5, help="timing repetitions, best kept")
    args = parser.parse_args(argv)

    print(f"active backend: {kernels.backend()} (steps={args.steps}, repeat={args.repeat})")
    if not kernels.HAVE_COMPILED:
        print("compiled extension not available; timing the fallback against itself")
    header = f"{'kernel':<22}{'python':>12}{'compiled':>12}{'speedup':>10}  identical"
    print(header)
    print("-" * len(header))
    for name, wargs in _workloads(args.steps):
        t_py, out_py = _best_of(getattr(_pykernels, name), wargs, args.repeat)
        t_c, out_c = _best_of(getattr(kernels, name), wargs, args.repeat)
        same = out_py == out_c
        print(f"{name:<22}{t_py * 1e3:>10.2f}ms{t_c * 1e3:>10.2f}ms{t_py / t_c:>9.1f}x  {same}")
        if not same:
            raise SystemExit(f"{name}: backend outputs differ")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
