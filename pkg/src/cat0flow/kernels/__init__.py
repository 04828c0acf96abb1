"""Hot-loop step kernels with a compiled core and a pure-Python fallback.

Importing this package picks the compiled extension when it is present and
silently degrades to the Python implementation otherwise. Both produce
bit-identical output; the compiled one is just faster. `backend()` reports
which one is active, and the benchmarks/ script times them side by side.
"""

from __future__ import annotations

try:
    from . import _ckernels as _impl

    HAVE_COMPILED = True
except ImportError:
    from . import _pykernels as _impl

    HAVE_COMPILED = False

from . import _pykernels

linear_drift_steps = _impl.linear_drift_steps
sum_squared_steps = _impl.sum_squared_steps
pursue_point_steps = _impl.pursue_point_steps


def backend() -> str:
    return _impl.BACKEND


__all__ = [
    "HAVE_COMPILED",
    "backend",
    "linear_drift_steps",
    "pursue_point_steps",
    "sum_squared_steps",
    "_pykernels",
]
