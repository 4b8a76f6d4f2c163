"""Hot numeric kernels: fixed-step RK4 for dC/dtau = -i H C.

The jitted path (numba) is the default; set ROTORKICK_NO_NUMBA=1 to force
the pure-numpy fallback.  Both paths run the identical algorithm; see
benchmarks/bench_rk4.py for a timing comparison.
"""

from __future__ import annotations

import os

import numpy as np


def numba_disabled() -> bool:
    return os.environ.get("ROTORKICK_NO_NUMBA", "").strip().lower() in ("1", "true", "yes")


def _rk4_loop(a, c, steps, dt):
    # a = -i*H (complex), c modified out-of-place per step
    for _ in range(steps):
        k1 = np.dot(a, c)
        k2 = np.dot(a, c + (0.5 * dt) * k1)
        k3 = np.dot(a, c + (0.5 * dt) * k2)
        k4 = np.dot(a, c + dt * k3)
        c = c + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return c


rk4_loop_numpy = _rk4_loop

try:
    from numba import njit

    rk4_loop_jit = njit(cache=True)(_rk4_loop)
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba missing entirely
    rk4_loop_jit = None
    HAVE_NUMBA = False


def rk4_propagate(h: np.ndarray, c0: np.ndarray, steps: int) -> np.ndarray:
    """Integrate dC/dtau = -i H C from tau=0 to tau=1 in `steps` fixed steps."""
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    a = np.ascontiguousarray(-1j * np.asarray(h, dtype=np.float64))
    c = np.ascontiguousarray(np.asarray(c0, dtype=np.complex128))
    dt = 1.0 / steps
    if HAVE_NUMBA and not numba_disabled():
        return rk4_loop_jit(a, c, steps, dt)
    return rk4_loop_numpy(a, c, steps, dt)
