"""Fixed-step classical Runge-Kutta integrator."""

from __future__ import annotations

import math

import numpy as np


def rk4(f, y0, t_end: float, dt: float):
    """Integrate ``y' = f(t, y)`` from 0 to ``t_end``.

    Returns ``(times, states)`` with one row per step; the last step is
    shortened so the trajectory ends exactly at ``t_end``.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if t_end < 0:
        raise ValueError("t_end must be non-negative")
    n = math.ceil(t_end / dt - 1e-12) if t_end > 0 else 0
    y = np.atleast_1d(np.asarray(y0, dtype=float)).copy()
    ts = np.empty(n + 1)
    ys = np.empty((n + 1, y.size))
    ts[0] = 0.0
    ys[0] = y
    t = 0.0
    for i in range(1, n + 1):
        h = min(dt, t_end - t) if i == n else dt
        k1 = np.asarray(f(t, y))
        k2 = np.asarray(f(t + 0.5 * h, y + 0.5 * h * k1))
        k3 = np.asarray(f(t + 0.5 * h, y + 0.5 * h * k2))
        k4 = np.asarray(f(t + h, y + h * k3))
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t = t_end if i == n else i * dt
        ts[i] = t
        ys[i] = y
    return ts, ys
