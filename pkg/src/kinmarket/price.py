"""Price mathematics: g-transform, future and equilibrium prices, price ODE."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from kinmarket.core import DemandCurve
from kinmarket.errors import BracketFailure, ConfigError
from kinmarket.ode import rk4


@dataclass(frozen=True)
class RootFindConfig:
    """Bisection settings.

    The stopping width is ``abs_tol`` when given, otherwise ``rel_tol`` times
    the price scale of the problem (the starting price, or ``mean_w/n_pc``).
    """

    rel_tol: float = 1e-10
    abs_tol: float | None = None
    max_iter: int = 200

    def __post_init__(self):
        if self.rel_tol <= 0 or (self.abs_tol is not None and self.abs_tol <= 0):
            raise ConfigError("tolerances must be positive")
        if self.max_iter < 1:
            raise ConfigError("max_iter must be >= 1")

    def tol(self, scale: float) -> float:
        return self.abs_tol if self.abs_tol is not None else self.rel_tol * scale


DEFAULT_ROOT = RootFindConfig()


def _bisect(h, lo: float, hi: float, tol: float, max_iter: int) -> float:
    # h increasing with h(lo) <= 0 < h(hi)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol or mid <= lo or mid >= hi:
            break
        if h(mid) > 0.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def g_transform(curve: DemandCurve, S):
    """``g(S) = (1 - mu(S)) S / mu(S)``, strictly increasing in S."""
    m = curve.mu(S)
    return (1.0 - m) * S / m


def future_price(curve: DemandCurve, S: float, r: float, D: float,
                 cfg: RootFindConfig = DEFAULT_ROOT) -> float:
    """Unique ``S'`` with ``g(S') = g(S)(1 + r) + D``."""
    if not S > 0:
        raise ValueError("S must be positive")
    target = g_transform(curve, S) * (1.0 + r) + D
    if r == 0.0 and D == 0.0:
        return float(S)
    hi = 2.0 * S
    for _ in range(cfg.max_iter):
        if g_transform(curve, hi) > target:
            break
        hi *= 2.0
    else:
        raise BracketFailure(f"no upper bracket for future price from S={S}")
    return _bisect(lambda s: g_transform(curve, s) - target, S, hi, cfg.tol(S), cfg.max_iter)


def equilibrium_price(curve: DemandCurve, mean_w: float, n_pc: float,
                      cfg: RootFindConfig = DEFAULT_ROOT) -> float:
    """Market-clearing price: the root of ``S n_pc = mu(S) mean_w``."""
    if not mean_w > 0 or not n_pc > 0:
        raise ValueError("mean_w and n_pc must be positive")

    def excess(s):
        return s * n_pc - curve.mu(s) * mean_w

    scale = mean_w / n_pc
    hi = scale
    for _ in range(cfg.max_iter):
        if excess(hi) > 0.0:
            break
        hi *= 2.0
    else:
        raise BracketFailure(f"no upper bracket for equilibrium price at mean_w={mean_w}")
    return _bisect(excess, 0.0, hi, cfg.tol(scale), cfg.max_iter)


def avg_return(S: float, S_next: float, D: float) -> float:
    """Expected stock return ``(S' - S + D) / S``."""
    return (S_next - S + D) / S


def price_ode_rhs(curve: DemandCurve, S: float, r: float, D: float,
                  cfg: RootFindConfig = DEFAULT_ROOT) -> float:
    """``dS/dt = mu / (mu - mu' S) * ((1 - mu) r + mu xbar(S')) * S``."""
    m = curve.mu(S)
    xbar = avg_return(S, future_price(curve, S, r, D, cfg), D)
    return m / (m - curve.dmu(S) * S) * ((1.0 - m) * r + m * xbar) * S


def integrate_price_ode(curve: DemandCurve, S0: float, r: float, D: float,
                        t_end: float, dt: float, cfg: RootFindConfig = DEFAULT_ROOT):
    """RK4 trajectory of the deterministic price; returns ``(times, prices)``."""
    if not S0 > 0:
        raise ValueError("S0 must be positive")
    ts, ys = rk4(lambda t, y: [price_ode_rhs(curve, y[0], r, D, cfg)], [S0], t_end, dt)
    return ts, ys[:, 0]


def growth_rate_bound(curve: DemandCurve, S0: float, r: float, D: float) -> float:
    """Exponent ``M = r + D / (S0 (1 - mu(S0)))`` bounding wealth and price growth."""
    return r + D / (S0 * (1.0 - curve.mu(S0)))


def growth_envelope(curve: DemandCurve, S0: float, w0: float, r: float, D: float, t):
    """``(w0 e^{Mt}, S0 e^{Mt})``."""
    g = np.exp(growth_rate_bound(curve, S0, r, D) * np.asarray(t, dtype=float))
    if np.ndim(g) == 0:
        g = float(g)
    return w0 * g, S0 * g


def constant_mu_wealth(C: float, w0: float, n_pc: float, D: float, r: float, t):
    """Mean wealth for constant investment fraction ``C``.

    Solves ``dw/dt = r w + n_pc D / (1 - C)``:
    ``w0 e^{rt} + (e^{rt} - 1) n_pc D / ((1 - C) r)``.
    """
    if not 0.0 < C < 1.0 or not r > 0:
        raise ValueError("need C in (0, 1) and r > 0")
    growth = np.exp(r * np.asarray(t, dtype=float))
    w = w0 * growth + (growth - 1.0) * n_pc * D / ((1.0 - C) * r)
    return float(w) if np.ndim(w) == 0 else w


def constant_mu_price_steps(C: float, S0: float, r: float, D: float, k):
    """Price after ``k`` market iterations for constant ``C`` and no noise:
    ``S0 (1+r)^k + C D / (1-C) ((1+r)^k - 1) / r``."""
    growth = (1.0 + r) ** np.asarray(k, dtype=float)
    add = C * D / (1.0 - C) * ((growth - 1.0) / r if r > 0 else np.asarray(k, dtype=float))
    S = S0 * growth + add
    return float(S) if np.ndim(S) == 0 else S


__all__ = [
    "RootFindConfig",
    "g_transform",
    "future_price",
    "equilibrium_price",
    "avg_return",
    "price_ode_rhs",
    "integrate_price_ode",
    "growth_rate_bound",
    "growth_envelope",
    "constant_mu_wealth",
    "constant_mu_price_steps",
]
