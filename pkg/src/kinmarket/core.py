"""Domain types, demand curves and truncated-noise sampling."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.special import ndtr, ndtri

from kinmarket.errors import ConfigError
from kinmarket.streams import GeneratorDraws

# rejected draws beyond this many attempts are finished by inverse-CDF sampling,
# which yields the same truncated law
MAX_REJECTION_ATTEMPTS = 32


@dataclass(frozen=True)
class ModelParams:
    """Rates, noise widths and sizes of one market simulation.

    ``sigma`` is in currency. With ``eta_tracks_price`` the return-noise
    standard deviation used at a step is ``sigma * S / S0``, i.e. ``sigma``
    is the value at the initial price.
    """

    r: float = 0.01
    D: float = 0.015
    zeta: float = 0.2
    sigma: float = 15.0
    n_pc: float = 10.0
    N: int = 1000
    steps: int = 400
    seed: int = 0
    eta_tracks_price: bool = False

    def __post_init__(self):
        if self.r < 0 or self.D < 0 or self.zeta < 0 or self.sigma < 0:
            raise ConfigError("r, D, zeta and sigma must be non-negative")
        if not self.n_pc > 0:
            raise ConfigError("n_pc must be positive")
        if int(self.N) != self.N or self.N < 1:
            raise ConfigError("N must be an integer >= 1")
        if int(self.steps) != self.steps or self.steps < 0:
            raise ConfigError("steps must be an integer >= 0")


@dataclass(frozen=True)
class Constant:
    """Constant investment fraction ``mu(S) = C``."""

    C: float

    def __post_init__(self):
        if not 0.0 < self.C < 1.0:
            raise ConfigError(f"C must lie in (0, 1), got {self.C}")

    def mu(self, S):
        if np.ndim(S):
            return np.full(np.shape(S), self.C)
        return self.C

    def dmu(self, S):
        if np.ndim(S):
            return np.zeros(np.shape(S))
        return 0.0


@dataclass(frozen=True)
class ExponentialDecay:
    """``mu(S) = C1 + (1 - C1) exp(-C2 S)``, decreasing from 1 towards ``C1``."""

    C1: float
    C2: float

    def __post_init__(self):
        if not 0.0 < self.C1 < 1.0:
            raise ConfigError(f"C1 must lie in (0, 1), got {self.C1}")
        if not self.C2 > 0.0:
            raise ConfigError(f"C2 must be positive, got {self.C2}")

    @classmethod
    def anchored(cls, C1: float, S0: float, mu0: float = 0.5) -> "ExponentialDecay":
        """Curve through ``mu(S0) = mu0``."""
        if not C1 < mu0 < 1.0:
            raise ConfigError("need C1 < mu0 < 1")
        return cls(C1, math.log((1.0 - C1) / (mu0 - C1)) / S0)

    def mu(self, S):
        if np.ndim(S):
            return self.C1 + (1.0 - self.C1) * np.exp(-self.C2 * np.asarray(S, dtype=float))
        return self.C1 + (1.0 - self.C1) * math.exp(-self.C2 * S)

    def dmu(self, S):
        if np.ndim(S):
            return -self.C2 * (1.0 - self.C1) * np.exp(-self.C2 * np.asarray(S, dtype=float))
        return -self.C2 * (1.0 - self.C1) * math.exp(-self.C2 * S)


DemandCurve = Union[Constant, ExponentialDecay]


def mu_eval(curve: DemandCurve, S):
    """Optimal invested fraction at price ``S``."""
    return curve.mu(S)


def mu_deriv(curve: DemandCurve, S):
    """Analytic ``d mu / d S`` (never positive)."""
    return curve.dmu(S)


@dataclass
class AgentEnsemble:
    """Per-agent wealth sample; the particle representation of f(w, t)."""

    wealth: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.wealth = np.asarray(self.wealth, dtype=float)
        if self.wealth.ndim != 1:
            raise ValueError("wealth must be one-dimensional")
        if np.any(self.wealth < 0):
            raise ValueError("negative wealth is not allowed")

    def __len__(self):
        return self.wealth.size

    def __array__(self, dtype=None, copy=None):
        return self.wealth if dtype is None else self.wealth.astype(dtype)


@dataclass(frozen=True)
class MarketState:
    t: int
    S: float
    mean_w: float
    second_w: float
    mean_gamma: float = math.nan


def _draw_source(rng):
    if isinstance(rng, np.random.Generator):
        return GeneratorDraws(rng)
    return rng


def truncated_normal(std: float, bound: float, rng, size: int | None = None):
    """Zero-mean Gaussian with std ``std`` conditioned on ``|x| <= bound``.

    Rejection sampling; ``rng`` is a numpy Generator or a bound draw source
    from :mod:`kinmarket.streams` (then ``size`` defaults to its length).
    """
    scalar = size is None and isinstance(rng, np.random.Generator)
    src = _draw_source(rng)
    n = 1 if scalar else (size if size is not None else len(src))
    out = np.zeros(n)
    if std == 0.0 or bound <= 0.0 or n == 0:
        return 0.0 if scalar else out
    pending = np.arange(n)
    for attempt in range(MAX_REJECTION_ATTEMPTS):
        cand = std * src.normals(attempt, pending)
        ok = np.abs(cand) <= bound
        out[pending[ok]] = cand[ok]
        pending = pending[~ok]
        if pending.size == 0:
            break
    else:
        a = bound / std
        lo = ndtr(-a)
        u = src.uniforms(MAX_REJECTION_ATTEMPTS, pending)
        out[pending] = np.clip(std * ndtri(lo + u * (ndtr(a) - lo)), -bound, bound)
    return float(out[0]) if scalar else out


def sample_gamma(curve: DemandCurve, S: float, zeta: float, rng, size: int | None = None):
    """Invested fraction ``mu(S) + xi`` with ``xi`` truncated to ``[-z, z]``,
    ``z = min(mu, 1 - mu)``, so the result stays in [0, 1]."""
    m = float(curve.mu(S))
    z = min(m, 1.0 - m)
    return m + truncated_normal(zeta, z, rng, size)


def sample_eta(S_next: float, D: float, sigma: float, rng, size: int | None = None):
    """Return noise truncated to ``[-(S_next + D), S_next + D]``."""
    return truncated_normal(sigma, S_next + D, rng, size)
