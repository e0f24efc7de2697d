"""Small-rate (Fokker-Planck) limit of the kinetic model and its lognormal solution.

Time is the scaled variable ``tau = r t``. The moments obey
``d mean/d tau = A mean`` and ``d second/d tau = (2A + B) second``, and the
density stays lognormal with ``a = log mean`` and ``b = log(second / mean^2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from kinmarket.core import DemandCurve
from kinmarket.errors import ConfigError, DegenerateDistribution
from kinmarket.ode import rk4
from kinmarket.price import DEFAULT_ROOT, RootFindConfig, equilibrium_price


@dataclass(frozen=True)
class FpParams:
    """Limit parameters: ``lam = D / r`` and ``nu = sigma^2 / r``.

    If ``nu_ref_price`` is set, the return-noise variance is taken to scale
    with the squared price, ``nu * (S / nu_ref_price)^2``; this is the limit
    of a simulation run with ``eta_tracks_price``.
    """

    lam: float
    nu: float
    zeta: float
    curve: DemandCurve
    n_pc: float
    nu_ref_price: float | None = None

    def __post_init__(self):
        if self.lam < 0 or self.nu < 0 or self.zeta < 0:
            raise ConfigError("lam, nu and zeta must be non-negative")
        if not self.n_pc > 0:
            raise ConfigError("n_pc must be positive")

    @classmethod
    def from_rates(cls, r, D, sigma, zeta, curve, n_pc, nu_ref_price=None) -> "FpParams":
        return cls(D / r, sigma * sigma / r, zeta, curve, n_pc, nu_ref_price)

    def nu_at(self, S: float) -> float:
        if self.nu_ref_price is None:
            return self.nu
        return self.nu * (S / self.nu_ref_price) ** 2


@dataclass(frozen=True)
class FpCoefficients:
    A: float
    B: float
    kappa: float


@dataclass(frozen=True)
class LognormalParams:
    """Lognormal with ``E[w] = exp(a)`` and ``log(E[w^2]/E[w]^2) = b``."""

    a: float
    b: float

    def __post_init__(self):
        if self.b < 0:
            raise ValueError("b must be non-negative")

    @property
    def log_mean(self) -> float:
        return self.a - 0.5 * self.b


def kappa(curve: DemandCurve, S: float) -> float:
    """``mu(1-mu) / (mu(1-mu) - S mu')``, in (0, 1]."""
    m = curve.mu(S)
    q = m * (1.0 - m)
    return q / (q - S * curve.dmu(S))


def fp_coeffs(fp: FpParams, S: float) -> FpCoefficients:
    m = fp.curve.mu(S)
    k = kappa(fp.curve, S)
    A = 1.0 + m * ((k - 1.0) + (m * (k - 1.0) + 1.0) / (1.0 - m) * fp.lam / S)
    B = (m * m + fp.zeta ** 2) * fp.nu_at(S) / (S * S)
    return FpCoefficients(A, B, k)


@dataclass
class FpTrajectory:
    tau: np.ndarray
    S: np.ndarray
    mean_w: np.ndarray
    second_w: np.ndarray
    A: np.ndarray
    B: np.ndarray

    @property
    def a(self) -> np.ndarray:
        return np.log(self.mean_w)

    @property
    def b(self) -> np.ndarray:
        return np.log(self.second_w / self.mean_w ** 2)

    def at(self, tau: float) -> int:
        """Index of the output point closest to ``tau``."""
        return int(np.argmin(np.abs(self.tau - tau)))


def integrate_fp_moments(fp: FpParams, w0: float, e0: float, tau_end: float, dtau: float,
                         cfg: RootFindConfig = DEFAULT_ROOT) -> FpTrajectory:
    """RK4 solution of the moment equations in ``(log mean, log second)``.

    The price is closed algebraically through market clearance at every
    stage, so ``S n_pc = mu(S) mean`` holds along the whole trajectory.
    """
    if not w0 > 0 or e0 < w0 * w0 * (1.0 - 1e-12):
        raise ValueError("need w0 > 0 and e0 >= w0^2")

    def rhs(_, y):
        c = fp_coeffs(fp, equilibrium_price(fp.curve, math.exp(y[0]), fp.n_pc, cfg))
        return [c.A, 2.0 * c.A + c.B]

    tau, ys = rk4(rhs, [math.log(w0), math.log(e0)], tau_end, dtau)
    mean_w = np.exp(ys[:, 0])
    second_w = np.exp(ys[:, 1])
    S = np.array([equilibrium_price(fp.curve, m, fp.n_pc, cfg) for m in mean_w])
    coeffs = [fp_coeffs(fp, s) for s in S]
    return FpTrajectory(
        tau=tau,
        S=S,
        mean_w=mean_w,
        second_w=second_w,
        A=np.array([c.A for c in coeffs]),
        B=np.array([c.B for c in coeffs]),
    )


def price_rate(fp: FpParams, S: float) -> float:
    """``dS/d tau = mu / (mu - mu' S) * A * S`` implied by clearance."""
    m = fp.curve.mu(S)
    return m / (m - fp.curve.dmu(S) * S) * fp_coeffs(fp, S).A * S


def lognormal_pdf(p: LognormalParams, w):
    """Density ``exp(-(log w + b/2 - a)^2 / 2b) / (w sqrt(2 pi b))``; zero for w <= 0."""
    if not p.b > 0:
        raise DegenerateDistribution("lognormal density needs b > 0")
    w = np.asarray(w, dtype=float)
    pos = w > 0
    safe = np.where(pos, w, 1.0)
    z = np.log(safe) + 0.5 * p.b - p.a
    dens = np.where(pos, np.exp(-z * z / (2.0 * p.b)) / (safe * math.sqrt(2.0 * math.pi * p.b)), 0.0)
    return float(dens) if dens.ndim == 0 else dens


def lognormal_cdf(p: LognormalParams, w):
    if not p.b > 0:
        raise DegenerateDistribution("lognormal CDF needs b > 0")
    w = np.asarray(w, dtype=float)
    safe = np.where(w > 0, w, 1.0)
    cdf = np.where(w > 0, ndtr((np.log(safe) + 0.5 * p.b - p.a) / math.sqrt(p.b)), 0.0)
    return float(cdf) if cdf.ndim == 0 else cdf


def lognormal_from_moments(mean_w: float, second_w: float) -> LognormalParams:
    if not mean_w > 0:
        raise ValueError("mean_w must be positive")
    if second_w < mean_w * mean_w:
        raise ValueError("second moment below squared mean")
    b = math.log(second_w / (mean_w * mean_w))
    if b <= 0.0:
        raise DegenerateDistribution("second_w == mean_w^2: point mass")
    return LognormalParams(math.log(mean_w), b)


def self_similar_rescale(ensemble, mean_w_0: float, mean_w_tau: float) -> np.ndarray:
    """Rescale wealth by ``mean_w_0 / mean_w_tau`` (mean-conserving variable)."""
    if not mean_w_tau > 0:
        raise ValueError("mean_w_tau must be positive")
    return np.asarray(ensemble, dtype=float) * (mean_w_0 / mean_w_tau)
