"""Diagnostics on wealth samples: moments, Gini, Lorenz curve, histogram, KS distance."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from kinmarket.errors import AllZeroWealth, EmptyEnsemble, NonPositiveSample
from kinmarket.fokker_planck import LognormalParams, lognormal_cdf


def _as_sample(ensemble) -> np.ndarray:
    x = np.asarray(ensemble, dtype=float).ravel()
    if x.size == 0:
        raise EmptyEnsemble("empty wealth sample")
    return x


def sample_moments(ensemble) -> tuple[float, float]:
    x = _as_sample(ensemble)
    return float(np.mean(x)), float(np.mean(x * x))


def gini(ensemble) -> float:
    """Plug-in Gini from the sorted sample:
    ``2 sum_i i w_(i) / (N sum w) - (N + 1) / N``."""
    x = np.sort(_as_sample(ensemble), kind="stable")
    if x[0] < 0:
        raise ValueError("negative wealth")
    total = x.sum()
    if not total > 0:
        raise AllZeroWealth("Gini is undefined when all wealth is zero")
    n = x.size
    ranks = np.arange(1, n + 1, dtype=float)
    return float(2.0 * np.dot(ranks, x) / (n * total) - (n + 1) / n)


@dataclass(frozen=True)
class LorenzCurve:
    F: np.ndarray
    L: np.ndarray

    def gini(self) -> float:
        """``1 - 2 * integral of L dF`` by the trapezoid rule."""
        return float(1.0 - 2.0 * np.trapezoid(self.L, self.F))


def lorenz_curve(ensemble, grid_size: int = 101) -> LorenzCurve:
    """Lorenz curve sampled at ``grid_size`` evenly spaced population fractions."""
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    x = np.sort(_as_sample(ensemble), kind="stable")
    if x[0] < 0:
        raise ValueError("negative wealth")
    total = x.sum()
    if not total > 0:
        raise AllZeroWealth("Lorenz curve is undefined when all wealth is zero")
    n = x.size
    knots_F = np.arange(n + 1) / n
    knots_L = np.concatenate(([0.0], np.cumsum(x) / total))
    F = np.linspace(0.0, 1.0, grid_size)
    L = np.interp(F, knots_F, knots_L)
    L[0], L[-1] = 0.0, 1.0
    return LorenzCurve(F, np.minimum(L, F))


def histogram(ensemble, bins: int = 50, log_axis: bool = False):
    """Density histogram; returns ``(centers, density, edges)``.

    With ``log_axis`` the bins are uniform in ``log w`` and centers are
    geometric midpoints; the density is per unit of ``w`` either way.
    """
    if bins < 1:
        raise ValueError("bins must be >= 1")
    x = _as_sample(ensemble)
    if log_axis:
        if np.any(x <= 0):
            raise NonPositiveSample("log-axis histogram needs positive samples")
        lo, hi = np.log(x.min()), np.log(x.max())
        if hi == lo:
            lo, hi = lo - 0.5, hi + 0.5
        edges = np.exp(np.linspace(lo, hi, bins + 1))
        centers = np.sqrt(edges[:-1] * edges[1:])
    else:
        edges = np.histogram_bin_edges(x, bins=bins)
        centers = 0.5 * (edges[:-1] + edges[1:])
    density, edges = np.histogram(x, bins=edges, density=True)
    return centers, density, edges


def ks_distance(ensemble, p: LognormalParams) -> float:
    """Kolmogorov-Smirnov distance between the sample and a lognormal."""
    x = np.sort(_as_sample(ensemble))
    if x[0] <= 0:
        raise NonPositiveSample("KS distance against a lognormal needs positive samples")
    n = x.size
    cdf = lognormal_cdf(p, x)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - cdf), np.max(cdf - (i - 1) / n)))
