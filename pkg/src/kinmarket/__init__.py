"""Kinetic model of a single stock/bond market.

Monte Carlo simulation of the linear Boltzmann wealth dynamics with market
clearance, deterministic price and moment ODEs, the lognormal Fokker-Planck
limit, and inequality diagnostics.
"""

from kinmarket.analysis import gini, histogram, ks_distance, lorenz_curve, sample_moments
from kinmarket.core import (
    AgentEnsemble,
    Constant,
    ExponentialDecay,
    MarketState,
    ModelParams,
    mu_deriv,
    mu_eval,
    sample_eta,
    sample_gamma,
)
from kinmarket.engine import SimulationRecord, init_ensemble, market_step, run_simulation
from kinmarket.fokker_planck import (
    FpCoefficients,
    FpParams,
    LognormalParams,
    fp_coeffs,
    integrate_fp_moments,
    kappa,
    lognormal_from_moments,
    lognormal_pdf,
    self_similar_rescale,
)
from kinmarket.price import (
    RootFindConfig,
    avg_return,
    constant_mu_wealth,
    equilibrium_price,
    future_price,
    g_transform,
    growth_envelope,
    integrate_price_ode,
    price_ode_rhs,
)

__version__ = "0.1.0"
