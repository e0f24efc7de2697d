"""Monte Carlo time stepping of the linear Boltzmann wealth dynamics.

Each market iteration moves every agent with the forward rule
``w' = w (1 + r) + gamma w (x - r)`` against one common future price, then
re-clears the market from the realized mean wealth.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from kinmarket.core import (
    AgentEnsemble,
    DemandCurve,
    MarketState,
    ModelParams,
    sample_eta,
    sample_gamma,
)
from kinmarket.errors import InitError
from kinmarket.price import DEFAULT_ROOT, RootFindConfig, equilibrium_price, future_price
from kinmarket.streams import ETA, GAMMA, CounterStreams

INIT_REL_TOL = 1e-8


@dataclass
class SimulationRecord:
    """States ``t = 0..steps``, final ensemble and the inputs that produced them."""

    states: list[MarketState]
    ensemble: AgentEnsemble
    params: ModelParams
    curve: DemandCurve
    S0: float
    bonds0: float
    snapshots: dict[int, np.ndarray] = field(default_factory=dict, repr=False)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(s, name) for s in self.states], dtype=float)

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.states])


def _state(t, wealth, S, mean_gamma=np.nan) -> MarketState:
    return MarketState(
        t=t,
        S=float(S),
        mean_w=float(np.mean(wealth)),
        second_w=float(np.mean(wealth * wealth)),
        mean_gamma=float(mean_gamma),
    )


def init_ensemble(params: ModelParams, curve: DemandCurve, S0: float, bonds0: float,
                  cfg: RootFindConfig = DEFAULT_ROOT):
    """Uniform population holding ``n_pc`` shares at ``S0`` plus ``bonds0`` in bonds."""
    if not S0 > 0 or bonds0 < 0:
        raise InitError("need S0 > 0 and bonds0 >= 0")
    wealth = np.full(params.N, params.n_pc * S0 + bonds0)
    S_eq = equilibrium_price(curve, float(wealth[0]), params.n_pc, cfg)
    if abs(S_eq - S0) > INIT_REL_TOL * S0:
        raise InitError(
            f"initial price {S0} does not clear the market; demand curve implies {S_eq:.6g}"
        )
    return AgentEnsemble(wealth), _state(0, wealth, S0)


def _chunks(n: int, workers: int):
    edges = np.linspace(0, n, max(1, min(workers, n)) + 1).astype(int)
    return [np.arange(a, b) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def market_step(ensemble: AgentEnsemble, state: MarketState, params: ModelParams,
                curve: DemandCurve, rng: CounterStreams, *, S_ref: float | None = None,
                workers: int = 1, cfg: RootFindConfig = DEFAULT_ROOT):
    """Advance the market one iteration.

    ``rng`` supplies per-(step, agent) streams, so the result does not depend
    on ``workers``. ``S_ref`` is the price at which ``params.sigma`` is quoted
    when ``params.eta_tracks_price`` is set.
    """
    S = state.S
    step = state.t + 1
    S_next = future_price(curve, S, params.r, params.D, cfg)
    sigma = params.sigma
    if params.eta_tracks_price:
        if S_ref is None:
            raise ValueError("S_ref is required when eta tracks the price")
        sigma = params.sigma * S / S_ref

    w = ensemble.wealth
    new_w = np.empty_like(w)
    gamma = np.empty_like(w)

    def update(idx):
        g = sample_gamma(curve, S, params.zeta, rng.at(step, GAMMA, idx))
        eta = sample_eta(S_next, params.D, sigma, rng.at(step, ETA, idx))
        x = (S_next - S + params.D + eta) / S
        wi = w[idx]
        # rounding can leave -1e-16 when the return sits on its lower bound
        new_w[idx] = np.maximum(wi * (1.0 + params.r) + g * wi * (x - params.r), 0.0)
        gamma[idx] = g

    parts = _chunks(w.size, workers)
    if len(parts) == 1:
        update(parts[0])
    else:
        with ThreadPoolExecutor(max_workers=len(parts)) as pool:
            list(pool.map(update, parts))

    mean_w = float(np.mean(new_w))
    S_new = equilibrium_price(curve, mean_w, params.n_pc, cfg)
    return AgentEnsemble(new_w), _state(step, new_w, S_new, np.mean(gamma))


def run_simulation(params: ModelParams, curve: DemandCurve, S0: float, bonds0: float, *,
                   snapshot_times=(), workers: int = 1,
                   cfg: RootFindConfig = DEFAULT_ROOT) -> SimulationRecord:
    """Apply ``params.steps`` market iterations from the uniform initial state."""
    ensemble, state = init_ensemble(params, curve, S0, bonds0, cfg)
    rng = CounterStreams(params.seed)
    wanted = {int(t) for t in snapshot_times}
    snapshots = {0: ensemble.wealth.copy()} if 0 in wanted else {}
    states = [state]
    for _ in range(params.steps):
        ensemble, state = market_step(
            ensemble, state, params, curve, rng, S_ref=S0, workers=workers, cfg=cfg
        )
        states.append(state)
        if state.t in wanted:
            snapshots[state.t] = ensemble.wealth.copy()
    return SimulationRecord(states, ensemble, params, curve, S0, bonds0, snapshots)
