"""Counter-based random streams.

Every variate used by the Monte Carlo engine is addressed by the tuple
``(seed, step, variable, agent, attempt)`` and computed with Philox4x64-10,
so the value an agent sees never depends on how the agent loop is split
across workers or in which order agents are visited.

The block function is a vectorized numpy port of the generator behind
:class:`numpy.random.Philox`; ``philox4x64`` with counter ``c`` returns the
block numpy produces after its counter has been advanced to ``c``.
"""

from __future__ import annotations

import numpy as np

_M32 = np.uint64(0xFFFFFFFF)
_S32 = np.uint64(32)
_S11 = np.uint64(11)
_MUL0 = np.uint64(0xD2E7470EE14C6C93)
_MUL1 = np.uint64(0xCA5A826395121157)
_WEYL0 = np.uint64(0x9E3779B97F4A7C15)
_WEYL1 = np.uint64(0xBB67AE8584CAA73B)
_STREAM_TAG = 0x6B696E6D61726B74  # b"kinmarkt"
_TWO_PI = 2.0 * np.pi
_INV_2_53 = 1.0 / 9007199254740992.0

GAMMA = 0
ETA = 1


def _mulhilo(a, b):
    a_lo = a & _M32
    a_hi = a >> _S32
    b_lo = b & _M32
    b_hi = b >> _S32
    ll = a_lo * b_lo
    lh = a_lo * b_hi
    hl = a_hi * b_lo
    cross = (ll >> _S32) + (lh & _M32) + hl
    hi = a_hi * b_hi + (lh >> _S32) + (cross >> _S32)
    lo = (cross << _S32) | (ll & _M32)
    return hi, lo


def philox4x64(c0, c1, c2, c3, k0, k1, rounds: int = 10):
    """Philox4x64 block function over broadcastable uint64 counter words."""
    c0, c1, c2, c3 = (np.asarray(c, dtype=np.uint64) for c in (c0, c1, c2, c3))
    k0 = np.uint64(k0)
    k1 = np.uint64(k1)
    with np.errstate(over="ignore"):
        for i in range(rounds):
            if i:
                k0 = k0 + _WEYL0
                k1 = k1 + _WEYL1
            hi0, lo0 = _mulhilo(_MUL0, c0)
            hi1, lo1 = _mulhilo(_MUL1, c2)
            c0, c1, c2, c3 = hi1 ^ c1 ^ k0, lo1, hi0 ^ c3 ^ k1, lo0
    return c0, c1, c2, c3


def _to_unit(x):
    # 53-bit uniform in (0, 1]
    return ((x >> _S11).astype(np.float64) + 1.0) * _INV_2_53


class CounterStreams:
    """Seeded family of per-(step, variable, agent) random streams."""

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._key = (np.uint64(self.seed % 2**64), np.uint64(_STREAM_TAG))

    def block(self, step: int, var: int, agents, attempt_block: int):
        agents = np.asarray(agents, dtype=np.uint64)
        return philox4x64(
            np.uint64(step), agents, np.uint64(var), np.uint64(attempt_block), *self._key
        )

    def uniforms(self, step: int, var: int, agents, attempt: int) -> np.ndarray:
        """Uniform variates in (0, 1], one per agent."""
        words = self.block(step, var, agents, attempt // 4)
        return _to_unit(words[attempt % 4])

    def normals(self, step: int, var: int, agents, attempt: int) -> np.ndarray:
        """Standard normal variates (Box-Muller), one per agent.

        One Philox block feeds four attempts: lanes (0, 1) and (2, 3) are the
        two Box-Muller pairs.
        """
        words = self.block(step, var, agents, attempt // 4)
        lane = attempt % 4
        pair = 0 if lane < 2 else 2
        u1 = _to_unit(words[pair])
        u2 = _to_unit(words[pair + 1])
        radius = np.sqrt(-2.0 * np.log(u1))
        angle = _TWO_PI * u2
        return radius * (np.cos(angle) if lane % 2 == 0 else np.sin(angle))

    def at(self, step: int, var: int, agents) -> "StepDraws":
        return StepDraws(self, step, var, np.asarray(agents, dtype=np.uint64))


class StepDraws:
    """Draw source bound to one (step, variable) and a fixed set of agents.

    ``normals(attempt, pos)`` returns one variate for each position ``pos``
    into the bound agent array.
    """

    def __init__(self, streams: CounterStreams, step: int, var: int, agents: np.ndarray):
        self.streams = streams
        self.step = step
        self.var = var
        self.agents = agents

    def __len__(self):
        return len(self.agents)

    def normals(self, attempt: int, pos) -> np.ndarray:
        return self.streams.normals(self.step, self.var, self.agents[pos], attempt)

    def uniforms(self, attempt: int, pos) -> np.ndarray:
        return self.streams.uniforms(self.step, self.var, self.agents[pos], attempt)


class GeneratorDraws:
    """Adapter giving a :class:`numpy.random.Generator` the draw-source interface."""

    def __init__(self, rng: np.random.Generator):
        self.rng = rng

    def normals(self, attempt: int, pos) -> np.ndarray:
        return self.rng.standard_normal(np.size(pos))

    def uniforms(self, attempt: int, pos) -> np.ndarray:
        return 1.0 - self.rng.random(np.size(pos))
