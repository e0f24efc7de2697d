import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kinmarket.core import Constant, ExponentialDecay
from kinmarket.errors import BracketFailure
from kinmarket.price import (
    RootFindConfig,
    avg_return,
    constant_mu_price_steps,
    constant_mu_wealth,
    equilibrium_price,
    future_price,
    g_transform,
    growth_envelope,
    growth_rate_bound,
    integrate_price_ode,
    price_ode_rhs,
)

curves = st.one_of(
    st.builds(Constant, st.floats(0.05, 0.95)),
    st.builds(ExponentialDecay, st.floats(0.05, 0.95), st.floats(1e-4, 0.2)),
)

# root of g(S') = g(50) * 1.01 + 0.015 for the Test 2 curve, bracketed by six
# rounds of 1e5-point grid scans of g (independent of the bisection code)
FUTURE_PRICE_TEST2 = 50.23590376138044
# 51.5 e^4 - 1.5: solution of dS/dt = 0.01 S + 0.015
PRICE_ODE_TEST1_T400 = 2810.304726706928


def test_g_transform_examples(test2_curve):
    assert g_transform(Constant(0.5), 50.0) == 50.0
    assert g_transform(Constant(0.2), 10.0) == pytest.approx(40.0, rel=1e-15)
    assert g_transform(test2_curve, 50.0) == pytest.approx(50.0, rel=1e-13)


@given(curve=curves, s1=st.floats(1e-3, 1e4), s2=st.floats(1e-3, 1e4))
def test_g_strictly_increasing(curve, s1, s2):
    lo, hi = sorted((s1, s2))
    if hi > lo * (1 + 1e-9):
        assert g_transform(curve, lo) < g_transform(curve, hi)


def test_future_price_examples(test2_curve):
    assert future_price(Constant(0.5), 50.0, 0.01, 0.015) == pytest.approx(50.515, rel=1e-10)
    assert future_price(test2_curve, 50.0, 0.0, 0.0) == 50.0
    assert future_price(test2_curve, 50.0, 0.01, 0.015) == pytest.approx(FUTURE_PRICE_TEST2, rel=1e-10)


@settings(deadline=None)
@given(curve=curves, S=st.floats(0.1, 5e3), r=st.floats(0, 0.1), D=st.floats(0, 1.0))
def test_future_price_round_trip(curve, S, r, D):
    Sn = future_price(curve, S, r, D)
    target = g_transform(curve, S) * (1 + r) + D
    assert abs(g_transform(curve, Sn) - target) <= 1e-10 * max(target, 1e-300) + 1e-12
    assert Sn >= S
    if r == 0 and D == 0:
        assert Sn == S
    elif r * S + D > 1e-6 * S:
        assert Sn > S


@given(C=st.floats(0.05, 0.95), S=st.floats(0.1, 1e4), r=st.floats(0, 0.1), D=st.floats(0, 1))
def test_constant_closed_forms(C, S, r, D):
    cfg = RootFindConfig()
    expect = (1 + r) * S + C * D / (1 - C)
    assert abs(future_price(Constant(C), S, r, D, cfg) - expect) <= cfg.tol(S)
    assert abs(equilibrium_price(Constant(C), 1000.0 * S, 10.0, cfg) - C * 100.0 * S) <= cfg.tol(100.0 * S)


def test_equilibrium_examples(test2_curve):
    assert equilibrium_price(Constant(0.5), 1000.0, 10.0) == pytest.approx(50.0, rel=1e-10)
    assert equilibrium_price(test2_curve, 1000.0, 10.0) == pytest.approx(50.0, rel=1e-10)


@given(curve=curves, mean_w=st.floats(1.0, 1e7), n_pc=st.floats(0.1, 100))
def test_equilibrium_fixed_point(curve, mean_w, n_pc):
    S = equilibrium_price(curve, mean_w, n_pc)
    tol = 1e-10 * mean_w / n_pc
    assert abs(S * n_pc - curve.mu(S) * mean_w) <= 2 * tol * n_pc


class _Broken:
    # violates the curve invariants: g bounded above
    def mu(self, S):
        return 1.0 - 0.5 * math.exp(-S)

    def dmu(self, S):
        return 0.5 * math.exp(-S)


def test_bracket_failure():
    with pytest.raises(BracketFailure):
        future_price(_Broken(), 1.0, 0.5, 1.0, RootFindConfig(max_iter=50))


def test_avg_return_examples():
    assert avg_return(50.0, 50.515, 0.015) == pytest.approx(0.0106, rel=1e-12)
    assert avg_return(50.0, 50.0, 0.0) == 0.0
    S, C, r, D = 80.0, 0.3, 0.01, 0.02
    Sn = future_price(Constant(C), S, r, D)
    # price error of 1e-10 S moves the return by at most 1e-10
    assert abs(avg_return(S, Sn, D) - r - D / (S * (1 - C))) < 2e-10


def test_price_ode_rhs_examples(test2_curve):
    assert price_ode_rhs(Constant(0.5), 50.0, 0.01, 0.015) == pytest.approx(0.515, rel=1e-9)
    assert price_ode_rhs(test2_curve, 50.0, 0.0, 0.0) == 0.0
    slow = price_ode_rhs(test2_curve, 50.0, 0.01, 0.015)
    # direct evaluation of the formula with the oracle future price
    m, dm = 0.5, -math.log(0.8 / 0.3) / 50 * 0.3
    xbar = (FUTURE_PRICE_TEST2 - 50 + 0.015) / 50
    assert slow == pytest.approx(m / (m - dm * 50) * (0.5 * 0.01 + 0.5 * xbar) * 50, rel=1e-8)
    assert slow < 0.515


def test_integrate_price_ode_constant():
    ts, S = integrate_price_ode(Constant(0.5), 50.0, 0.01, 0.015, 400.0, 1.0)
    assert ts[-1] == 400.0 and len(ts) == 401
    assert S[-1] == pytest.approx(PRICE_ODE_TEST1_T400, rel=1e-8)
    _, S_half = integrate_price_ode(Constant(0.5), 50.0, 0.01, 0.015, 400.0, 0.5)
    assert abs(S_half[-1] / S[-1] - 1) < 1e-6


def test_integrate_price_ode_flat_and_partial_step(test2_curve):
    ts, S = integrate_price_ode(test2_curve, 50.0, 0.0, 0.0, 10.0, 3.0)
    assert np.all(S == 50.0)
    assert list(ts) == [0.0, 3.0, 6.0, 9.0, 10.0]


def test_test2_price_damped(test2_curve):
    _, S1 = integrate_price_ode(Constant(0.5), 50.0, 0.01, 0.015, 400.0, 1.0)
    _, S2 = integrate_price_ode(test2_curve, 50.0, 0.01, 0.015, 400.0, 1.0)
    _, S2h = integrate_price_ode(test2_curve, 50.0, 0.01, 0.015, 400.0, 0.5)
    assert abs(S2h[-1] / S2[-1] - 1) < 1e-6
    assert 0.15 <= S2[-1] / S1[-1] <= 0.25


def test_growth_envelope():
    assert growth_rate_bound(Constant(0.5), 50.0, 0.01, 0.015) == pytest.approx(0.0106, rel=1e-12)
    assert growth_rate_bound(Constant(0.5), 50.0, 0.01, 0.0) == 0.01
    assert growth_envelope(Constant(0.5), 50.0, 1000.0, 0.01, 0.015, 0.0) == (1000.0, 50.0)


@pytest.mark.parametrize("curve", [Constant(0.5), Constant(0.3), ExponentialDecay.anchored(0.2, 50.0)])
def test_price_ode_within_envelope(curve):
    ts, S = integrate_price_ode(curve, 50.0, 0.01, 0.015, 400.0, 1.0)
    _, bound = growth_envelope(curve, 50.0, 1000.0, 0.01, 0.015, ts)
    assert np.all(S <= bound * (1 + 1e-12))


def test_constant_mu_wealth():
    # dw/dt = r w + n D / (1 - C) solved in closed form
    assert constant_mu_wealth(0.5, 1000.0, 10.0, 0.015, 0.01, 400.0) == pytest.approx(
        1030 * math.e ** 4 - 30, rel=1e-13)
    assert constant_mu_wealth(0.5, 1000.0, 10.0, 0.015, 0.01, 0.0) == 1000.0
    assert constant_mu_wealth(0.5, 1000.0, 10.0, 0.0, 0.01, 50.0) == pytest.approx(1000 * math.exp(0.5))
    # agrees with the price ODE through S = C w / n
    _, S = integrate_price_ode(Constant(0.5), 50.0, 0.01, 0.015, 400.0, 1.0)
    assert 0.05 * constant_mu_wealth(0.5, 1000.0, 10.0, 0.015, 0.01, 400.0) == pytest.approx(S[-1], rel=1e-8)


def test_constant_mu_price_steps_recursion():
    S = 50.0
    for _ in range(400):
        S = 1.01 * S + 0.015
    assert constant_mu_price_steps(0.5, 50.0, 0.01, 0.015, 400) == pytest.approx(S, rel=1e-12)
