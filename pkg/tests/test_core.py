import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kinmarket.core import (
    AgentEnsemble,
    Constant,
    ExponentialDecay,
    ModelParams,
    mu_deriv,
    mu_eval,
    sample_eta,
    sample_gamma,
    truncated_normal,
)
from kinmarket.errors import ConfigError
from kinmarket.streams import CounterStreams

C2_TEST2 = math.log(0.8 / 0.3) / 50

curves = st.one_of(
    st.builds(Constant, st.floats(0.01, 0.99)),
    st.builds(ExponentialDecay, st.floats(0.01, 0.99), st.floats(1e-4, 0.5)),
)
prices = st.floats(0.0, 1e4)


def test_mu_eval_examples(test2_curve):
    assert mu_eval(Constant(0.5), 123.0) == 0.5
    assert test2_curve.C2 == pytest.approx(C2_TEST2, rel=1e-15)
    assert mu_eval(test2_curve, 50.0) == pytest.approx(0.5, rel=1e-14)
    assert mu_eval(test2_curve, 1e6) == pytest.approx(0.2, abs=1e-15)


def test_mu_deriv_examples(test2_curve):
    assert mu_deriv(Constant(0.5), 77.0) == 0.0
    assert mu_deriv(test2_curve, 50.0) == pytest.approx(-C2_TEST2 * 0.3, rel=1e-12)
    assert mu_deriv(test2_curve, 50.0) == pytest.approx(-0.005885, abs=5e-7)
    assert mu_deriv(test2_curve, 0.0) == pytest.approx(-C2_TEST2 * 0.8, rel=1e-14)


def test_vectorized_mu():
    c = ExponentialDecay(0.2, 0.02)
    S = np.linspace(0, 200, 7)
    assert np.allclose(c.mu(S), [c.mu(float(s)) for s in S])
    assert Constant(0.3).mu(S).shape == S.shape


@given(curve=curves, s1=prices, s2=prices)
def test_mu_non_increasing(curve, s1, s2):
    lo, hi = sorted((s1, s2))
    assert mu_eval(curve, lo) >= mu_eval(curve, hi)
    assert 0 < mu_eval(curve, hi) <= 1
    assert mu_deriv(curve, hi) <= 0


@given(curve=curves, S=st.floats(0.0, 500.0))
def test_mu_deriv_matches_finite_differences(curve, S):
    h = 1e-4 * max(S, 1.0)
    fd = (mu_eval(curve, S + h) - mu_eval(curve, S - h)) / (2 * h)
    exact = mu_deriv(curve, S)
    assert abs(fd - exact) <= 1e-6 * abs(exact) + 1e-13


def test_invalid_parameters():
    with pytest.raises(ConfigError):
        Constant(1.0)
    with pytest.raises(ConfigError):
        ExponentialDecay(0.2, 0.0)
    with pytest.raises(ConfigError):
        ModelParams(r=-0.1)
    with pytest.raises(ConfigError):
        ModelParams(N=0)
    with pytest.raises(ValueError):
        AgentEnsemble([1.0, -1.0])


def test_sample_gamma_without_noise():
    rng = np.random.default_rng(0)
    assert sample_gamma(Constant(0.5), 50.0, 0.0, rng) == 0.5
    assert np.all(sample_gamma(Constant(0.5), 50.0, 0.0, rng, size=10) == 0.5)


def test_sample_gamma_statistics():
    rng = np.random.default_rng(1)
    m = 1_000_000
    g = sample_gamma(Constant(0.5), 50.0, 0.2, rng, size=m)
    assert g.min() >= 0 and g.max() <= 1
    assert abs(g.mean() - 0.5) < 3 * g.std() / math.sqrt(m)


def test_sample_gamma_asymmetric_support(test2_curve):
    # mu(150) ~ 0.24: support [0, 2 mu]
    rng = np.random.default_rng(2)
    m = test2_curve.mu(150.0)
    g = sample_gamma(test2_curve, 150.0, 0.2, rng, size=200_000)
    assert g.min() >= 0 and g.max() <= 2 * m + 1e-15
    assert abs(g.mean() - m) < 4 * 0.2 / math.sqrt(g.size)


def test_sample_eta_examples():
    rng = np.random.default_rng(3)
    assert sample_eta(50.5, 0.015, 0.0, rng) == 0.0
    e = sample_eta(50.515, 0.015, 0.05 * 50, rng, size=10_000)
    assert e.min() >= -(50.515 + 0.015)
    m = 1_000_000
    e = sample_eta(50.515, 0.015, 15.0, rng, size=m)
    assert np.all(np.abs(e) <= 50.53)
    assert abs(e.mean()) < 3 * e.std() / math.sqrt(m)


def test_truncation_is_rejection_not_clipping():
    # tight bound: a clipped sampler would pile mass at +-bound
    rng = np.random.default_rng(4)
    x = truncated_normal(1.0, 0.5, rng, size=100_000)
    assert np.mean(np.abs(x) > 0.499) < 0.01
    # variance of N(0,1) truncated to [-0.5, 0.5]
    from scipy.stats import truncnorm
    assert x.var() == pytest.approx(truncnorm(-0.5, 0.5).var(), rel=0.02)


def test_fallback_keeps_truncated_law():
    # acceptance probability ~ 8e-4: most draws go through the inverse-CDF fallback
    rng = np.random.default_rng(5)
    x = truncated_normal(1.0, 1e-3, rng, size=20_000)
    assert np.all(np.abs(x) <= 1e-3)
    assert abs(x.mean()) < 4 * 1e-3 / math.sqrt(3 * x.size)


def test_counter_stream_source_is_agent_addressed():
    s = CounterStreams(9)
    full = sample_gamma(Constant(0.5), 50.0, 0.2, s.at(4, 0, np.arange(100)))
    part = sample_gamma(Constant(0.5), 50.0, 0.2, s.at(4, 0, np.arange(40, 60)))
    assert np.array_equal(full[40:60], part)


@settings(max_examples=30, deadline=None)
@given(curve=curves, S=st.floats(0.0, 500.0), zeta=st.floats(0.0, 1.0), seed=st.integers(0, 2**32))
def test_gamma_always_in_unit_interval(curve, S, zeta, seed):
    g = sample_gamma(curve, S, zeta, np.random.default_rng(seed), size=256)
    assert g.min() >= 0 and g.max() <= 1
