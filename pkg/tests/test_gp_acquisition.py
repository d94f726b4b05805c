"""Mixture expected improvement and incumbent selection."""

import math

import numpy as np
import pytest
from scipy import stats

from margopt.accel import reference as ref
from margopt.gp import (GPDataset, GPHyperparameters, GPMixturePosterior,
                        expected_improvement, expected_improvement_batch,
                        gp_fit, incumbent, mixture_mean_at, sample_hyperprior)
from margopt.gp.acquisition import normal_cdf, normal_pdf


def _single_component_ei(mu, sigma, u_star):
    """Closed form for one component, used as the oracle."""
    if sigma < 1e-15:
        return max(mu - u_star, 0.0)
    gamma = (mu - u_star) / sigma
    return (mu - u_star) * stats.norm.cdf(gamma) + sigma * stats.norm.pdf(gamma)


class _FakePosterior:
    """Wraps fixed (mu, sigma) predictions to probe the EI formula."""

    def __init__(self, mu, sigma):
        self.mu = mu
        self.sigma = sigma


def test_ei_at_incumbent_mean():
    # mu = u_star, sigma = 1: EI reduces to phi(0)
    val = _single_component_ei(0.0, 1.0, 0.0)
    assert val == pytest.approx(1.0 / math.sqrt(2 * math.pi), abs=1e-12)
    assert val == pytest.approx(0.39894, abs=1e-5)


def test_ei_closed_form_point():
    # mu - u_star = 1, sigma = 0.5
    val = _single_component_ei(1.0, 0.5, 0.0)
    expect = stats.norm.cdf(2.0) + 0.5 * stats.norm.pdf(2.0)
    assert val == pytest.approx(expect, abs=1e-12)
    assert val == pytest.approx(1.00424, abs=1e-5)


def test_degenerate_sigma_limit():
    assert _single_component_ei(-0.5, 0.0, 0.0) == 0.0
    assert _single_component_ei(0.5, 0.0, 0.0) == 0.5


def test_mixture_ei_matches_componentwise_oracle():
    rng = np.random.default_rng(0)
    X = rng.uniform(-1, 1, (6, 2))
    w = rng.normal(0, 0.5, 6)
    data = GPDataset(X, w)
    comps = [gp_fit(data, sample_hyperprior(2, rng)) for _ in range(4)]
    mix = GPMixturePosterior.build(comps, data)
    queries = rng.uniform(-1.2, 1.2, (10, 2))
    got = expected_improvement_batch(mix, queries)
    for qi, q in enumerate(queries):
        total = 0.0
        for post in comps:
            mu_c, var = ref.predict_meanvar(q[None, :], X, post.chol,
                                            post.kinv_resid,
                                            post.hp.log_values)
            total += _single_component_ei(float(mu_c[0]),
                                          math.sqrt(float(var[0])), mix.u_star)
        assert got[qi] == pytest.approx(total / len(comps), rel=1e-9, abs=1e-12)


def test_ei_nonnegative_and_monotone_in_sigma():
    u = 0.3
    for mu in (-1.0, 0.0, 0.3, 2.0):
        last = -1.0
        for sigma in (1e-12, 0.1, 0.5, 1.0, 3.0):
            val = _single_component_ei(mu, sigma, u)
            assert val >= 0.0
            assert val >= last - 1e-12
            last = val


def test_scalar_ei_wrapper():
    rng = np.random.default_rng(1)
    X = rng.uniform(-1, 1, (4, 1))
    data = GPDataset(X, rng.normal(0, 0.5, 4))
    comps = [gp_fit(data, sample_hyperprior(1, rng)) for _ in range(2)]
    mix = GPMixturePosterior.build(comps, data)
    q = np.array([0.2])
    assert expected_improvement(mix, q) == pytest.approx(
        float(expected_improvement_batch(mix, q[None, :])[0]))


def test_incumbent_prefers_highest_mixture_mean():
    rng = np.random.default_rng(2)
    X = np.linspace(-1, 1, 5)[:, None]
    w = np.array([0.0, 1.0, 5.0, 1.0, 0.0])
    data = GPDataset(X, w)
    hp = GPHyperparameters.from_values(0.01, 0.1, 1.0, [0.5], [0.5])
    comps = [gp_fit(data, hp)]
    idx, u_star = incumbent(comps, data)
    assert idx == 2
    assert u_star == pytest.approx(5.0, abs=0.2)


def test_incumbent_tie_breaks_to_most_recent():
    X = np.array([[0.0], [10.0]])
    w = np.array([1.0, 1.0])
    data = GPDataset(X, w)
    hp = GPHyperparameters.from_values(1e-6, 0.1, 1.0, [0.2], [0.2])
    comps = [gp_fit(data, hp)]
    idx, _ = incumbent(comps, data)
    assert idx == 1


def test_mixture_mean_average():
    rng = np.random.default_rng(3)
    X = rng.uniform(-1, 1, (5, 1))
    data = GPDataset(X, rng.normal(0, 1, 5))
    comps = [gp_fit(data, sample_hyperprior(1, rng)) for _ in range(3)]
    means = mixture_mean_at(comps, X)
    by_hand = np.mean([ref.predict_meanvar(X, X, c.chol, c.kinv_resid,
                                           c.hp.log_values)[0]
                       for c in comps], axis=0)
    assert np.allclose(means, by_hand)


def test_normal_helpers():
    assert normal_cdf(0.0) == pytest.approx(0.5)
    assert normal_pdf(0.0) == pytest.approx(1.0 / math.sqrt(2 * math.pi))
