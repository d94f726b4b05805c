"""Mixture-of-GPs expected improvement and incumbent selection."""

import math
from dataclasses import dataclass

import numpy as np

from .. import accel
from ..errors import ParameterError
from .regression import predict_batch


def mixture_mean_at(components, X):
    """Average posterior mean over mixture components at the given points."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    total = np.zeros(X.shape[0])
    for post in components:
        mu, _ = predict_batch(post, X, include_noise=False)
        total += mu
    return total / len(components)


def incumbent(components, data):
    """Evaluated point with the highest mixture posterior mean.

    Returns ``(index, u_star)``; ties break toward the most recent
    evaluation. The ranking can change between iterations as the posterior
    re-fits globally, without any new better raw observation.
    """
    if data.m == 0:
        raise ParameterError("incumbent requires at least one evaluated point")
    means = mixture_mean_at(components, data.thetas)
    best = 0
    for j in range(1, data.m):
        if means[j] >= means[best]:
            best = j
    return best, float(means[best])


@dataclass(frozen=True)
class GPMixturePosterior:
    """Equally weighted GP components sharing one dataset, plus the incumbent."""

    components: tuple
    incumbent_index: int
    u_star: float
    _chols: np.ndarray
    _kinv_resids: np.ndarray
    _log_hps: np.ndarray

    @classmethod
    def build(cls, components, data):
        if not components:
            raise ParameterError("mixture needs at least one component")
        idx, u_star = incumbent(components, data)
        m = data.m
        chols = np.stack([c.chol for c in components]) if m else np.zeros((len(components), 0, 0))
        krs = np.stack([c.kinv_resid for c in components]) if m else np.zeros((len(components), 0))
        hps = np.stack([c.hp.log_values for c in components])
        return cls(components=tuple(components), incumbent_index=idx,
                   u_star=u_star, _chols=chols, _kinv_resids=krs, _log_hps=hps)

    @property
    def data(self):
        return self.components[0].data

    @property
    def mean_fn(self):
        return self.components[0].mean_fn

    def theta_star(self):
        return self.data.thetas[self.incumbent_index]


def expected_improvement_batch(mix, X):
    """Expected improvement over the incumbent, averaged across components.

    Uses the latent predictive deviation (no observation noise); degenerate
    components contribute max(mu - u_star, 0).
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    mean_q = mix.mean_fn(X)
    return accel.mixture_ei(X, mix.data.thetas, mix._chols, mix._kinv_resids,
                            mix._log_hps, mean_q, mix.u_star)


def expected_improvement(mix, theta):
    """Scalar expected improvement at one point."""
    value = expected_improvement_batch(mix, np.atleast_2d(np.asarray(theta, dtype=float)))
    return float(value[0])


def normal_pdf(x):
    return math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


def normal_cdf(x):
    return 0.5 * math.erfc(-x / math.sqrt(2.0))
