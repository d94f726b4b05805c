"""GP posterior fitting, prediction, marginal likelihood, and hyperprior.

Fitting factorizes K + sigma_n^2 I with escalating diagonal jitter (relative
to the mean diagonal) when the Cholesky fails; the marginal likelihood
gradient uses the standard trace identities and is exercised against finite
differences in the tests.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .. import accel
from ..errors import NumericalError, ParameterError
from .kernels import GPHyperparameters
from .mean import ZeroMean

_LOG_2PI = math.log(2.0 * math.pi)
_JITTER_LEVELS = (1e-10, 1e-8, 1e-6, 1e-4)


@dataclass(frozen=True)
class GPDataset:
    """Scaled input points and scaled outputs."""

    thetas: np.ndarray
    ws: np.ndarray

    def __post_init__(self):
        X = np.atleast_2d(np.asarray(self.thetas, dtype=float))
        w = np.atleast_1d(np.asarray(self.ws, dtype=float))
        if X.shape[0] != w.shape[0]:
            raise ParameterError("thetas and ws must have equal length")
        object.__setattr__(self, "thetas", X)
        object.__setattr__(self, "ws", w)

    @property
    def m(self):
        return self.thetas.shape[0]

    @property
    def input_dim(self):
        return self.thetas.shape[1]


@dataclass(frozen=True)
class GPPosterior:
    """Analytic posterior: cached Cholesky factor and weighted residuals."""

    hp: GPHyperparameters
    data: GPDataset
    mean_fn: object
    chol: np.ndarray
    kinv_resid: np.ndarray
    jitter: float


def gp_fit(data, hp, mean_fn=None):
    """Condition the GP prior on the dataset (empty data gives the prior)."""
    if mean_fn is None:
        mean_fn = ZeroMean()
    m = data.m
    if m == 0:
        return GPPosterior(hp, data, mean_fn, np.zeros((0, 0)), np.zeros(0), 0.0)
    K = accel.matern_gram(data.thetas, hp.log_values) + hp.sigma_n ** 2 * np.eye(m)
    scale = float(np.trace(K)) / m
    resid = data.ws - mean_fn(data.thetas)
    last_err = None
    for level in (0.0,) + _JITTER_LEVELS:
        jitter = level * scale
        try:
            L = np.linalg.cholesky(K + jitter * np.eye(m))
        except np.linalg.LinAlgError as err:
            last_err = err
            continue
        alpha = solve_triangular(L, resid, lower=True)
        alpha = solve_triangular(L.T, alpha, lower=False)
        return GPPosterior(hp, data, mean_fn, L, alpha, jitter)
    raise NumericalError(
        f"Cholesky failed for m={m} even at maximum jitter") from last_err


def gp_predict(post, theta, include_noise=True):
    """Predictive mean and variance at one point.

    With ``include_noise`` the variance is the predictive variance of a new
    observation (latent variance plus sigma_n^2); without it, the latent
    function variance, clamped at zero.
    """
    x = np.atleast_2d(np.asarray(theta, dtype=float))
    mu, var = predict_batch(post, x, include_noise=include_noise)
    return float(mu[0]), float(var[0])


def predict_batch(post, X, include_noise=True):
    """Vector version of ``gp_predict`` over rows of X."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    mu_c, var = accel.predict_meanvar(X, post.data.thetas, post.chol,
                                      post.kinv_resid, post.hp.log_values)
    mu = post.mean_fn(X) + mu_c
    if include_noise:
        var = var + post.hp.sigma_n ** 2
    return mu, var


def log_marginal_likelihood(data, hp, mean_fn=None, jitter=None):
    """Gaussian log marginal likelihood and gradient in log-hyperparameters.

    The gradient covers all 3 + 2D kernel hyperparameters; the mean function
    has none. ``jitter`` defaults to a tiny diagonal inflation consistent with
    the fitting path.
    """
    if data.m == 0:
        raise ParameterError("log marginal likelihood requires data")
    if mean_fn is None:
        mean_fn = ZeroMean()
    resid = data.ws - mean_fn(data.thetas)
    if jitter is None:
        jitter = 1e-12 * (hp.sigma_n ** 2 + hp.sigma_32 ** 2 + hp.sigma_52 ** 2)
    ok, value, grad = accel.lml_value_grad(data.thetas, resid, hp.log_values,
                                           float(jitter))
    if not ok:
        raise NumericalError("Cholesky factorization failed in marginal likelihood")
    return value, grad


# ---------------------------------------------------------------------------
# Problem-independent hyperprior (inputs and outputs scaled to [-1, 1])
# ---------------------------------------------------------------------------

def hyperprior_moments(input_dim, second_arg="std"):
    """Mean and standard deviation of each log-hyperparameter."""
    means = np.concatenate([[-5.0, -7.0, -0.5],
                            np.full(input_dim, -1.5),
                            np.full(input_dim, -1.0)])
    spread = np.concatenate([[2.0, 0.5, 0.15],
                             np.full(input_dim, 0.5),
                             np.full(input_dim, 0.5)])
    if second_arg == "var":
        spread = np.sqrt(spread)
    elif second_arg != "std":
        raise ParameterError("second_arg must be 'std' or 'var'")
    return means, spread


def hyperprior_log_density(hp, second_arg="std"):
    """Log density of independent normals on the log-hyperparameters, with gradient."""
    q = hp.log_values
    means, stds = hyperprior_moments(hp.input_dim, second_arg)
    z = (q - means) / stds
    value = float(-0.5 * np.sum(z * z) - np.sum(np.log(stds))
                  - 0.5 * q.shape[0] * _LOG_2PI)
    grad = -z / stds
    return value, grad


def sample_hyperprior(input_dim, rng, second_arg="std"):
    """Draw hyperparameters from the hyperprior."""
    means, stds = hyperprior_moments(input_dim, second_arg)
    return GPHyperparameters(means + stds * rng.standard_normal(means.shape[0]))
