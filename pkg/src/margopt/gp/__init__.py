"""Gaussian-process surrogate: kernel, mean, regression, hyperinference, EI."""

from .acquisition import (GPMixturePosterior, expected_improvement,
                          expected_improvement_batch, incumbent,
                          mixture_mean_at)
from .hyper import HyperBudget, sample_hyperparameters
from .kernels import GPHyperparameters, gram, kernel
from .mean import SENTINEL, BumpMean, ZeroMean, bump_mean
from .regression import (GPDataset, GPPosterior, gp_fit, gp_predict,
                         hyperprior_log_density, hyperprior_moments,
                         log_marginal_likelihood, predict_batch,
                         sample_hyperprior)

__all__ = [
    "GPHyperparameters", "kernel", "gram",
    "SENTINEL", "BumpMean", "ZeroMean", "bump_mean",
    "GPDataset", "GPPosterior", "gp_fit", "gp_predict", "predict_batch",
    "log_marginal_likelihood", "hyperprior_log_density", "hyperprior_moments",
    "sample_hyperprior",
    "HyperBudget", "sample_hyperparameters",
    "GPMixturePosterior", "incumbent", "mixture_mean_at",
    "expected_improvement", "expected_improvement_batch",
]
