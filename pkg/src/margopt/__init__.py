"""Marginal MAP estimation for trace-based generative models.

Write a model as a generator over sample/observe effects, declare which
sampled variables to optimize, and ``optimize`` maximizes the model evidence
over those variables while marginalizing the rest with sequential Monte
Carlo, using a Gaussian-process surrogate specialized to exploit the model:
prior sampling for domain scaling, a decaying prior mean for unbounded
search, and acquisition maximization through the model itself so proposals
respect its implicit constraints.
"""

from . import bench
from .dists import (Dirichlet, Discrete, Factor, Gamma, Measure, MvNormal,
                    Normal, UniformContinuous, UniformDiscrete, dist_base_measure,
                    dist_log_density, dist_sample)
from .driver import (OptConfig, OptimizationStep, OptimizerState, bo_step,
                     optimize)
from .errors import (ContractError, ModelViolationError, NumericalError,
                     ParameterError, UnsupportedOperationError)
from .infer import (AnnealingSchedule, EvidenceEstimate, ais_maximize,
                    lmh_step, pmmh, rmh_step, smc_marginal)
from .model import (DrawHandler, ExecutionRecord, IgnoreObservesHandler,
                    ModelProgram, ReplayHandler, observe, run_model, sample)
from .modes import (MarginalRun, PriorRun, ThetaLayout, ValidationReport,
                    run_acquisition, run_marginal, run_prior,
                    score_theta_prior, validate)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # distributions
    "Normal", "MvNormal", "UniformContinuous", "Gamma", "Dirichlet",
    "Discrete", "UniformDiscrete", "Factor", "Measure",
    "dist_sample", "dist_log_density", "dist_base_measure",
    # models and execution
    "ModelProgram", "ExecutionRecord", "sample", "observe", "run_model",
    "DrawHandler", "IgnoreObservesHandler", "ReplayHandler",
    # modes
    "run_prior", "run_marginal", "run_acquisition", "validate",
    "score_theta_prior", "PriorRun", "MarginalRun", "ValidationReport",
    "ThetaLayout",
    # inference
    "smc_marginal", "EvidenceEstimate", "lmh_step", "rmh_step",
    "ais_maximize", "AnnealingSchedule", "pmmh",
    # driver
    "optimize", "OptConfig", "OptimizationStep", "OptimizerState", "bo_step",
    # errors
    "ParameterError", "UnsupportedOperationError", "ModelViolationError",
    "ContractError", "NumericalError",
    # benchmark models
    "bench",
]
