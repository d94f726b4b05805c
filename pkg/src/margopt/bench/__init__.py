"""Benchmark targets, experiment models, and the comparison harness."""

from .benchmarks import (BRANIN_OPTIMUM, HARTMANN6_OPTIMUM, benchmark_eval,
                         benchmark_info, branin, hartmann6,
                         make_benchmark_model, theta_to_point)
from .bimodal import bimodal_log_joint, make_bimodal_model
from .experiments import (CSV_COLUMNS, METHODS, ExperimentSpec, ResultsTable,
                          run_experiment)
from .gmm import load_csv, make_gmm_model, save_csv, synthetic_mixture_data
from .hmm import (EMISSION_STD, MAX_STATES, HMMConfig, hmm_truth,
                  make_hmm_distance, make_hmm_model, simulate_hmm_data,
                  stick_breaking_means)
from .kalman import (KalmanConfig, draw_mixing_matrix, kalman_distance,
                     kalman_truth, make_kalman_model, pickover_step,
                     simulate_kalman_data, simulate_latent_trajectory)
from .registry import BuiltModel, build_model, registered_models

__all__ = [
    "branin", "hartmann6", "benchmark_eval", "benchmark_info",
    "make_benchmark_model", "theta_to_point",
    "BRANIN_OPTIMUM", "HARTMANN6_OPTIMUM",
    "make_bimodal_model", "bimodal_log_joint",
    "KalmanConfig", "pickover_step", "simulate_kalman_data",
    "simulate_latent_trajectory", "make_kalman_model", "draw_mixing_matrix",
    "kalman_truth", "kalman_distance",
    "simulate_hmm_data", "make_hmm_model", "make_hmm_distance",
    "stick_breaking_means", "hmm_truth", "MAX_STATES", "EMISSION_STD",
    "HMMConfig",
    "make_gmm_model", "synthetic_mixture_data", "load_csv", "save_csv",
    "ExperimentSpec", "ResultsTable", "run_experiment", "METHODS",
    "CSV_COLUMNS",
    "build_model", "registered_models", "BuiltModel",
]
