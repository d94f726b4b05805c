"""Registry of runnable models for the CLI and the comparison harness.

Each entry builds a model from a plain config dict (JSON-friendly), together
with optional ground truth, a distance-to-truth function, and per-dimension
prior half-widths used to scale random-walk proposals. Also registers small
deliberately violating models used to exercise validation.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ..dists import Dirichlet, Discrete, Normal, UniformDiscrete
from ..model import ModelProgram, observe, sample
from .benchmarks import make_benchmark_model, benchmark_info
from .bimodal import make_bimodal_model
from .gmm import load_csv, make_gmm_model, synthetic_mixture_data
from .hmm import hmm_truth, make_hmm_distance, make_hmm_model, simulate_hmm_data
from .kalman import (KalmanConfig, draw_mixing_matrix, kalman_distance,
                     kalman_truth, make_kalman_model, simulate_kalman_data)


@dataclass
class BuiltModel:
    model: ModelProgram
    truth: Optional[dict] = None
    distance_fn: Optional[Callable] = None
    half_widths: Optional[np.ndarray] = None
    data: Optional[np.ndarray] = None


def _build_bimodal(config):
    model = make_bimodal_model(
        prior_std=config.get("prior_std", 0.5),
        lik_std=config.get("lik_std", 0.5))
    return BuiltModel(model=model, half_widths=np.array([1.0]))


def _build_benchmark(name):
    def build(config):
        fn, domain, optimum = benchmark_info(name)
        model = make_benchmark_model(name, noise_std=config.get("noise_std", 0.0))

        def distance(theta):
            point = np.asarray([theta[f"x{i + 1}"] for i in range(len(domain))])
            return float(fn(point) - optimum)

        half = np.array([0.5 * (hi - lo) for lo, hi in domain])
        return BuiltModel(model=model, truth={"optimum": optimum},
                          distance_fn=distance, half_widths=half)
    return build


def _build_kalman(config):
    data_rng = np.random.default_rng(config.get("data_seed", 0))
    cfg = KalmanConfig(T=config.get("T", 100), K=config.get("K", 20))
    cfg.C = draw_mixing_matrix(cfg.K, data_rng)
    y = simulate_kalman_data(cfg, data_rng)
    model = make_kalman_model(cfg, y)
    return BuiltModel(model=model, truth=kalman_truth(),
                      distance_fn=kalman_distance,
                      half_widths=np.array([3.0, 1.5]), data=y)


def _build_hmm(config):
    data_rng = np.random.default_rng(config.get("data_seed", 0))
    y = simulate_hmm_data(data_rng, T=config.get("T", 200))
    model = make_hmm_model(y)
    return BuiltModel(model=model, truth=hmm_truth(),
                      distance_fn=make_hmm_distance(y),
                      half_widths=np.array([2.0] + [0.5] * 5), data=y)


def _build_gmm(config):
    if "csv" in config:
        data = load_csv(config["csv"])
    else:
        data_rng = np.random.default_rng(config.get("data_seed", 0))
        data = synthetic_mixture_data(data_rng, n=config.get("n", 30),
                                      d=config.get("d", 4))
    model = make_gmm_model(data, n_components=config.get("n_components", 10))
    d = data.shape[1]
    return BuiltModel(model=model,
                      half_widths=np.array([49.995, 0.5 * (100.0 - (d - 1))]),
                      data=data)


def _build_dirichlet(config):
    """Simplex-constrained toy target: weights must sum to one."""
    scores = np.asarray(config.get("scores", [1.0, 2.0, 3.0]), dtype=float)
    target = float(config.get("target", 2.5))
    obs_std = float(config.get("obs_std", 0.5))
    prior = Dirichlet(np.ones(scores.shape[0]))

    def body(_inputs):
        w = yield sample(prior, name="weights")
        yield observe(Normal(float(w @ scores), obs_std), target)
        return w

    model = ModelProgram(body, ("weights",), name="dirichlet")
    return BuiltModel(model=model, half_widths=np.full(scores.shape[0], 0.5))


def _build_bad_multiplicity(config):
    def body(_inputs):
        a = yield sample(Normal(0.0, 1.0), name="a")
        a = yield sample(Normal(a, 1.0), name="a")
        return a

    return BuiltModel(model=ModelProgram(body, ("a",), name="bad-multiplicity"))


def _build_bad_measure(config):
    def body(_inputs):
        branch = yield sample(Discrete([0.5, 0.5]))
        if branch == 0:
            a = yield sample(Normal(0.0, 1.0), name="a")
        else:
            a = yield sample(UniformDiscrete(0, 3), name="a")
        return a

    return BuiltModel(model=ModelProgram(body, ("a",), name="bad-measure"))


def _build_bad_not_direct(config):
    def body(_inputs):
        a = yield sample(Normal(0.0, 1.0))
        yield observe(Normal(a, 1.0), 0.0, name="a")
        return a

    return BuiltModel(model=ModelProgram(body, ("a",), name="bad-not-direct"))


MODEL_BUILDERS = {
    "bimodal": _build_bimodal,
    "branin": _build_benchmark("branin"),
    "hartmann6": _build_benchmark("hartmann6"),
    "kalman": _build_kalman,
    "hmm": _build_hmm,
    "gmm": _build_gmm,
    "dirichlet": _build_dirichlet,
    "bad-multiplicity": _build_bad_multiplicity,
    "bad-measure": _build_bad_measure,
    "bad-not-direct": _build_bad_not_direct,
}


def registered_models():
    return sorted(MODEL_BUILDERS)


def build_model(model_id, config=None):
    if model_id not in MODEL_BUILDERS:
        raise KeyError(f"unknown model {model_id!r}; "
                       f"registered: {registered_models()}")
    return MODEL_BUILDERS[model_id](config or {})
