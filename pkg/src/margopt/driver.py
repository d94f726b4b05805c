"""The optimization loop: evidence maximization with a GP surrogate.

Each iteration scales the evaluated points onto the hypercube, fits a mixture
of GP posteriors under the problem-independent hyperprior, picks the incumbent
(highest mixture mean among evaluated points), maximizes expected improvement
by annealed sampling on the model itself (so proposals always satisfy the
model's implicit constraints), evaluates the chosen point with SMC, and
updates the domain scaling. ``optimize`` returns a lazy iterator; elements are
computed on demand.
"""

import math
import time
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ModelViolationError, NumericalError
from .gp import (BumpMean, GPDataset, GPMixturePosterior, HyperBudget,
                 expected_improvement_batch, gp_fit, sample_hyperparameters)
from .infer import AnnealingSchedule, ais_maximize, smc_marginal
from .modes import ThetaLayout, run_prior, validate
from .scaling import init_scaling


@dataclass
class OptConfig:
    """Knobs for the optimization loop; defaults target desk-scale problems."""

    n_init: int = 5
    n_particles: int = 100
    max_iterations: int = 50
    seed: Optional[int] = None
    n_hyper_samples: int = 10
    n_hyper_chains: int = 2
    hyper_budget: HyperBudget = field(default_factory=HyperBudget)
    schedule: Optional[AnnealingSchedule] = None
    n_ais_chains: int = 8
    resample: bool = True
    max_outputs_per_eval: int = 100
    hyperprior_second_arg: str = "std"
    probe_budget: int = 50
    init_attempt_factor: int = 5

    def __post_init__(self):
        if self.n_init < 2:
            raise ValueError("n_init must be >= 2 to establish output scaling")
        if self.schedule is None:
            self.schedule = AnnealingSchedule.default()


@dataclass
class OptimizationStep:
    """One element of the result sequence."""

    m: int
    theta_star: dict
    omega_star: list
    u_star: float
    theta_next: dict
    log_z_next: float
    diagnostics: dict

    def to_dict(self, include_timing=True, include_outputs=False):
        out = {"m": self.m,
               "theta_star": _jsonable(self.theta_star),
               "u_star": float(self.u_star),
               "theta_next": _jsonable(self.theta_next),
               "log_z_next": float(self.log_z_next)}
        diag = {k: v for k, v in self.diagnostics.items()
                if include_timing or k != "wall_ms"}
        out["diagnostics"] = _jsonable(diag)
        if include_outputs:
            out["omega_star"] = _jsonable(self.omega_star)
        if include_timing:
            out["wall_ms"] = self.diagnostics.get("wall_ms", 0)
        return out


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    return value


@dataclass
class OptimizerState:
    """Mutable loop state: evaluated points, scaling, and the last surrogate."""

    model: object
    cfg: OptConfig
    rng: np.random.Generator
    layout: ThetaLayout
    transform: object
    thetas: list
    vecs: list
    logzs: list
    outputs: list
    mixture: object = None
    hyper_info: dict = field(default_factory=dict)


def optimize(model, config=None):
    """Run the loop lazily, yielding one OptimizationStep per iteration.

    Validates the model first and rejects it (with the report attached)
    before any evaluation happens.
    """
    cfg = config if config is not None else OptConfig()
    rng = np.random.default_rng(cfg.seed)
    report = validate(model, probe_budget=cfg.probe_budget, rng=rng)
    if not report.ok:
        raise ModelViolationError(
            f"model failed validation: {[v.rule_id for v in report.violations]}",
            rule_id=report.violations[0].rule_id, report=report)
    layout = ThetaLayout.from_model(model, rng)
    return _iterate(model, cfg, rng, layout)


def _evaluate(model, theta, cfg, rng):
    return smc_marginal(model, theta, cfg.n_particles, resample=cfg.resample,
                        rng=rng, max_outputs=cfg.max_outputs_per_eval)


def _fit_mixture(state):
    """Scale data, sample hyperparameters, fit components, pick the incumbent."""
    cfg = state.cfg
    transform = state.transform
    Xs = transform.scale_inputs(np.asarray(state.vecs))
    ws = transform.scale_outputs(np.asarray(state.logzs))
    data = GPDataset(Xs, ws)
    mean_fn = BumpMean(transform.r_e, transform.r_inf)
    samples, hinfo = sample_hyperparameters(
        data, mean_fn, n_samples=cfg.n_hyper_samples,
        n_chains=cfg.n_hyper_chains, budget=cfg.hyper_budget, rng=state.rng,
        second_arg=cfg.hyperprior_second_arg)
    components = [gp_fit(data, hp, mean_fn) for hp in samples]
    mix = GPMixturePosterior.build(components, data)
    return mix, hinfo


def bo_step(state):
    """One surrogate round: fit the mixture and maximize the acquisition.

    Re-scales the evaluated data, samples GP hyperparameters under the bump
    mean, updates the incumbent, and maximizes expected improvement by
    annealed sampling through the model, so the returned point satisfies the
    model's implicit constraints and lies in raw coordinates. Falls back to a
    fresh prior draw when the surrogate cannot be fit. Returns
    ``(theta_next, state)`` with the fitted mixture left on the state.
    """
    cfg = state.cfg
    state.mixture = None
    state.hyper_info = {"accept_rate": 0.0, "fallback": False}
    try:
        state.mixture, state.hyper_info = _fit_mixture(state)
    except NumericalError as err:
        warnings.warn(f"surrogate fit failed ({err}); proposing a prior draw",
                      RuntimeWarning)
        return run_prior(state.model, state.rng).theta, state

    mix = state.mixture
    layout = state.layout
    transform = state.transform

    def zeta_batch(theta_dicts):
        raw = np.asarray([layout.flatten(t) for t in theta_dicts])
        return expected_improvement_batch(mix, transform.scale_inputs(raw))

    def zeta(theta):
        return float(zeta_batch([theta])[0])

    theta_next = ais_maximize(
        state.model, zeta, schedule=cfg.schedule, n_chains=cfg.n_ais_chains,
        rng=state.rng, layout=layout, half_widths=transform.in_half,
        zeta_batch=zeta_batch)
    return theta_next, state


def _iterate(model, cfg, rng, layout):
    # Step 1: unconditioned draws initialize the input scaling.
    draws = [run_prior(model, rng).theta for _ in range(cfg.n_init)]
    state = OptimizerState(model=model, cfg=cfg, rng=rng, layout=layout,
                           transform=None, thetas=[], vecs=[], logzs=[],
                           outputs=[])

    def evaluate_point(theta):
        est = _evaluate(model, theta, cfg, rng)
        state.thetas.append(theta)
        state.vecs.append(layout.flatten(theta))
        state.logzs.append(est.log_z)
        state.outputs.append(est.outputs)
        return est

    # Step 2: evaluate the initial draws; top up until output scaling is possible.
    for theta in draws:
        evaluate_point(theta)
    attempts = 0
    max_extra = cfg.init_attempt_factor * cfg.n_init
    while sum(1 for z in state.logzs if math.isfinite(z)) < 2:
        if attempts >= max_extra:
            raise NumericalError(
                "could not obtain two finite evidence estimates from the prior; "
                "the model's likelihood may be degenerate")
        extra = run_prior(model, rng).theta
        draws.append(extra)
        evaluate_point(extra)
        attempts += 1

    state.transform = init_scaling([layout.flatten(t) for t in draws],
                                   list(zip(state.vecs, state.logzs)))
    init_log = [(dict(t), float(z)) for t, z in zip(state.thetas, state.logzs)]

    for m in range(1, cfg.max_iterations + 1):
        t_start = time.perf_counter()
        theta_next, state = bo_step(state)
        mix = state.mixture
        if mix is not None:
            scaled_next = state.transform.scale_inputs(
                layout.flatten(theta_next)[None, :])
            ei_next = float(expected_improvement_batch(mix, scaled_next)[0])
            star = mix.incumbent_index
            u_star = state.transform.unscale_output(mix.u_star)
        else:
            ei_next = float("nan")
            star = int(np.argmax(state.logzs))
            u_star = state.logzs[star]

        theta_star = state.thetas[star]
        omega_star = state.outputs[star]

        est = evaluate_point(theta_next)
        state.transform = state.transform.updated(state.vecs[-1], est.log_z)

        wall_ms = int(round(1000.0 * (time.perf_counter() - t_start)))
        hinfo = state.hyper_info
        diagnostics = {
            "hyper_accept_rate": float(hinfo.get("accept_rate", 0.0)),
            "hyper_fallback": bool(hinfo.get("fallback", False)),
            "surrogate_fallback": mix is None,
            "ei_next": float(ei_next),
            "best_raw_log_z": float(np.max(state.logzs)),
            "r_e": float(state.transform.r_e),
            "n_evaluations": len(state.logzs),
            "ess_next": float(est.ess),
            "wall_ms": wall_ms,
        }
        if m == 1:
            diagnostics["init_evaluations"] = init_log
        yield OptimizationStep(m=m, theta_star=theta_star,
                               omega_star=omega_star, u_star=float(u_star),
                               theta_next=theta_next,
                               log_z_next=float(est.log_z),
                               diagnostics=diagnostics)
