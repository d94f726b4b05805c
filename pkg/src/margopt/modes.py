"""Execution modes over generative models: prior, marginal, acquisition.

The three modes reinterpret the same model body at runtime instead of
rewriting source: prior mode drops all conditioning and stops as soon as every
optimization variable is bound; marginal mode pins the optimization variables
to supplied values and scores them along with the observes, yielding the
unnormalized target log p(Y, theta); acquisition mode runs like prior mode and
then attaches an external nonnegative weight to the drawn theta. ``validate``
probes a model for violations of the optimization-variable contract.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError, ModelViolationError
from .model import ExecutionRecord, Handler, ModelProgram, run_model


class PriorHandler(Handler):
    """Draw fresh, skip conditioning, stop once every optimization id is bound."""

    def __init__(self, optim_ids):
        super().__init__(optim_ids)
        self._remaining = set(optim_ids)

    def on_sample(self, dist, name, rng):
        value = dist.sample(rng)
        if name is not None:
            self.register(name, value)
            self._remaining.discard(name)
        return value, dist.log_density(value), 0.0

    def on_observe(self, dist, value, rng):
        return None

    def should_stop(self):
        return not self._remaining


class MarginalHandler(Handler):
    """Replay supplied optimization values and score them; condition normally."""

    def __init__(self, optim_ids, theta_hat):
        super().__init__(optim_ids)
        missing = set(optim_ids) - set(theta_hat)
        if missing:
            raise ContractError(f"theta is missing optimization variables: {sorted(missing)}")
        self.theta_hat = theta_hat

    def on_sample(self, dist, name, rng):
        if name is None:
            return dist.sample(rng), None, 0.0
        value = self.theta_hat[name]
        self.register(name, value)
        log_prior = dist.log_density(value)
        return value, log_prior, log_prior

    def on_observe(self, dist, value, rng):
        return dist.log_density(value)


class _ThetaScoreHandler(MarginalHandler):
    """Marginal replay of theta only: observes skipped, early termination."""

    def __init__(self, optim_ids, theta_hat):
        super().__init__(optim_ids, theta_hat)
        self._remaining = set(optim_ids)

    def on_sample(self, dist, name, rng):
        value, log_prior, incr = super().on_sample(dist, name, rng)
        if name is not None:
            self._remaining.discard(name)
        return value, log_prior, incr

    def on_observe(self, dist, value, rng):
        return None

    def should_stop(self):
        return not self._remaining


@dataclass
class PriorRun:
    """Unconditioned draw of the optimization variables."""

    theta: dict
    early_terminated: bool
    record: ExecutionRecord

    @property
    def theta_log_prior(self):
        return sum(c.log_prior for c in self.record.choices
                   if isinstance(c.address, str))


@dataclass
class MarginalRun:
    """One marginal-mode execution: log p(Y, theta) contribution of the trace."""

    log_weight: float
    record: ExecutionRecord


def _ordered_theta(model, bindings):
    # Order follows optim_ids, independent of the order variables were sampled.
    return {k: bindings[k] for k in model.optim_ids}


def run_prior(model, rng):
    """Sample theta from the generative prior; conditioning and downstream
    code after the last binding are skipped entirely."""
    handler = PriorHandler(model.optim_ids)
    record = run_model(model, handler, rng)
    missing = [k for k in model.optim_ids if k not in record.optim_bindings]
    if missing:
        raise ModelViolationError(
            f"optimization variables never bound: {missing}", rule_id="multiplicity")
    return PriorRun(theta=_ordered_theta(model, record.optim_bindings),
                    early_terminated=record.early_terminated,
                    record=record)


def run_marginal(model, theta_hat, rng):
    """Score theta_hat and the observations in one fresh execution.

    The log-weight includes both the prior density terms of theta_hat and the
    observation terms; values outside the prior support give ``-inf`` rather
    than raising.
    """
    handler = MarginalHandler(model.optim_ids, theta_hat)
    record = run_model(model, handler, rng)
    missing = [k for k in model.optim_ids if k not in record.optim_bindings]
    if missing:
        raise ModelViolationError(
            f"optimization variables never bound: {missing}", rule_id="multiplicity")
    return MarginalRun(log_weight=record.obs_log_weight, record=record)


def score_theta_prior(model, theta, rng):
    """Log prior density of theta under one execution context.

    Replays theta at its binding sites, draws any other upstream randomness
    fresh, and stops early; exact whenever the priors on the optimization
    variables have fixed parameters.
    """
    handler = _ThetaScoreHandler(model.optim_ids, theta)
    record = run_model(model, handler, rng)
    return record.obs_log_weight


def run_acquisition(model, zeta, rng):
    """Draw theta from the prior and weight the execution by zeta(theta).

    The returned log-weight is ``log zeta(theta)`` alone; prior terms are
    excluded because the draw itself came from the prior.
    """
    prior = run_prior(model, rng)
    value = zeta(prior.theta)
    value = float(value)
    if math.isnan(value) or value < 0.0:
        raise ContractError(f"acquisition weight must be >= 0, got {value}")
    log_weight = math.log(value) if value > 0.0 else float("-inf")
    return prior.theta, log_weight


# ---------------------------------------------------------------------------
# Validation of the optimization-variable restrictions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    rule_id: str
    variable_id: str
    message: str


@dataclass
class ValidationReport:
    ok: bool
    violations: list = field(default_factory=list)

    def to_dict(self):
        return {"ok": self.ok,
                "violations": [{"rule_id": v.rule_id, "variable_id": v.variable_id,
                                "message": v.message} for v in self.violations]}


class _ProbeHandler(Handler):
    """Tolerant forward execution collecting binding counts and measure tags."""

    def __init__(self, optim_ids):
        super().__init__(optim_ids)
        self.counts = {k: 0 for k in optim_ids}
        self.measures = {k: set() for k in optim_ids}
        self.unknown_measure = set()

    def on_sample(self, dist, name, rng):
        value = dist.sample(rng)
        if name is not None:
            self.counts[name] += 1
            try:
                self.measures[name].add(dist.base_measure)
            except Exception:
                self.unknown_measure.add(name)
        return value, None, 0.0

    def on_observe(self, dist, value, rng):
        return None


def validate(model, probe_budget=50, rng=None):
    """Probe the model for optimization-variable contract violations.

    Runs ``probe_budget`` unconditioned executions and reports multiplicity
    violations (a variable bound zero or multiple times), base-measure
    mismatches across traces, unknown base measures, and variables registered
    through anything but a direct sample. Violations are data, not exceptions.
    """
    if probe_budget < 1:
        raise ContractError("probe_budget must be >= 1")
    if rng is None:
        rng = np.random.default_rng()
    bad_counts = {}
    seen_rules = set()
    violations = []
    measures = {k: set() for k in model.optim_ids}
    unknown = set()
    for _ in range(probe_budget):
        probe = _ProbeHandler(model.optim_ids)
        try:
            run_model(model, probe, rng)
        except ModelViolationError as err:
            key = (err.rule_id or "model-violation", str(err))
            if key not in seen_rules:
                seen_rules.add(key)
                violations.append(Violation(err.rule_id or "model-violation",
                                            "", str(err)))
        else:
            for name, count in probe.counts.items():
                if count != 1 and name not in bad_counts:
                    bad_counts[name] = count
        for name in model.optim_ids:
            measures[name] |= probe.measures[name]
        unknown |= probe.unknown_measure
    for name, count in bad_counts.items():
        violations.append(Violation(
            "multiplicity", name,
            f"variable {name!r} bound {count} times in a probe execution"))
    for name in model.optim_ids:
        if len(measures[name]) > 1:
            violations.append(Violation(
                "measure-mismatch", name,
                f"variable {name!r} saw base measures "
                f"{sorted(str(t) for t in measures[name])} across probe executions"))
        if name in unknown:
            violations.append(Violation(
                "unknown-measure", name,
                f"variable {name!r} was bound to a distribution with no "
                "base-measure tag"))
    return ValidationReport(ok=not violations, violations=violations)


# ---------------------------------------------------------------------------
# Flattened view of theta for scaling, surrogates, and random-walk proposals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ThetaComponent:
    name: str
    kind: str
    size: int
    offset: int
    prior: object

    @property
    def is_discrete(self):
        return self.kind in ("discrete", "uniform-discrete")

    @property
    def is_simplex(self):
        return self.kind == "dirichlet"


class _LayoutProbeHandler(PriorHandler):
    def __init__(self, optim_ids):
        super().__init__(optim_ids)
        self.dists = {}

    def on_sample(self, dist, name, rng):
        if name is not None:
            self.dists[name] = dist
        return super().on_sample(dist, name, rng)


@dataclass(frozen=True)
class ThetaLayout:
    """Fixed flattening of a theta map into a real vector and back."""

    components: tuple
    dim: int

    @classmethod
    def from_model(cls, model, rng):
        handler = _LayoutProbeHandler(model.optim_ids)
        record = run_model(model, handler, rng)
        comps = []
        offset = 0
        for name in model.optim_ids:
            if name not in record.optim_bindings:
                raise ModelViolationError(
                    f"optimization variable {name!r} never bound during layout probe",
                    rule_id="multiplicity")
            value = record.optim_bindings[name]
            size = 1 if np.isscalar(value) else int(np.asarray(value).size)
            comps.append(ThetaComponent(name=name, kind=handler.dists[name].kind,
                                        size=size, offset=offset,
                                        prior=handler.dists[name]))
            offset += size
        return cls(components=tuple(comps), dim=offset)

    def flatten(self, theta):
        vec = np.empty(self.dim)
        for c in self.components:
            v = theta[c.name]
            if c.size == 1 and np.isscalar(v):
                vec[c.offset] = float(v)
            else:
                vec[c.offset:c.offset + c.size] = np.asarray(v, dtype=float).ravel()
        return vec

    def unflatten(self, vec):
        theta = {}
        for c in self.components:
            if c.size == 1:
                v = float(vec[c.offset])
                theta[c.name] = int(round(v)) if c.is_discrete else v
            else:
                theta[c.name] = np.asarray(vec[c.offset:c.offset + c.size], dtype=float).copy()
        return theta
