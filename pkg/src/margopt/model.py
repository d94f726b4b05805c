"""Trace-based generative models executed through effect handlers.

A model body is a generator function: it receives its fixed inputs, yields
``sample``/``observe`` requests, and returns its outputs. The driver
(``run_model``) feeds each request to a handler, which decides whether a
sample draws fresh, replays a fixed value, or terminates the execution early,
and how observation weight accumulates. Optimization variables are the samples
tagged with a name from the program's ``optim_ids``; all other randomness is
addressed positionally.
"""

from dataclasses import dataclass, field
from typing import Any, Callable, NamedTuple

from .errors import ContractError, ModelViolationError


class SampleRequest:
    __slots__ = ("dist", "name")

    def __init__(self, dist, name):
        self.dist = dist
        self.name = name


class ObserveRequest:
    __slots__ = ("dist", "value", "name")

    def __init__(self, dist, value, name):
        self.dist = dist
        self.value = value
        self.name = name


def sample(dist, name=None):
    """Request a random draw; ``name`` tags an optimization-variable binding."""
    return SampleRequest(dist, name)


def observe(dist, value, name=None):
    """Condition on ``value`` under ``dist``; yields back the observed value."""
    return ObserveRequest(dist, value, name)


@dataclass(frozen=True)
class ModelProgram:
    """A generative model plus its declared optimization variables.

    ``body(inputs)`` must return a generator yielding sample/observe requests.
    Each optimization id must be bound by exactly one named sample per
    execution, with the same base measure in every trace.
    """

    body: Callable[[Any], Any]
    optim_ids: tuple
    inputs: Any = None
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "optim_ids", tuple(self.optim_ids))

    def start(self):
        return self.body(self.inputs)


class Choice(NamedTuple):
    address: Any
    kind: str
    value: Any
    log_prior: Any


@dataclass
class ExecutionRecord:
    """One execution: ordered choices, observation weight, bindings, outputs."""

    choices: list = field(default_factory=list)
    obs_log_weight: float = 0.0
    optim_bindings: dict = field(default_factory=dict)
    outputs: Any = None
    early_terminated: bool = False


class Handler:
    """Per-execution policy for interpreting sample and observe effects.

    ``on_sample`` returns ``(value, log_prior, weight_incr)`` where
    ``log_prior`` may be None when not scored; ``on_observe`` returns a weight
    increment or None to skip scoring. ``should_stop`` is consulted after each
    named binding.
    """

    def __init__(self, optim_ids=()):
        self.optim_ids = frozenset(optim_ids)
        self.bound = {}

    def register(self, name, value):
        if name in self.bound:
            raise ModelViolationError(
                f"optimization variable {name!r} bound more than once",
                rule_id="multiplicity")
        self.bound[name] = value

    def on_sample(self, dist, name, rng):
        raise NotImplementedError

    def on_observe(self, dist, value, rng):
        raise NotImplementedError

    def should_stop(self):
        return False


class DrawHandler(Handler):
    """Draw every sample fresh and score every observe (forward execution)."""

    def on_sample(self, dist, name, rng):
        value = dist.sample(rng)
        if name is not None:
            self.register(name, value)
        return value, dist.log_density(value), 0.0

    def on_observe(self, dist, value, rng):
        return dist.log_density(value)


class IgnoreObservesHandler(DrawHandler):
    """Forward execution with all conditioning skipped (zero weight)."""

    def on_observe(self, dist, value, rng):
        return None


class ReplayHandler(DrawHandler):
    """Fix selected choices by address (positional index or optimization name).

    Unlisted choices draw fresh; observes are scored. Used to pin individual
    random choices in tests and diagnostics.
    """

    def __init__(self, fixed, optim_ids=()):
        super().__init__(optim_ids)
        self.fixed = dict(fixed)
        self._index = 0

    def on_sample(self, dist, name, rng):
        addr = name if name is not None else self._index
        self._index += 1
        if addr in self.fixed:
            value = self.fixed[addr]
        else:
            value = dist.sample(rng)
        if name is not None:
            self.register(name, value)
        return value, dist.log_density(value), 0.0


def run_model(model, handler, rng):
    """Execute ``model`` under ``handler``; deterministic given the rng state.

    Returns the full ExecutionRecord. Handler-signaled early termination
    closes the generator, so code after the final optimization binding never
    runs in prior/acquisition modes.
    """
    gen = model.start()
    rec = ExecutionRecord()
    optim_ids = frozenset(model.optim_ids)
    index = 0
    try:
        req = next(gen)
        while True:
            cls = req.__class__
            if cls is SampleRequest:
                name = req.name
                if name is not None and name not in optim_ids:
                    raise ContractError(
                        f"sample name {name!r} is not a declared optimization variable")
                value, log_prior, incr = handler.on_sample(req.dist, name, rng)
                rec.choices.append(Choice(name if name is not None else index,
                                          req.dist.kind, value, log_prior))
                index += 1
                if name is not None:
                    rec.optim_bindings[name] = value
                    if incr:
                        rec.obs_log_weight += incr
                    if handler.should_stop():
                        gen.close()
                        rec.early_terminated = True
                        return rec
                elif incr:
                    rec.obs_log_weight += incr
                req = gen.send(value)
            elif cls is ObserveRequest:
                if req.name is not None:
                    raise ModelViolationError(
                        f"optimization variable {req.name!r} attached to an observe; "
                        "optimization variables must be bound by a direct sample",
                        rule_id="not-direct-sample")
                incr = handler.on_observe(req.dist, req.value, rng)
                if incr is not None:
                    rec.obs_log_weight += incr
                req = gen.send(req.value)
            else:
                raise TypeError(f"model yielded {type(req).__name__}; "
                                "expected a sample or observe request")
    except StopIteration as stop:
        rec.outputs = stop.value
    return rec
