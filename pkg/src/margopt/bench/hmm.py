"""Hidden Markov model with an unknown number of states.

The number of states K and five stick-breaking fractions are optimization
variables; all five fractions are always sampled so every trace binds the
same variables (fractions beyond K are inert and the target is constant in
them). State means are an increasing stick-breaking sequence anchored at the
data minimum; transition rows are Dirichlet latents marginalized by SMC.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ..dists import Dirichlet, Discrete, Normal, UniformContinuous, UniformDiscrete
from ..errors import ParameterError
from ..model import ModelProgram, observe, sample

MAX_STATES = 5
TRUE_MEANS = (-1.0, 0.0, 4.0)
TRUE_TRANSITIONS = ((0.9, 0.1, 0.0), (0.2, 0.75, 0.05), (0.1, 0.2, 0.7))
EMISSION_STD = 0.2

_PHI_IDS = tuple(f"phi{j}" for j in range(1, MAX_STATES + 1))


@dataclass
class HMMConfig:
    """Generating-chain settings for the synthetic dataset."""

    k_true: int = 3
    means: tuple = TRUE_MEANS
    transitions: tuple = TRUE_TRANSITIONS
    emission_std: float = EMISSION_STD
    T: int = 500

    def __post_init__(self):
        trans = np.asarray(self.transitions, dtype=float)
        if trans.shape != (self.k_true, self.k_true):
            raise ParameterError("transitions must be k_true x k_true")
        if np.any(trans < 0.0) or not np.allclose(trans.sum(axis=1), 1.0):
            raise ParameterError("transition rows must lie on the simplex")
        if len(self.means) != self.k_true:
            raise ParameterError("need one mean per state")
        if not self.emission_std > 0.0:
            raise ParameterError("emission std must be > 0")

    def simulate(self, rng):
        return simulate_hmm_data(rng, T=self.T, means=self.means,
                                 transitions=self.transitions,
                                 emission_std=self.emission_std)


def simulate_hmm_data(rng, T=500, means=TRUE_MEANS, transitions=TRUE_TRANSITIONS,
                      emission_std=EMISSION_STD):
    """Forward-simulate observations from a fixed-parameter chain."""
    means = np.asarray(means, dtype=float)
    trans = np.asarray(transitions, dtype=float)
    y = np.empty(T)
    state = 0
    for t in range(T):
        if t > 0:
            state = int(rng.choice(trans.shape[0], p=trans[state]))
        y[t] = means[state] + emission_std * rng.standard_normal() \
            if emission_std > 0.0 else means[state]
    return y


def stick_breaking_means(y, phis, n_states=MAX_STATES):
    """Increasing means from stick-breaking fractions, anchored at min(y)."""
    lo = float(np.min(y))
    hi = float(np.max(y))
    mu = np.empty(n_states)
    prev = lo
    for j in range(n_states):
        prev = prev + float(phis[j]) * (hi - prev)
        mu[j] = prev
    return mu


def make_hmm_model(y, emission_std=EMISSION_STD):
    y = np.asarray(y, dtype=float)
    T = y.shape[0]
    k_prior = UniformDiscrete(1, MAX_STATES)
    phi_prior = UniformContinuous(0.0, 1.0)

    def body(_inputs):
        k = yield sample(k_prior, name="k")
        phis = []
        for name in _PHI_IDS:
            phi = yield sample(phi_prior, name=name)
            phis.append(phi)
        mu = stick_breaking_means(y, phis, n_states=k)
        rows = []
        if k > 1:
            for j in range(k):
                row = yield sample(Dirichlet(np.ones(k)))
                rows.append(Discrete(row))
        emits = [Normal(float(mu[j]), emission_std) for j in range(k)]
        state = 0
        for t in range(T):
            if t > 0 and k > 1:
                state = yield sample(rows[state])
            yield observe(emits[state], y[t])
        return {"k": k, "means": mu}

    return ModelProgram(body, ("k",) + _PHI_IDS, name="hmm")


def hmm_truth():
    return {"k": 3, "means": list(TRUE_MEANS)}


def make_hmm_distance(y, true_means=TRUE_MEANS):
    """Distance in state-mean space, minimized over injective assignments.

    Candidate means come from all five stick-breaking fractions; the metric
    picks whichever three candidate states best match the generating means,
    so it is invariant to state relabeling.
    """
    y = np.asarray(y, dtype=float)
    true = np.asarray(true_means, dtype=float)
    assignments = list(itertools.permutations(range(MAX_STATES), len(true)))

    def distance(theta):
        phis = [theta[name] for name in _PHI_IDS]
        mu = stick_breaking_means(y, phis, n_states=MAX_STATES)
        best = math.inf
        for idx in assignments:
            d = 0.0
            for j, i in enumerate(idx):
                diff = mu[i] - true[j]
                d += diff * diff
            if d < best:
                best = d
        return math.sqrt(best)

    return distance
