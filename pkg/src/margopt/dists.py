"""Distribution objects: sampling, log densities, base-measure tags.

Every non-factor distribution carries a base measure (Lebesgue of some
dimension, or counting); optimization variables must keep the same base
measure across all execution traces, which is what the tags are checked
against. Log densities are taken with respect to the base measure and return
``-inf`` outside the support.
"""

import math
from typing import NamedTuple

import numpy as np
from scipy.special import gammaln

from . import accel
from .errors import ParameterError, UnsupportedOperationError

_LOG_2PI = math.log(2.0 * math.pi)
NEG_INF = float("-inf")


class Measure(NamedTuple):
    """Base-measure tag: 'lebesgue' with a dimension, or 'counting'."""

    kind: str
    dim: int

    def __str__(self):
        if self.kind == "counting":
            return "counting"
        return f"lebesgue-{self.dim}"


COUNTING = Measure("counting", 0)
LEBESGUE_1 = Measure("lebesgue", 1)


def _as_float(value, who):
    if isinstance(value, (bool, np.bool_)) or not isinstance(
            value, (int, float, np.integer, np.floating)):
        raise TypeError(f"{who} expects a scalar value, got {type(value).__name__}")
    return float(value)


class Distribution:
    """Base class; subclasses are immutable and safe to share across threads."""

    kind = "abstract"

    def sample(self, rng):
        raise NotImplementedError

    def log_density(self, value):
        raise NotImplementedError

    @property
    def base_measure(self):
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}()"


class Normal(Distribution):
    kind = "normal"

    def __init__(self, mu, sigma):
        self.mu = float(mu)
        self.sigma = float(sigma)
        if not self.sigma > 0.0:
            raise ParameterError(f"normal scale must be > 0, got {sigma}")
        self._log_norm = -math.log(self.sigma) - 0.5 * _LOG_2PI

    def sample(self, rng):
        return self.mu + self.sigma * rng.standard_normal()

    def log_density(self, value):
        z = (_as_float(value, "normal") - self.mu) / self.sigma
        return -0.5 * z * z + self._log_norm

    @property
    def base_measure(self):
        return LEBESGUE_1

    def __repr__(self):
        return f"Normal({self.mu}, {self.sigma})"


class MvNormal(Distribution):
    """Multivariate normal; pass ``diag`` (per-dimension stds) for the fast path."""

    kind = "mvn"

    def __init__(self, mean, cov=None, diag=None):
        self.mean = np.asarray(mean, dtype=float)
        if self.mean.ndim != 1:
            raise ParameterError("mvn mean must be a vector")
        k = self.mean.shape[0]
        if (cov is None) == (diag is None):
            raise ParameterError("mvn takes exactly one of cov or diag")
        if diag is not None:
            self.diag = np.asarray(diag, dtype=float)
            if self.diag.shape != (k,) or not np.all(self.diag > 0.0):
                raise ParameterError("mvn diagonal stds must be positive, one per dim")
            self.cov = None
            self._iso_sigma = float(self.diag[0]) if np.all(self.diag == self.diag[0]) else None
        else:
            self.diag = None
            self._iso_sigma = None
            self.cov = np.asarray(cov, dtype=float)
            if self.cov.shape != (k, k):
                raise ParameterError("mvn covariance must be square")
            try:
                self._chol = np.linalg.cholesky(self.cov)
            except np.linalg.LinAlgError as exc:
                raise ParameterError("mvn covariance must be positive definite") from exc
            self._log_det = 2.0 * float(np.sum(np.log(np.diag(self._chol))))

    @classmethod
    def iso(cls, mean, sigma):
        """Fast isotropic construction; trusts its arguments (hot loops)."""
        self = object.__new__(cls)
        self.mean = mean
        self.cov = None
        self.diag = None
        self._iso_sigma = sigma
        return self

    @property
    def dim(self):
        return self.mean.shape[0]

    def sample(self, rng):
        z = rng.standard_normal(self.dim)
        if self.diag is not None:
            return self.mean + self.diag * z
        if self._iso_sigma is not None:
            return self.mean + self._iso_sigma * z
        return self.mean + self._chol @ z

    def log_density(self, value):
        v = np.asarray(value, dtype=float)
        if v.shape != self.mean.shape:
            raise TypeError(f"mvn expects shape {self.mean.shape}, got {v.shape}")
        if self._iso_sigma is not None:
            return accel.iso_normal_logpdf(v, self.mean, self._iso_sigma)
        if self.diag is not None:
            return accel.diag_normal_logpdf(v, self.mean, self.diag)
        r = np.linalg.solve(self._chol, v - self.mean)
        return float(-0.5 * (r @ r) - 0.5 * self._log_det - 0.5 * self.dim * _LOG_2PI)

    @property
    def base_measure(self):
        return Measure("lebesgue", self.dim)

    def __repr__(self):
        return f"MvNormal(dim={self.dim}, {'diag' if self.diag is not None else 'full'})"


class UniformContinuous(Distribution):
    kind = "uniform-continuous"

    def __init__(self, low, high):
        self.low = float(low)
        self.high = float(high)
        if not self.high > self.low:
            raise ParameterError(f"uniform requires high > low, got [{low}, {high}]")
        self._log_dens = -math.log(self.high - self.low)

    def sample(self, rng):
        return self.low + (self.high - self.low) * rng.random()

    def log_density(self, value):
        v = _as_float(value, "uniform-continuous")
        if self.low <= v <= self.high:
            return self._log_dens
        return NEG_INF

    @property
    def base_measure(self):
        return LEBESGUE_1

    def __repr__(self):
        return f"UniformContinuous({self.low}, {self.high})"


class Gamma(Distribution):
    """Shape/rate parameterization."""

    kind = "gamma"

    def __init__(self, shape, rate):
        self.shape = float(shape)
        self.rate = float(rate)
        if not (self.shape > 0.0 and self.rate > 0.0):
            raise ParameterError("gamma shape and rate must be > 0")
        self._log_norm = self.shape * math.log(self.rate) - gammaln(self.shape)

    def sample(self, rng):
        return float(rng.gamma(self.shape, 1.0 / self.rate))

    def log_density(self, value):
        v = _as_float(value, "gamma")
        if v <= 0.0:
            return NEG_INF
        return (self.shape - 1.0) * math.log(v) - self.rate * v + self._log_norm

    @property
    def base_measure(self):
        return LEBESGUE_1

    def __repr__(self):
        return f"Gamma({self.shape}, {self.rate})"


class Dirichlet(Distribution):
    """Density w.r.t. Lebesgue measure on the (K-1)-dimensional simplex."""

    kind = "dirichlet"

    def __init__(self, concentration):
        self.concentration = np.asarray(concentration, dtype=float)
        if self.concentration.ndim != 1 or self.concentration.shape[0] < 1:
            raise ParameterError("dirichlet needs a concentration vector")
        if not np.all(self.concentration > 0.0):
            raise ParameterError("dirichlet concentrations must be > 0")
        self._log_norm = float(gammaln(np.sum(self.concentration))
                               - np.sum(gammaln(self.concentration)))

    @property
    def dim(self):
        return self.concentration.shape[0]

    def sample(self, rng):
        return rng.dirichlet(self.concentration)

    def log_density(self, value):
        v = np.asarray(value, dtype=float)
        if v.shape != (self.dim,):
            raise TypeError(f"dirichlet expects shape ({self.dim},), got {v.shape}")
        if np.any(v < 0.0) or abs(float(np.sum(v)) - 1.0) > 1e-8:
            return NEG_INF
        with np.errstate(divide="ignore"):
            terms = (self.concentration - 1.0) * np.log(v)
        if np.any(np.isnan(terms)):
            return NEG_INF
        total = float(np.sum(terms))
        if total == NEG_INF:
            return NEG_INF
        return total + self._log_norm

    @property
    def base_measure(self):
        return Measure("lebesgue", self.dim - 1)

    def __repr__(self):
        return f"Dirichlet({self.concentration.tolist()})"


class Discrete(Distribution):
    """Categorical over indices 0..K-1 with explicit probabilities."""

    kind = "discrete"

    def __init__(self, probs):
        p = np.asarray(probs, dtype=float)
        if p.ndim != 1 or p.shape[0] < 1:
            raise ParameterError("discrete needs a probability vector")
        if np.any(p < 0.0):
            raise ParameterError("discrete probabilities must be >= 0")
        total = float(np.sum(p))
        if not total > 0.0:
            raise ParameterError("discrete probabilities must not all be zero")
        self.probs = p / total
        self._cum = np.cumsum(self.probs)

    @property
    def n(self):
        return self.probs.shape[0]

    def sample(self, rng):
        return int(np.searchsorted(self._cum, rng.random(), side="right"))

    def log_density(self, value):
        if isinstance(value, (bool, np.bool_)) or not isinstance(value, (int, np.integer)):
            raise TypeError(f"discrete expects an integer index, got {type(value).__name__}")
        k = int(value)
        if 0 <= k < self.n and self.probs[k] > 0.0:
            return math.log(self.probs[k])
        return NEG_INF

    @property
    def base_measure(self):
        return COUNTING

    def __repr__(self):
        return f"Discrete({self.probs.tolist()})"


class UniformDiscrete(Distribution):
    """Uniform over the integers low..high inclusive."""

    kind = "uniform-discrete"

    def __init__(self, low, high):
        self.low = int(low)
        self.high = int(high)
        if self.high < self.low:
            raise ParameterError(f"uniform-discrete requires high >= low, got [{low}, {high}]")
        self._log_dens = -math.log(self.high - self.low + 1)

    def sample(self, rng):
        return int(rng.integers(self.low, self.high + 1))

    def log_density(self, value):
        if isinstance(value, (bool, np.bool_)) or not isinstance(value, (int, np.integer)):
            raise TypeError("uniform-discrete expects an integer value")
        if self.low <= int(value) <= self.high:
            return self._log_dens
        return NEG_INF

    @property
    def base_measure(self):
        return COUNTING

    def __repr__(self):
        return f"UniformDiscrete({self.low}, {self.high})"


class Factor(Distribution):
    """Weighting pseudo-distribution: observing value w adds log-weight w.

    Supports no sampling and has no base measure; used to attach arbitrary
    log-weights (e.g. acquisition values) to an execution.
    """

    kind = "factor"

    def sample(self, rng):
        raise UnsupportedOperationError("factor supports no sampling")

    def log_density(self, value):
        return _as_float(value, "factor")

    @property
    def base_measure(self):
        raise UnsupportedOperationError("factor carries no base measure")

    def __repr__(self):
        return "Factor()"


def dist_sample(d, rng):
    """Draw a value from d; deterministic given the rng state."""
    return d.sample(rng)


def dist_log_density(d, value):
    """Log density of value under d, w.r.t. d's base measure."""
    return d.log_density(value)


def dist_base_measure(d):
    """Base-measure tag of d; raises for factor."""
    return d.base_measure
