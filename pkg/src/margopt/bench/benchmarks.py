"""Classic optimization test functions wrapped as generative models.

The wrapped model places a uniform prior over the standard domain and weights
the execution by -f(theta), so maximizing the evidence minimizes f. An
optional Gaussian noise term exercises the noisy-evaluation path.
"""

import math

import numpy as np

from ..dists import Factor, Normal, UniformContinuous
from ..errors import ParameterError
from ..model import ModelProgram, observe, sample

BRANIN_DOMAIN = ((-5.0, 10.0), (0.0, 15.0))
HARTMANN6_DOMAIN = tuple((0.0, 1.0) for _ in range(6))

BRANIN_OPTIMUM = 0.39788735772973816
HARTMANN6_OPTIMUM = -3.32236801141551

_H6_A = np.array([[10.0, 3.0, 17.0, 3.5, 1.7, 8.0],
                  [0.05, 10.0, 17.0, 0.1, 8.0, 14.0],
                  [3.0, 3.5, 1.7, 10.0, 17.0, 8.0],
                  [17.0, 8.0, 0.05, 10.0, 0.1, 14.0]])
_H6_P = np.array([[0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886],
                  [0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991],
                  [0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650],
                  [0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381]])
_H6_C = np.array([1.0, 1.2, 3.0, 3.2])


def branin(x):
    """Branin-Hoo function on [-5, 10] x [0, 15]; global minimum ~0.397887."""
    x = np.asarray(x, dtype=float)
    _check_domain("branin", x, BRANIN_DOMAIN)
    x1, x2 = float(x[0]), float(x[1])
    a = x2 - 5.1 / (4.0 * math.pi ** 2) * x1 ** 2 + 5.0 / math.pi * x1 - 6.0
    return a * a + 10.0 * (1.0 - 1.0 / (8.0 * math.pi)) * math.cos(x1) + 10.0


def hartmann6(x):
    """Six-dimensional Hartmann function on [0, 1]^6; minimum ~-3.32237."""
    x = np.asarray(x, dtype=float)
    _check_domain("hartmann6", x, HARTMANN6_DOMAIN)
    inner = np.sum(_H6_A * (x[None, :] - _H6_P) ** 2, axis=1)
    return float(-np.sum(_H6_C * np.exp(-inner)))


_FUNCTIONS = {
    "branin": (branin, BRANIN_DOMAIN, BRANIN_OPTIMUM),
    "hartmann6": (hartmann6, HARTMANN6_DOMAIN, HARTMANN6_OPTIMUM),
}


def _check_domain(name, x, domain):
    if x.shape != (len(domain),):
        raise ParameterError(f"{name} expects {len(domain)} coordinates, got {x.shape}")
    for v, (lo, hi) in zip(x, domain):
        if not (lo <= v <= hi):
            raise ParameterError(f"{name} input {v} outside [{lo}, {hi}]")


def benchmark_eval(name, x):
    """Evaluate a named benchmark at a point inside its standard domain."""
    if name not in _FUNCTIONS:
        raise ParameterError(f"unknown benchmark {name!r}; "
                             f"available: {sorted(_FUNCTIONS)}")
    fn, _, _ = _FUNCTIONS[name]
    return fn(x)


def benchmark_info(name):
    """(function, domain, known optimum value) for a named benchmark."""
    if name not in _FUNCTIONS:
        raise ParameterError(f"unknown benchmark {name!r}")
    return _FUNCTIONS[name]


def make_benchmark_model(name, noise_std=0.0):
    """Wrap a benchmark as a model: uniform prior over the domain, weight -f."""
    fn, domain, _ = benchmark_info(name)
    ids = tuple(f"x{i + 1}" for i in range(len(domain)))
    factor = Factor()

    def body(_inputs):
        coords = []
        for i, (lo, hi) in enumerate(domain):
            v = yield sample(UniformContinuous(lo, hi), name=ids[i])
            coords.append(v)
        value = fn(np.asarray(coords))
        if noise_std > 0.0:
            eps = yield sample(Normal(0.0, noise_std))
            value += eps
        yield observe(factor, -value)
        return value

    return ModelProgram(body, ids, name=name)


def theta_to_point(theta):
    """Flatten a benchmark theta map back to the function's input vector."""
    return np.asarray([theta[k] for k in sorted(theta, key=lambda s: int(s[1:]))])
