"""Kernel values, symmetry, positive semidefiniteness."""

import math

import numpy as np
import pytest

from margopt.errors import ParameterError
from margopt.gp import GPHyperparameters, gram, kernel, sample_hyperprior


def test_zero_distance_sums_signal_variances():
    hp = GPHyperparameters.from_values(0.1, 1.0, 1.0, [0.7], [1.3])
    assert kernel([0.3], [0.3], hp) == pytest.approx(2.0, abs=1e-12)


def test_pure_matern52_at_unit_distance():
    hp = GPHyperparameters.from_values(1e-8, 1e-12, 1.0, [1.0], [1.0])
    expect = (1 + math.sqrt(5) + 5.0 / 3.0) * math.exp(-math.sqrt(5))
    assert kernel([0.0], [1.0], hp) == pytest.approx(expect, abs=1e-5)
    assert expect == pytest.approx(0.52400, abs=1e-5)


def test_pure_matern32_at_unit_distance():
    hp = GPHyperparameters.from_values(1e-8, 1.0, 1e-12, [1.0], [1.0])
    expect = (1 + math.sqrt(3)) * math.exp(-math.sqrt(3))
    assert kernel([0.0], [1.0], hp) == pytest.approx(expect, abs=1e-5)


def test_ard_distance_uses_squared_scaled_differences():
    # with per-dimension scales, distance is sqrt(sum((dx_i/rho_i)^2))
    hp = GPHyperparameters.from_values(1e-8, 1e-12, 1.0, [1.0, 1.0], [2.0, 0.5])
    a = [0.0, 0.0]
    b = [2.0, 0.5]
    d = math.sqrt((2.0 / 2.0) ** 2 + (0.5 / 0.5) ** 2)
    expect = (1 + math.sqrt(5) * d + 5.0 / 3.0 * d * d) * math.exp(-math.sqrt(5) * d)
    assert kernel(a, b, hp) == pytest.approx(expect, rel=1e-9)


def test_symmetry():
    rng = np.random.default_rng(0)
    hp = sample_hyperprior(3, rng)
    for _ in range(20):
        a = rng.uniform(-1, 1, 3)
        b = rng.uniform(-1, 1, 3)
        assert kernel(a, b, hp) == pytest.approx(kernel(b, a, hp), rel=1e-12)


def test_dimension_mismatch_rejected():
    hp = GPHyperparameters.from_values(0.1, 1.0, 1.0, [1.0], [1.0])
    with pytest.raises(ParameterError):
        kernel([0.0, 1.0], [1.0, 0.0], hp)


def test_gram_matrices_psd():
    rng = np.random.default_rng(1)
    for _ in range(10):
        D = int(rng.integers(1, 4))
        m = int(rng.integers(2, 20))
        X = rng.uniform(-1, 1, (m, D))
        hp = sample_hyperprior(D, rng)
        K = gram(X, hp)
        assert np.allclose(K, K.T)
        eig = np.linalg.eigvalsh(K)
        assert eig.min() >= -1e-10 * np.trace(K)


def test_hyperparameter_vector_validation():
    with pytest.raises(ParameterError):
        GPHyperparameters(np.zeros(4))
    with pytest.raises(ParameterError):
        GPHyperparameters.from_values(-1.0, 1.0, 1.0, [1.0], [1.0])
