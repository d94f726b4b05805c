"""Combined Matern-3/2 + Matern-5/2 kernel with per-dimension length scales.

Hyperparameters live in log space for unconstrained inference, packed as
``[log sigma_n, log sigma_32, log sigma_52, log rho_1..D, log varrho_1..D]``.
Distances are ARD-scaled Euclidean: sqrt(sum(((x_i - y_i)/rho_i)^2)).
"""

from dataclasses import dataclass

import numpy as np

from .. import accel
from ..errors import ParameterError


@dataclass(frozen=True)
class GPHyperparameters:
    """Log-space hyperparameter vector for the combined Matern kernel."""

    log_values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.log_values, dtype=float)
        if v.ndim != 1 or v.shape[0] < 5 or (v.shape[0] - 3) % 2 != 0:
            raise ParameterError("hyperparameter vector must have length 3 + 2D")
        object.__setattr__(self, "log_values", v)

    @classmethod
    def from_values(cls, sigma_n, sigma_32, sigma_52, rho, varrho):
        rho = np.atleast_1d(np.asarray(rho, dtype=float))
        varrho = np.atleast_1d(np.asarray(varrho, dtype=float))
        if rho.shape != varrho.shape:
            raise ParameterError("rho and varrho must have matching dimension")
        parts = np.concatenate([[sigma_n, sigma_32, sigma_52], rho, varrho])
        if not np.all(parts > 0.0):
            raise ParameterError("all hyperparameters must be positive")
        return cls(np.log(parts))

    @property
    def input_dim(self):
        return (self.log_values.shape[0] - 3) // 2

    @property
    def sigma_n(self):
        return float(np.exp(self.log_values[0]))

    @property
    def sigma_32(self):
        return float(np.exp(self.log_values[1]))

    @property
    def sigma_52(self):
        return float(np.exp(self.log_values[2]))

    @property
    def rho(self):
        D = self.input_dim
        return np.exp(self.log_values[3:3 + D])

    @property
    def varrho(self):
        D = self.input_dim
        return np.exp(self.log_values[3 + D:3 + 2 * D])


def kernel(theta_a, theta_b, hp):
    """Prior covariance between two points."""
    a = np.atleast_2d(np.asarray(theta_a, dtype=float))
    b = np.atleast_2d(np.asarray(theta_b, dtype=float))
    if a.shape[1] != hp.input_dim or b.shape[1] != hp.input_dim:
        raise ParameterError(
            f"kernel inputs must have dimension {hp.input_dim}")
    return float(accel.matern_cross(a, b, hp.log_values)[0, 0])


def gram(X, hp):
    """Symmetric kernel matrix of a point set (no observation noise)."""
    X = np.asarray(X, dtype=float)
    if X.shape[1] != hp.input_dim:
        raise ParameterError(f"kernel inputs must have dimension {hp.input_dim}")
    return accel.matern_gram(X, hp.log_values)
