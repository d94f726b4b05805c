"""State-space smoother with chaotic transition dynamics.

The latent 3D state follows a Pickover attractor with unknown parameters
(beta, eta) under a uniform box prior; observations are a fixed linear mixing
into K dimensions plus isotropic noise. The evidence over (beta, eta) is
multimodal with structure at several length scales. Note eta and -eta produce
mirrored but observationally equivalent dynamics.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .. import accel
from ..dists import MvNormal, UniformContinuous
from ..errors import ParameterError
from ..model import ModelProgram, observe, sample

BETA_RANGE = (-3.0, 3.0)
ETA_RANGE = (0.0, 3.0)
TRUE_BETA = -2.3
TRUE_ETA = 1.25


@dataclass
class KalmanConfig:
    """Generation and inference settings; the mixing matrix C is shared."""

    T: int = 500
    K: int = 20
    mu1: np.ndarray = field(
        default_factory=lambda: np.array([-0.2149, -0.0177, 0.7630]))
    sigma1: float = 0.0
    sigma_q: float = 0.01
    sigma_y: float = 0.2
    beta: float = TRUE_BETA
    eta: float = TRUE_ETA
    C: Optional[np.ndarray] = None

    def __post_init__(self):
        self.mu1 = np.asarray(self.mu1, dtype=float)
        if self.mu1.shape != (3,):
            raise ParameterError("mu1 must be a 3-vector")
        if self.C is not None:
            self.C = np.asarray(self.C, dtype=float)
            if self.C.shape != (self.K, 3):
                raise ParameterError(f"C must be {self.K} x 3")


def draw_mixing_matrix(K, rng, concentration=0.1):
    """K x 3 matrix with each column drawn from a symmetric Dirichlet."""
    return np.column_stack([rng.dirichlet(np.full(K, concentration))
                            for _ in range(3)])


def pickover_step(x, beta, eta):
    """One step of the attractor map."""
    a, b, c = float(x[0]), float(x[1]), float(x[2])
    return np.array([math.sin(beta * b) - math.cos(2.5 * a) * c,
                     -math.sin(1.5 * a) * c - math.cos(eta * b),
                     math.sin(a)])


def simulate_kalman_data(cfg, rng):
    """Simulate observations y[0..T-1]; draws C into cfg if unset."""
    if cfg.C is None:
        cfg.C = draw_mixing_matrix(cfg.K, rng)
    x = cfg.mu1 + cfg.sigma1 * rng.standard_normal(3)
    y = np.empty((cfg.T, cfg.K))
    for t in range(cfg.T):
        if t > 0:
            if cfg.sigma_q > 0.0:
                x = pickover_step(x, cfg.beta, cfg.eta) \
                    + cfg.sigma_q * rng.standard_normal(3)
            else:
                x = pickover_step(x, cfg.beta, cfg.eta)
        noise = cfg.sigma_y * rng.standard_normal(cfg.K) if cfg.sigma_y > 0.0 \
            else 0.0
        y[t] = cfg.C @ x + noise
    return y


def simulate_latent_trajectory(x1, beta, eta, T):
    """Noise-free attractor trajectory (row 0 is the start state)."""
    return accel.pickover_trajectory(np.asarray(x1, dtype=float),
                                     float(beta), float(eta), int(T))


def make_kalman_model(cfg, y):
    """Smoother model over (beta, eta) with the latent states marginalized.

    Inference intentionally departs from generation in the initial state:
    x1 ~ N(0, I) reflects an unknown start.
    """
    if not (cfg.sigma_q > 0.0 and cfg.sigma_y > 0.0):
        raise ParameterError("inference requires sigma_q > 0 and sigma_y > 0")
    if cfg.C is None:
        raise ParameterError("config must carry the mixing matrix C")
    y = np.asarray(y, dtype=float)
    T = y.shape[0]
    C = cfg.C
    sigma_q = cfg.sigma_q
    sigma_y = cfg.sigma_y
    zero3 = np.zeros(3)
    sin, cos = math.sin, math.cos
    iso = MvNormal.iso
    x1_prior = MvNormal(zero3, diag=np.ones(3))
    beta_prior = UniformContinuous(*BETA_RANGE)
    eta_prior = UniformContinuous(*ETA_RANGE)

    def body(_inputs):
        beta = yield sample(beta_prior, name="beta")
        eta = yield sample(eta_prior, name="eta")
        x = yield sample(x1_prior)
        a, b, c = float(x[0]), float(x[1]), float(x[2])
        for t in range(T):
            if t > 0:
                mean = np.array([sin(beta * b) - cos(2.5 * a) * c,
                                 -sin(1.5 * a) * c - cos(eta * b),
                                 sin(a)])
                x = yield sample(iso(mean, sigma_q))
                a, b, c = float(x[0]), float(x[1]), float(x[2])
            yield observe(iso(C @ x, sigma_y), y[t])
        return x

    return ModelProgram(body, ("beta", "eta"), name="kalman")


def kalman_truth():
    return {"beta": TRUE_BETA, "eta": TRUE_ETA}


def kalman_distance(theta):
    """Distance to the generating parameters, up to the eta sign symmetry."""
    b = float(theta["beta"])
    e = float(theta["eta"])
    return min(math.hypot(b - TRUE_BETA, e - TRUE_ETA),
               math.hypot(b - TRUE_BETA, e + TRUE_ETA))
