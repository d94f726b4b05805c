"""One-dimensional bimodal target with deliberate prior misspecification.

The prior concentrates near zero while the likelihood rewards |theta| near 5,
so the evidence surface is bimodal and far outside the initial prior mass;
exercises unbounded search and scaling adaptation.
"""

import math

from ..dists import Normal
from ..model import ModelProgram, observe, sample


def make_bimodal_model(prior_std=0.5, lik_std=0.5, y_obs=0.0):
    def body(_inputs):
        theta = yield sample(Normal(0.0, prior_std), name="theta")
        yield observe(Normal(5.0 - abs(theta), lik_std), y_obs)
        return theta

    return ModelProgram(body, ("theta",), name="bimodal")


def bimodal_log_joint(theta, prior_std=0.5, lik_std=0.5, y_obs=0.0):
    """Closed-form log p(Y, theta); the model has no latent variables."""
    def log_normal(x, mu, std):
        z = (x - mu) / std
        return -0.5 * z * z - math.log(std) - 0.5 * math.log(2.0 * math.pi)

    return (log_normal(theta, 0.0, prior_std)
            + log_normal(y_obs, 5.0 - abs(theta), lik_std))
