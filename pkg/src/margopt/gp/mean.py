"""Non-stationary prior mean supporting unbounded search.

The mean is zero inside the radius covering every point seen so far (r_e),
decays smoothly from r_e to r_inf with value and slope zero at r_e, and drops
to a large negative sentinel beyond r_inf so the acquisition vanishes there
and new points are never proposed arbitrarily far out.
"""

import math

import numpy as np

from ..errors import ParameterError

SENTINEL = -1.0e6


def bump_mean(r, r_e, r_inf):
    """Mean value at radius ``r`` from the scaled-space origin."""
    if r_e >= r_inf:
        raise ParameterError(f"requires r_e < r_inf, got {r_e} >= {r_inf}")
    if r < 0.0:
        raise ParameterError("radius must be >= 0")
    if r <= r_e:
        return 0.0
    if r >= r_inf:
        return SENTINEL
    s = (r - r_e) / (r_inf - r_e)
    return max(math.log1p(-s) + s, SENTINEL)


class BumpMean:
    """Callable mean function over scaled input points."""

    def __init__(self, r_e, r_inf):
        if r_e >= r_inf:
            raise ParameterError(f"requires r_e < r_inf, got {r_e} >= {r_inf}")
        self.r_e = float(r_e)
        self.r_inf = float(r_inf)

    def __call__(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        r = np.sqrt(np.sum(X * X, axis=1))
        out = np.zeros(r.shape[0])
        inside = r <= self.r_e
        beyond = r >= self.r_inf
        mid = ~inside & ~beyond
        if np.any(mid):
            s = (r[mid] - self.r_e) / (self.r_inf - self.r_e)
            out[mid] = np.maximum(np.log1p(-s) + s, SENTINEL)
        out[beyond] = SENTINEL
        return out

    def __repr__(self):
        return f"BumpMean(r_e={self.r_e:.4g}, r_inf={self.r_inf:.4g})"


class ZeroMean:
    """Flat zero mean, for plain GP regression."""

    def __call__(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.zeros(X.shape[0])

    def __repr__(self):
        return "ZeroMean()"
