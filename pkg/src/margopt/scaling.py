"""Adaptive affine scaling of inputs and outputs onto the [-1, 1] hypercube.

Input scaling is initialized from unconditioned prior draws and expands
minimally whenever a new point falls outside the cube; every recorded raw
input always maps back inside. Output scaling expands upward as better
evidence values arrive, while the floor anchor never moves down: values below
it clamp to -1 so that very low likelihood points cannot distort the scale on
unbounded problems. The floor does ratchet UP toward a low quantile of the
evidence values seen so far; log evidence can span thousands of nats between
basins, and without the ratchet a single catastrophic early value would
compress the interesting range into a sliver the surrogate cannot resolve.
The region radii (r_e, the largest scaled radius seen; r_inf = 1.5 r_e) feed
the surrogate's decaying prior mean.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

R_INF_FACTOR = 1.5
_MIN_RADIUS = 1e-6
FLOOR_QUANTILE = 0.25


def _span_to_affine(lo, hi):
    center = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    bad = half <= 0.0
    if np.any(bad):
        warnings.warn("degenerate spread in some dimension; using tiny half-width",
                      RuntimeWarning)
        half = np.where(bad, np.maximum(np.abs(center), 1.0) * 1e-6, half)
    return center, half


@dataclass(frozen=True)
class ScalingTransform:
    """Affine input/output maps plus the scaled-space region radii."""

    in_center: np.ndarray
    in_half: np.ndarray
    out_center: float
    out_half: float
    out_floor: float
    r_e: float
    r_inf: float
    seen_inputs: np.ndarray
    seen_outputs: np.ndarray

    @property
    def input_dim(self):
        return self.in_center.shape[0]

    def scale_inputs(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return (X - self.in_center) / self.in_half

    def unscale_inputs(self, Xs):
        Xs = np.atleast_2d(np.asarray(Xs, dtype=float))
        return Xs * self.in_half + self.in_center

    def scale_input(self, x):
        return (np.asarray(x, dtype=float) - self.in_center) / self.in_half

    def scale_outputs(self, w):
        w = np.asarray(w, dtype=float)
        return np.maximum((w - self.out_center) / self.out_half, -1.0)

    def scale_output(self, w):
        if w == float("-inf"):
            return -1.0
        return max((float(w) - self.out_center) / self.out_half, -1.0)

    def unscale_output(self, ws):
        return float(ws) * self.out_half + self.out_center

    def updated(self, theta_vec, log_z):
        """Incorporate a new evaluated point, expanding scales as needed.

        The input affine expands minimally when the point leaves the cube.
        The output top expands upward for better values; the floor ratchets
        toward the lower quantile of the finite values seen (never down, so
        low-likelihood points are clamped instead of absorbed).
        """
        vec = np.asarray(theta_vec, dtype=float).reshape(1, -1)
        seen = np.concatenate([self.seen_inputs, vec], axis=0)
        scaled = self.scale_inputs(vec)[0]
        if np.any(np.abs(scaled) > 1.0):
            lo = np.min(seen, axis=0)
            hi = np.max(seen, axis=0)
            in_center, in_half = _span_to_affine(lo, hi)
        else:
            in_center, in_half = self.in_center, self.in_half

        outs = self.seen_outputs
        top = self.out_center + self.out_half
        if np.isfinite(log_z):
            outs = np.append(outs, log_z)
            top = max(top, float(log_z))
        floor = max(self.out_floor,
                    float(np.quantile(outs, FLOOR_QUANTILE)))
        floor = min(floor, top - 1e-9 * max(1.0, abs(top)))
        out_center = 0.5 * (floor + top)
        out_half = 0.5 * (top - floor)

        radii = np.sqrt(np.sum(((seen - in_center) / in_half) ** 2, axis=1))
        r_e = max(float(np.max(radii)), _MIN_RADIUS)
        return ScalingTransform(in_center=in_center, in_half=in_half,
                                out_center=out_center, out_half=out_half,
                                out_floor=floor,
                                r_e=r_e, r_inf=R_INF_FACTOR * r_e,
                                seen_inputs=seen, seen_outputs=outs)


def init_scaling(prior_draws, evals):
    """Build the initial transform from prior draws and the first evaluations.

    The input affine spans the min/max (per dimension) of the draws and the
    evaluated points; the output affine spans the finite evidence values, with
    the floor anchored at their minimum.
    """
    draws = np.atleast_2d(np.asarray(prior_draws, dtype=float))
    if draws.shape[0] < 2:
        raise ParameterError("need at least 2 prior draws for input scaling")
    eval_vecs = np.atleast_2d(np.asarray([v for v, _ in evals], dtype=float)) \
        if evals else np.zeros((0, draws.shape[1]))
    logzs = np.asarray([z for _, z in evals], dtype=float)
    finite = logzs[np.isfinite(logzs)]
    if finite.shape[0] < 2:
        raise ParameterError("need at least 2 finite evaluations for output scaling")

    seen = np.concatenate([draws, eval_vecs], axis=0) if eval_vecs.size else draws
    in_center, in_half = _span_to_affine(np.min(seen, axis=0), np.max(seen, axis=0))

    lo, hi = float(np.min(finite)), float(np.max(finite))
    out_center, out_half = _span_to_affine(np.asarray([lo]), np.asarray([hi]))

    radii = np.sqrt(np.sum(((seen - in_center) / in_half) ** 2, axis=1))
    r_e = max(float(np.max(radii)), _MIN_RADIUS)
    return ScalingTransform(in_center=in_center, in_half=in_half,
                            out_center=float(out_center[0]),
                            out_half=float(out_half[0]), out_floor=lo,
                            r_e=r_e, r_inf=R_INF_FACTOR * r_e,
                            seen_inputs=seen, seen_outputs=finite.copy())


def update_scaling(transform, new_point):
    """Functional form of ``ScalingTransform.updated`` for a (theta, log_z) pair."""
    vec, log_z = new_point
    return transform.updated(vec, log_z)
