"""Hyperparameter posterior sampling: L-BFGS initialization, then HMC.

Each chain ascends the log posterior (marginal likelihood plus hyperprior)
from a fresh hyperprior draw, then runs leapfrog HMC from the optimum with the
step size dual-averaged toward a target acceptance rate during warmup. Chains
are pooled round-robin and thinned into an equally weighted mixture. If every
chain fails, the hyperprior mode is returned as a point mass and flagged.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .. import accel
from .kernels import GPHyperparameters
from .mean import ZeroMean
from .regression import hyperprior_moments

_NEG_INF = float("-inf")
_MAX_ABS_LOG = 30.0


@dataclass(frozen=True)
class HyperBudget:
    """Deterministic per-chain effort split between init and HMC."""

    lbfgs_maxiter: int = 40
    warmup: int = 30
    n_leapfrog: int = 8
    thin: int = 2
    init_step_size: float = 0.3
    target_accept: float = 0.75
    max_init_tries: int = 5


def _make_log_posterior(data, mean_fn, means, stds):
    """Closure computing log posterior and gradient from the raw log vector.

    The mean function carries no hyperparameters, so the residual vector is
    constant and hoisted out of the per-evaluation path.
    """
    X = data.thetas
    resid = data.ws - (mean_fn if mean_fn is not None else ZeroMean())(X)
    inv_var = 1.0 / (stds * stds)
    zeros = np.zeros(means.shape[0])

    def log_posterior(q):
        if np.max(np.abs(q)) > _MAX_ABS_LOG:
            return _NEG_INF, zeros
        jitter = 1e-12 * (math.exp(2.0 * q[0]) + math.exp(2.0 * q[1])
                          + math.exp(2.0 * q[2]))
        ok, lml, grad = accel.lml_value_grad(X, resid, q, jitter)
        if not ok or not math.isfinite(lml):
            return _NEG_INF, zeros
        diff = q - means
        value = lml - 0.5 * float(np.sum(diff * diff * inv_var))
        return value, grad - diff * inv_var

    return log_posterior


def _leapfrog(q, p, step, n_steps, grad_fn, inv_mass):
    _, g = grad_fn(q)
    p = p + 0.5 * step * g
    for i in range(n_steps):
        q = q + step * inv_mass * p
        value, g = grad_fn(q)
        if not math.isfinite(value):
            return q, p, value
        if i < n_steps - 1:
            p = p + step * g
    p = p + 0.5 * step * g
    return q, p, value


def sample_hyperparameters(data, mean_fn=None, n_samples=10, n_chains=2,
                           budget=None, rng=None, second_arg="std"):
    """Draw an equally weighted mixture of hyperparameter samples.

    Returns ``(samples, info)`` where info carries the post-warmup acceptance
    rate and a ``fallback`` flag set when no chain produced a usable state.
    """
    if budget is None:
        budget = HyperBudget()
    if rng is None:
        rng = np.random.default_rng()
    D = data.input_dim
    means, stds = hyperprior_moments(D, second_arg)
    P = means.shape[0]
    logpost_grad = _make_log_posterior(data, mean_fn, means, stds)

    def objective(q):
        value, grad = logpost_grad(q)
        if not math.isfinite(value):
            return 1e12, np.zeros(P)
        return -value, -grad

    per_chain = max(1, math.ceil(n_samples / n_chains))
    pooled = [[] for _ in range(n_chains)]
    accept_count = 0
    accept_total = 0

    for chain in range(n_chains):
        q0 = None
        for _ in range(budget.max_init_tries):
            cand = means + stds * rng.standard_normal(P)
            value, _ = logpost_grad(cand)
            if math.isfinite(value):
                q0 = cand
                break
        if q0 is None:
            continue
        inv_mass = stds * stds
        try:
            res = minimize(objective, q0, jac=True, method="L-BFGS-B",
                           options={"maxiter": budget.lbfgs_maxiter})
            if math.isfinite(res.fun):
                q0 = res.x
                # The inverse-Hessian diagonal approximates the posterior
                # variance per dimension; use it to precondition the momenta.
                diag = np.array([float(res.hess_inv.matvec(e)[i])
                                 for i, e in enumerate(np.eye(P))])
                if np.all(np.isfinite(diag)) and np.all(diag > 0.0):
                    inv_mass = np.clip(diag, 1e-6, stds * stds * 4.0)
        except Exception:
            pass

        q = np.asarray(q0, dtype=float)
        value, _ = logpost_grad(q)
        if not math.isfinite(value):
            continue

        # Dual averaging of the step size toward the target acceptance.
        step = budget.init_step_size
        mu_da = math.log(10.0 * step)
        log_step_bar = math.log(step)
        h_bar = 0.0
        gamma, t0, kappa = 0.05, 10.0, 0.75

        n_iters = budget.warmup + per_chain * budget.thin
        kept = []
        current_value = value
        mom_scale = 1.0 / np.sqrt(inv_mass)
        for it in range(1, n_iters + 1):
            p = rng.standard_normal(P) * mom_scale
            h0 = -current_value + 0.5 * float(np.sum(inv_mass * p * p))
            q_new, p_new, v_new = _leapfrog(q, p, step, budget.n_leapfrog,
                                            logpost_grad, inv_mass)
            if math.isfinite(v_new):
                h1 = -v_new + 0.5 * float(np.sum(inv_mass * p_new * p_new))
                alpha = min(1.0, math.exp(min(h0 - h1, 0.0)))
            else:
                alpha = 0.0
            if alpha > 0.0 and rng.random() < alpha:
                q = q_new
                current_value = v_new
            if it <= budget.warmup:
                frac = 1.0 / (it + t0)
                h_bar = (1.0 - frac) * h_bar + frac * (budget.target_accept - alpha)
                log_step = mu_da - math.sqrt(it) / gamma * h_bar
                # Average only the later iterations so the fixed step is not
                # dragged down by the early search phase.
                if it > budget.warmup // 4:
                    eta = (it - budget.warmup // 4) ** (-kappa)
                    log_step_bar = eta * log_step + (1.0 - eta) * log_step_bar
                step = math.exp(log_step)
                if it == budget.warmup:
                    step = math.exp(log_step_bar)
            else:
                accept_total += 1
                accept_count += alpha
                if (it - budget.warmup) % budget.thin == 0:
                    kept.append(q.copy())
        pooled[chain] = kept

    samples = []
    for j in range(per_chain):
        for chain in range(n_chains):
            if j < len(pooled[chain]):
                samples.append(GPHyperparameters(pooled[chain][j]))
    samples = samples[:n_samples]

    info = {"accept_rate": (accept_count / accept_total) if accept_total else 0.0,
            "fallback": False}
    if not samples:
        warnings.warn("all hyperparameter chains failed; using hyperprior mode",
                      RuntimeWarning)
        info["fallback"] = True
        samples = [GPHyperparameters(means.copy()) for _ in range(n_samples)]
    elif len(samples) < n_samples:
        base = len(samples)
        for i in range(n_samples - base):
            samples.append(samples[i % base])
    return samples, info
