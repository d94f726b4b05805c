"""Evidence estimation and samplers over generative models.

``smc_marginal`` estimates log p(Y, theta) by running many marginal-mode
executions with systematic resampling at observation barriers. Particles are
suspended generators; duplicating a particle at a resampling step re-creates
its generator and fast-forwards it by replaying the recorded values, so model
bodies must be deterministic functions of the values fed back to them (true
for anything expressed through sample/observe effects).

``lmh_step``/``rmh_step`` are Metropolis-Hastings kernels on the optimization
variables; ``ais_maximize`` anneals from the prior to prior times an
acquisition weight to produce constraint-respecting maximizers; ``pmmh``
wraps either kernel around SMC evidence estimates as an optimization baseline.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from . import accel
from .errors import ContractError, ModelViolationError, ParameterError
from .model import ObserveRequest, SampleRequest
from .modes import ThetaLayout, run_prior, score_theta_prior

NEG_INF = float("-inf")


@dataclass
class EvidenceEstimate:
    """Evidence estimate with weighted posterior output samples."""

    log_z: float
    outputs: list
    ess: float
    n_particles: int


class _Particle:
    __slots__ = ("gen", "fed", "pending", "started", "logw", "done", "output", "bound")

    def __init__(self, gen):
        self.gen = gen
        self.fed = []
        self.pending = None
        self.started = False
        self.logw = 0.0
        self.done = False
        self.output = None
        self.bound = None


def _advance(p, theta_hat, rng):
    """Run one particle to its next observation barrier or to completion."""
    gen = p.gen
    fed = p.fed
    try:
        if p.started:
            fed.append(p.pending)
            req = gen.send(p.pending)
        else:
            p.started = True
            req = next(gen)
        while True:
            if req.__class__ is SampleRequest:
                name = req.name
                if name is None:
                    v = req.dist.sample(rng)
                else:
                    if p.bound is None:
                        p.bound = set()
                    if name in p.bound:
                        raise ModelViolationError(
                            f"optimization variable {name!r} bound more than once",
                            rule_id="multiplicity")
                    p.bound.add(name)
                    v = theta_hat[name]
                    p.logw += req.dist.log_density(v)
                fed.append(v)
                req = gen.send(v)
            elif req.__class__ is ObserveRequest:
                p.logw += req.dist.log_density(req.value)
                p.pending = req.value
                return
            else:
                raise TypeError(f"model yielded {type(req).__name__}")
    except StopIteration as stop:
        p.output = stop.value
        p.done = True


def _clone(p, model):
    """Duplicate a suspended particle by replaying its recorded values."""
    q = _Particle(model.start() if not p.done else None)
    q.fed = list(p.fed)
    q.pending = p.pending
    q.started = p.started
    q.logw = p.logw
    q.done = p.done
    q.output = p.output
    q.bound = set(p.bound) if p.bound is not None else None
    if not p.done:
        gen = q.gen
        next(gen)
        send = gen.send
        for v in q.fed:
            send(v)
    return q


def _weighted_outputs(particles, weights, max_outputs, rng):
    pairs = [(p.output, float(w)) for p, w in zip(particles, weights) if w > 0.0]
    if max_outputs is not None and len(pairs) > max_outputs:
        w = np.array([x[1] for x in pairs])
        w /= w.sum()
        idx = rng.choice(len(pairs), size=max_outputs, p=w)
        pairs = [(pairs[int(i)][0], 1.0 / max_outputs) for i in idx]
    return pairs


def smc_marginal(model, theta_hat, n_particles, resample=True, rng=None,
                 max_outputs=100):
    """Sequential Monte Carlo evidence estimate of log p(Y, theta_hat).

    Includes the prior density terms of theta_hat in the estimate. With
    ``resample`` set, systematic resampling triggers at observation barriers
    whenever the effective sample size drops below half the particle count;
    without it this is plain importance sampling from the prior. Returns
    ``log_z = -inf`` with empty outputs when every particle is impossible.
    """
    if n_particles < 1:
        raise ContractError("n_particles must be >= 1")
    if rng is None:
        rng = np.random.default_rng()
    missing = set(model.optim_ids) - set(theta_hat)
    if missing:
        raise ContractError(f"theta is missing optimization variables: {sorted(missing)}")

    particles = [_Particle(model.start()) for _ in range(n_particles)]
    log_z_acc = 0.0
    n = n_particles

    while True:
        for p in particles:
            if not p.done:
                _advance(p, theta_hat, rng)
        lw = np.array([p.logw for p in particles])
        top = float(np.max(lw))
        if top == NEG_INF:
            return EvidenceEstimate(NEG_INF, [], 0.0, n)
        if all(p.done for p in particles):
            break
        if resample:
            u = np.exp(lw - top)
            total = float(np.sum(u))
            ess = total * total / float(np.sum(u * u))
            if ess < 0.5 * n:
                log_z_acc += float(logsumexp(lw)) - math.log(n)
                ancestors = accel.systematic_resample(u / total, rng.random())
                counts = np.bincount(ancestors, minlength=n)
                new_particles = []
                for a, c in enumerate(counts):
                    if c == 0:
                        if not particles[a].done:
                            particles[a].gen.close()
                        continue
                    keep = particles[a]
                    keep.logw = 0.0
                    new_particles.append(keep)
                    for _ in range(int(c) - 1):
                        new_particles.append(_clone(keep, model))
                particles = new_particles

    log_z = log_z_acc + float(logsumexp(lw)) - math.log(n)
    u = np.exp(lw - top)
    total = float(np.sum(u))
    weights = u / total
    ess = total * total / float(np.sum(u * u))
    outputs = _weighted_outputs(particles, weights, max_outputs, rng)
    return EvidenceEstimate(log_z, outputs, float(ess), n)


# ---------------------------------------------------------------------------
# Metropolis-Hastings kernels on the optimization variables
# ---------------------------------------------------------------------------

def _accept(rng, log_new, log_old, log_q_corr=0.0):
    """Standard MH acceptance on log scale; impossible proposals never accept."""
    if log_new == NEG_INF or math.isnan(log_new):
        return False
    if log_old == NEG_INF:
        return True
    log_alpha = log_new - log_old + log_q_corr
    return log_alpha >= 0.0 or math.log(rng.random()) < log_alpha


def lmh_step(current, model, eval_fn, rng):
    """One lightweight MH step: propose theta fresh from the prior.

    ``current`` is a ``(theta, log_w)`` pair with ``log_w = eval_fn(theta)``;
    the prior proposal cancels the prior density in the acceptance ratio.
    """
    theta, log_w = current
    proposal = run_prior(model, rng).theta
    log_w_new = eval_fn(proposal)
    if _accept(rng, log_w_new, log_w):
        return proposal, log_w_new
    return theta, log_w


def _propose_rmh(layout, theta, rw_scale, rng, half_widths=None):
    """Component-wise random-walk proposal.

    Continuous components move by Gaussian noise (scaled per dimension by
    ``half_widths`` when given); simplex components get symmetric log-space
    jitter followed by renormalization, with the Jacobian folded into the
    returned correction; each discrete component is redrawn from its prior
    with probability 1/dim. Returns ``(theta_new, log_q_correction)`` where
    the correction is log q(theta|theta') - log q(theta'|theta).
    """
    new = {}
    log_q = 0.0
    p_disc = 1.0 / layout.dim
    for c in layout.components:
        v = theta[c.name]
        if c.is_discrete:
            if rng.random() < p_disc:
                nv = c.prior.sample(rng)
                log_q += c.prior.log_density(int(v)) - c.prior.log_density(int(nv))
                new[c.name] = nv
            else:
                new[c.name] = v
        elif c.is_simplex:
            vv = np.asarray(v, dtype=float)
            z = np.log(np.maximum(vv, 1e-300)) + rng.normal(0.0, rw_scale, c.size)
            z -= np.max(z)
            nv = np.exp(z)
            nv /= np.sum(nv)
            log_q += float(np.sum(np.log(np.maximum(nv, 1e-300)))
                           - np.sum(np.log(np.maximum(vv, 1e-300))))
            new[c.name] = nv
        else:
            scale = (half_widths[c.offset:c.offset + c.size]
                     if half_widths is not None else np.ones(c.size))
            noise = rng.normal(0.0, rw_scale, c.size) * scale
            if c.size == 1:
                new[c.name] = float(v) + float(noise[0])
            else:
                new[c.name] = np.asarray(v, dtype=float) + noise
    return new, log_q


def rmh_step(current, model, eval_fn, rw_scale, rng, layout=None, half_widths=None):
    """One random-walk MH step on theta, corrected against exp(eval) times prior.

    ``half_widths`` rescale the per-dimension step so ``rw_scale`` is
    interpreted in a scaled space; by default steps are in raw units.
    """
    if not rw_scale > 0.0:
        raise ParameterError("rw_scale must be > 0")
    theta, log_w = current
    if layout is None:
        layout = ThetaLayout.from_model(model, rng)
    proposal, log_q = _propose_rmh(layout, theta, rw_scale, rng, half_widths)
    lp_new = score_theta_prior(model, proposal, rng)
    if lp_new == NEG_INF:
        return theta, log_w
    lp_cur = score_theta_prior(model, theta, rng)
    log_w_new = eval_fn(proposal)
    if log_w_new == NEG_INF and log_w == NEG_INF:
        # Target weight uninformative on both sides: fall back to a
        # prior-driven move so chains can escape zero-weight regions.
        if _accept(rng, lp_new, lp_cur, log_q):
            return proposal, log_w_new
        return theta, log_w
    if _accept(rng, log_w_new + lp_new, log_w + lp_cur, log_q):
        return proposal, log_w_new
    return theta, log_w


# ---------------------------------------------------------------------------
# Annealed importance sampling maximization of an acquisition weight
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AnnealingSchedule:
    """Temperature ladder for acquisition maximization."""

    betas: tuple
    steps_per_beta: int = 3
    rw_scale: float = 0.2

    def __post_init__(self):
        betas = tuple(float(b) for b in self.betas)
        object.__setattr__(self, "betas", betas)
        if not betas or betas[-1] != 1.0:
            raise ParameterError("schedule must end at beta = 1")
        if any(b <= 0.0 or b > 1.0 for b in betas):
            raise ParameterError("betas must lie in (0, 1]")
        if any(b2 <= b1 for b1, b2 in zip(betas, betas[1:])):
            raise ParameterError("betas must be strictly increasing")
        if self.steps_per_beta < 1:
            raise ParameterError("steps_per_beta must be >= 1")
        if not self.rw_scale > 0.0:
            raise ParameterError("rw_scale must be > 0")

    @classmethod
    def default(cls, n_betas=20, beta_min=1e-3, steps_per_beta=3, rw_scale=0.2):
        return cls(betas=tuple(np.geomspace(beta_min, 1.0, n_betas)),
                   steps_per_beta=steps_per_beta, rw_scale=rw_scale)


def _log_zeta(zeta, theta):
    value = float(zeta(theta))
    if math.isnan(value) or value < 0.0:
        raise ContractError(f"acquisition weight must be >= 0, got {value}")
    return math.log(value) if value > 0.0 else NEG_INF


def ais_maximize(model, zeta, schedule=None, n_chains=8, rng=None,
                 layout=None, half_widths=None, zeta_batch=None):
    """Annealed random-walk search for the maximizer of a nonnegative weight.

    Chains start from prior draws and anneal toward prior times zeta, so every
    visited state satisfies the model's implicit constraints by construction.
    Returns the theta with the largest weight among all visited chain states.
    """
    if schedule is None:
        schedule = AnnealingSchedule.default()
    if rng is None:
        rng = np.random.default_rng()
    if layout is None:
        layout = ThetaLayout.from_model(model, rng)

    def batch_log_zeta(thetas):
        if zeta_batch is not None:
            vals = np.asarray(zeta_batch(thetas), dtype=float)
            if np.any(np.isnan(vals)) or np.any(vals < 0.0):
                raise ContractError("acquisition weights must be >= 0")
            with np.errstate(divide="ignore"):
                return np.log(vals)
        return np.array([_log_zeta(zeta, t) for t in thetas])

    states = []
    for _ in range(n_chains):
        run = run_prior(model, rng)
        states.append([run.theta, run.theta_log_prior])
    log_zetas = batch_log_zeta([s[0] for s in states])

    best_theta = states[0][0]
    best_lz = NEG_INF
    for s, lz in zip(states, log_zetas):
        if lz > best_lz:
            best_lz = lz
            best_theta = s[0]

    for beta in schedule.betas:
        for _ in range(schedule.steps_per_beta):
            proposals = []
            corrections = []
            priors = []
            for theta, _ in states:
                prop, log_q = _propose_rmh(layout, theta, schedule.rw_scale,
                                           rng, half_widths)
                proposals.append(prop)
                corrections.append(log_q)
                priors.append(score_theta_prior(model, prop, rng))
            # zeta is only guaranteed total on prior-valid points
            valid = [i for i in range(n_chains) if priors[i] != NEG_INF]
            prop_lz = np.full(n_chains, NEG_INF)
            if valid:
                prop_lz[valid] = batch_log_zeta([proposals[i] for i in valid])
            for i in range(n_chains):
                lp_new = priors[i]
                if lp_new == NEG_INF:
                    continue
                lz_cur = log_zetas[i]
                lp_cur = states[i][1]
                lz_new = prop_lz[i]
                if lz_new == NEG_INF and lz_cur == NEG_INF:
                    ok = _accept(rng, lp_new, lp_cur, corrections[i])
                else:
                    ok = _accept(rng, beta * lz_new + lp_new,
                                 beta * lz_cur + lp_cur, corrections[i])
                if ok:
                    states[i][0] = proposals[i]
                    states[i][1] = lp_new
                    log_zetas[i] = lz_new
                    if lz_new > best_lz:
                        best_lz = lz_new
                        best_theta = proposals[i]
    return best_theta


# ---------------------------------------------------------------------------
# Particle marginal Metropolis-Hastings baseline
# ---------------------------------------------------------------------------

def pmmh(model, n_iters, n_particles, kernel="lmh", rw_scale=0.2, rng=None,
         resample=True, layout=None, half_widths=None):
    """MH chain over theta driven by SMC evidence estimates.

    The stored evidence of the retained state is never re-estimated; each
    chain entry is ``(theta, log_z)``. ``kernel`` selects prior proposals
    ("lmh") or component-wise random walks ("rmh").
    """
    if n_iters < 1:
        raise ContractError("n_iters must be >= 1")
    if kernel not in ("lmh", "rmh"):
        raise ContractError(f"unknown kernel {kernel!r}")
    if rng is None:
        rng = np.random.default_rng()
    if kernel == "rmh" and layout is None:
        layout = ThetaLayout.from_model(model, rng)

    init = run_prior(model, rng)
    theta = init.theta
    lp = init.theta_log_prior
    log_z = smc_marginal(model, theta, n_particles, resample, rng).log_z
    chain = [(theta, log_z)]

    for _ in range(n_iters - 1):
        if kernel == "lmh":
            prop_run = run_prior(model, rng)
            proposal, lp_new = prop_run.theta, prop_run.theta_log_prior
            # Prior proposal: correction cancels the prior terms inside log_z.
            log_q = lp - lp_new
        else:
            proposal, log_q = _propose_rmh(layout, theta, rw_scale, rng, half_widths)
            lp_new = score_theta_prior(model, proposal, rng)
        if lp_new == NEG_INF:
            chain.append((theta, log_z))
            continue
        log_z_new = smc_marginal(model, proposal, n_particles, resample, rng).log_z
        if _accept(rng, log_z_new, log_z, log_q):
            theta, log_z, lp = proposal, log_z_new, lp_new
        chain.append((theta, log_z))
    return chain
