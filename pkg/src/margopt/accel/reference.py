"""Pure-numpy implementations of the hot numeric kernels.

Mirrors ``margopt.accel.jit`` exactly; used when numba is unavailable or
disabled via ``MARGOPT_DISABLE_NUMBA``. Hyperparameter vectors are laid out as
``[log_sn, log_s32, log_s52, log_rho_1..D, log_varrho_1..D]``.
"""

import math

import numpy as np

SQRT3 = math.sqrt(3.0)
SQRT5 = math.sqrt(5.0)
_LOG_2PI = math.log(2.0 * math.pi)


def _scaled_sqdists(A, B, log_scales):
    """Per-dimension squared scaled differences, shape (D, ma, mb)."""
    inv = np.exp(-np.asarray(log_scales))
    diff = (A[:, None, :] - B[None, :, :]) * inv[None, None, :]
    return np.moveaxis(diff * diff, 2, 0)


def matern_cross(A, B, log_hp):
    """Matern-3/2 + Matern-5/2 ARD kernel matrix between point sets A and B."""
    D = A.shape[1]
    s32 = math.exp(2.0 * log_hp[1])
    s52 = math.exp(2.0 * log_hp[2])
    d32 = np.sqrt(np.sum(_scaled_sqdists(A, B, log_hp[3:3 + D]), axis=0))
    d52 = np.sqrt(np.sum(_scaled_sqdists(A, B, log_hp[3 + D:3 + 2 * D]), axis=0))
    k32 = s32 * (1.0 + SQRT3 * d32) * np.exp(-SQRT3 * d32)
    k52 = s52 * (1.0 + SQRT5 * d52 + (5.0 / 3.0) * d52 * d52) * np.exp(-SQRT5 * d52)
    return k32 + k52


def matern_gram(X, log_hp):
    """Symmetric kernel matrix of one point set (no noise term)."""
    K = matern_cross(X, X, log_hp)
    return 0.5 * (K + K.T)


def lml_value_grad(X, resid, log_hp, jitter):
    """Gaussian log marginal likelihood and its gradient in log-hyperparameters.

    Returns ``(ok, value, grad)``; ``ok`` is False when the Cholesky
    factorization of ``K + (sn^2 + jitter) I`` fails.
    """
    m, D = X.shape
    P = 3 + 2 * D
    sn2 = math.exp(2.0 * log_hp[0])
    s32 = math.exp(2.0 * log_hp[1])
    s52 = math.exp(2.0 * log_hp[2])

    S32 = _scaled_sqdists(X, X, log_hp[3:3 + D])
    S52 = _scaled_sqdists(X, X, log_hp[3 + D:3 + 2 * D])
    d32 = np.sqrt(np.sum(S32, axis=0))
    d52 = np.sqrt(np.sum(S52, axis=0))
    E32 = np.exp(-SQRT3 * d32)
    E52 = np.exp(-SQRT5 * d52)
    K32 = s32 * (1.0 + SQRT3 * d32) * E32
    K52 = s52 * (1.0 + SQRT5 * d52 + (5.0 / 3.0) * d52 * d52) * E52
    K = K32 + K52 + (sn2 + jitter) * np.eye(m)

    try:
        L = np.linalg.cholesky(K)
    except np.linalg.LinAlgError:
        return False, 0.0, np.zeros(P)

    alpha = np.linalg.solve(K, resid)
    value = (-0.5 * float(resid @ alpha)
             - float(np.sum(np.log(np.diag(L))))
             - 0.5 * m * _LOG_2PI)

    Linv = np.linalg.inv(L)
    Kinv = Linv.T @ Linv
    M = np.outer(alpha, alpha) - Kinv

    grad = np.empty(P)
    grad[0] = sn2 * float(np.trace(M))
    grad[1] = float(np.sum(M * K32))
    grad[2] = float(np.sum(M * K52))
    for i in range(D):
        grad[3 + i] = 1.5 * s32 * float(np.sum(M * (S32[i] * E32)))
        grad[3 + D + i] = (5.0 / 6.0) * s52 * float(
            np.sum(M * (S52[i] * (1.0 + SQRT5 * d52) * E52)))
    return True, value, grad


def predict_meanvar(Xq, X, L, kinv_resid, log_hp):
    """Posterior mean contribution and latent variance at query points.

    The caller adds the prior mean at the queries; variance excludes the
    observation-noise term and is clamped at zero.
    """
    s32 = math.exp(2.0 * log_hp[1])
    s52 = math.exp(2.0 * log_hp[2])
    kqq = s32 + s52
    if X.shape[0] == 0:
        mq = Xq.shape[0]
        return np.zeros(mq), np.full(mq, kqq)
    Kqx = matern_cross(Xq, X, log_hp)
    mu = Kqx @ kinv_resid
    V = np.linalg.solve(L, Kqx.T)
    var = np.maximum(kqq - np.sum(V * V, axis=0), 0.0)
    return mu, var


def mixture_ei(Xq, X, Ls, kinv_resids, log_hps, mean_q, u_star):
    """Expected improvement averaged over a mixture of GP components."""
    N = Ls.shape[0]
    mq = Xq.shape[0]
    ei = np.zeros(mq)
    for i in range(N):
        mu_c, var = predict_meanvar(Xq, X, Ls[i], kinv_resids[i], log_hps[i])
        mu = mean_q + mu_c
        sigma = np.sqrt(var)
        delta = mu - u_star
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            gamma = np.where(sigma > 1e-15, delta / np.maximum(sigma, 1e-300), 0.0)
            pdf = np.exp(-0.5 * gamma * gamma) / math.sqrt(2.0 * math.pi)
            cdf = 0.5 * np.vectorize(math.erfc)(-gamma / math.sqrt(2.0))
        val = np.where(sigma > 1e-15, delta * cdf + sigma * pdf, np.maximum(delta, 0.0))
        ei += val
    return np.maximum(ei / N, 0.0)


def systematic_resample(weights, u0):
    """Systematic resampling: ancestor indices for normalized weights."""
    n = weights.shape[0]
    positions = (np.arange(n) + u0) / n
    cum = np.cumsum(weights)
    cum[-1] = max(cum[-1], 1.0)
    return np.searchsorted(cum, positions, side="left").astype(np.int64)


def iso_normal_logpdf(y, mu, sigma):
    """Log density of an isotropic normal at y."""
    d = y - mu
    k = d.shape[0]
    return float(-0.5 * (d @ d) / (sigma * sigma) - k * math.log(sigma) - 0.5 * k * _LOG_2PI)


def diag_normal_logpdf(y, mu, sigmas):
    """Log density of a diagonal-covariance normal at y."""
    z = (y - mu) / sigmas
    return float(-0.5 * (z @ z) - np.sum(np.log(sigmas)) - 0.5 * z.shape[0] * _LOG_2PI)


def pickover_trajectory(x1, beta, eta, T):
    """Iterate the attractor map for T steps; row 0 is the start state."""
    out = np.empty((T, 3))
    out[0] = x1
    a, b, c = float(x1[0]), float(x1[1]), float(x1[2])
    for t in range(1, T):
        a, b, c = (math.sin(beta * b) - math.cos(2.5 * a) * c,
                   -math.sin(1.5 * a) * c - math.cos(eta * b),
                   math.sin(a))
        out[t, 0] = a
        out[t, 1] = b
        out[t, 2] = c
    return out
