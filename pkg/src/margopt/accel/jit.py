"""Numba-compiled implementations of the hot numeric kernels.

Same contracts as ``margopt.accel.reference``; factorization failures are
reported through flags instead of exceptions because LAPACK errors cannot be
caught inside nopython code.
"""

import math

import numpy as np
from numba import njit

SQRT3 = math.sqrt(3.0)
SQRT5 = math.sqrt(5.0)
_LOG_2PI = math.log(2.0 * math.pi)


@njit(cache=True)
def _cholesky_flag(A):
    n = A.shape[0]
    L = np.zeros_like(A)
    for j in range(n):
        s = A[j, j]
        for k in range(j):
            s -= L[j, k] * L[j, k]
        if s <= 0.0 or not math.isfinite(s):
            return L, False
        L[j, j] = math.sqrt(s)
        for i in range(j + 1, n):
            t = A[i, j]
            for k in range(j):
                t -= L[i, k] * L[j, k]
            L[i, j] = t / L[j, j]
    return L, True


@njit(cache=True)
def _solve_lower_vec(L, b):
    n = L.shape[0]
    x = np.empty(n)
    for i in range(n):
        s = b[i]
        for k in range(i):
            s -= L[i, k] * x[k]
        x[i] = s / L[i, i]
    return x


@njit(cache=True)
def _solve_upper_vec(L, b):
    # Solves L^T x = b for lower-triangular L.
    n = L.shape[0]
    x = np.empty(n)
    for i in range(n - 1, -1, -1):
        s = b[i]
        for k in range(i + 1, n):
            s -= L[k, i] * x[k]
        x[i] = s / L[i, i]
    return x


@njit(cache=True)
def matern_cross(A, B, log_hp):
    ma, D = A.shape
    mb = B.shape[0]
    s32 = math.exp(2.0 * log_hp[1])
    s52 = math.exp(2.0 * log_hp[2])
    inv_r = np.empty(D)
    inv_v = np.empty(D)
    for i in range(D):
        inv_r[i] = math.exp(-log_hp[3 + i])
        inv_v[i] = math.exp(-log_hp[3 + D + i])
    K = np.empty((ma, mb))
    for j in range(ma):
        for k in range(mb):
            q32 = 0.0
            q52 = 0.0
            for i in range(D):
                d = A[j, i] - B[k, i]
                t = d * inv_r[i]
                q32 += t * t
                t = d * inv_v[i]
                q52 += t * t
            d32 = math.sqrt(q32)
            d52 = math.sqrt(q52)
            K[j, k] = (s32 * (1.0 + SQRT3 * d32) * math.exp(-SQRT3 * d32)
                       + s52 * (1.0 + SQRT5 * d52 + (5.0 / 3.0) * d52 * d52)
                       * math.exp(-SQRT5 * d52))
    return K


@njit(cache=True)
def matern_gram(X, log_hp):
    m = X.shape[0]
    K = matern_cross(X, X, log_hp)
    for j in range(m):
        for k in range(j):
            v = 0.5 * (K[j, k] + K[k, j])
            K[j, k] = v
            K[k, j] = v
    return K


@njit(cache=True)
def lml_value_grad(X, resid, log_hp, jitter):
    m, D = X.shape
    P = 3 + 2 * D
    grad = np.zeros(P)
    sn2 = math.exp(2.0 * log_hp[0])
    s32 = math.exp(2.0 * log_hp[1])
    s52 = math.exp(2.0 * log_hp[2])
    inv_r = np.empty(D)
    inv_v = np.empty(D)
    for i in range(D):
        inv_r[i] = math.exp(-log_hp[3 + i])
        inv_v[i] = math.exp(-log_hp[3 + D + i])

    K = np.empty((m, m))
    K32 = np.empty((m, m))
    K52 = np.empty((m, m))
    D32 = np.empty((m, m))
    D52 = np.empty((m, m))
    E32 = np.empty((m, m))
    E52 = np.empty((m, m))
    for j in range(m):
        for k in range(j + 1):
            q32 = 0.0
            q52 = 0.0
            for i in range(D):
                d = X[j, i] - X[k, i]
                t = d * inv_r[i]
                q32 += t * t
                t = d * inv_v[i]
                q52 += t * t
            d32 = math.sqrt(q32)
            d52 = math.sqrt(q52)
            e32 = math.exp(-SQRT3 * d32)
            e52 = math.exp(-SQRT5 * d52)
            k32 = s32 * (1.0 + SQRT3 * d32) * e32
            k52 = s52 * (1.0 + SQRT5 * d52 + (5.0 / 3.0) * d52 * d52) * e52
            v = k32 + k52
            if j == k:
                v += sn2 + jitter
            K[j, k] = v
            K[k, j] = v
            K32[j, k] = k32
            K32[k, j] = k32
            K52[j, k] = k52
            K52[k, j] = k52
            D32[j, k] = d32
            D32[k, j] = d32
            D52[j, k] = d52
            D52[k, j] = d52
            E32[j, k] = e32
            E32[k, j] = e32
            E52[j, k] = e52
            E52[k, j] = e52

    L, ok = _cholesky_flag(K)
    if not ok:
        return False, 0.0, grad

    alpha = _solve_upper_vec(L, _solve_lower_vec(L, resid))
    value = -0.5 * m * _LOG_2PI
    for j in range(m):
        value -= 0.5 * resid[j] * alpha[j]
        value -= math.log(L[j, j])

    # M = alpha alpha^T - Kinv, with Kinv = Z^T Z for the triangular
    # inverse Z = L^-1 (both lower triangular).
    Z = np.zeros((m, m))
    for j in range(m):
        Z[j, j] = 1.0 / L[j, j]
        for i in range(j + 1, m):
            s = 0.0
            for k in range(j, i):
                s -= L[i, k] * Z[k, j]
            Z[i, j] = s / L[i, i]
    M = np.empty((m, m))
    for j in range(m):
        for k in range(j, m):
            s = 0.0
            for i in range(k, m):
                s += Z[i, j] * Z[i, k]
            v = alpha[j] * alpha[k] - s
            M[j, k] = v
            M[k, j] = v

    g0 = 0.0
    g1 = 0.0
    g2 = 0.0
    for j in range(m):
        g0 += M[j, j]
        g1 += M[j, j] * K32[j, j]
        g2 += M[j, j] * K52[j, j]
        for k in range(j + 1, m):
            g1 += 2.0 * M[j, k] * K32[j, k]
            g2 += 2.0 * M[j, k] * K52[j, k]
    grad[0] = sn2 * g0
    grad[1] = g1
    grad[2] = g2
    for i in range(D):
        gr = 0.0
        gv = 0.0
        for j in range(m):
            for k in range(j + 1, m):
                d = X[j, i] - X[k, i]
                t = d * inv_r[i]
                gr += 2.0 * M[j, k] * t * t * E32[j, k]
                t = d * inv_v[i]
                gv += 2.0 * M[j, k] * t * t * (1.0 + SQRT5 * D52[j, k]) * E52[j, k]
        grad[3 + i] = 1.5 * s32 * gr
        grad[3 + D + i] = (5.0 / 6.0) * s52 * gv
    return True, value, grad


@njit(cache=True)
def predict_meanvar(Xq, X, L, kinv_resid, log_hp):
    mq = Xq.shape[0]
    m = X.shape[0]
    s32 = math.exp(2.0 * log_hp[1])
    s52 = math.exp(2.0 * log_hp[2])
    kqq = s32 + s52
    mu = np.zeros(mq)
    var = np.full(mq, kqq)
    if m == 0:
        return mu, var
    Kqx = matern_cross(Xq, X, log_hp)
    for q in range(mq):
        acc = 0.0
        for j in range(m):
            acc += Kqx[q, j] * kinv_resid[j]
        mu[q] = acc
        v = _solve_lower_vec(L, Kqx[q])
        s = 0.0
        for j in range(m):
            s += v[j] * v[j]
        var[q] = max(kqq - s, 0.0)
    return mu, var


@njit(cache=True)
def mixture_ei(Xq, X, Ls, kinv_resids, log_hps, mean_q, u_star):
    N = Ls.shape[0]
    mq = Xq.shape[0]
    ei = np.zeros(mq)
    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    inv_sqrt2pi = 1.0 / math.sqrt(2.0 * math.pi)
    for i in range(N):
        mu_c, var = predict_meanvar(Xq, X, Ls[i], kinv_resids[i], log_hps[i])
        for q in range(mq):
            mu = mean_q[q] + mu_c[q]
            sigma = math.sqrt(var[q])
            delta = mu - u_star
            if sigma > 1e-15:
                gamma = delta / sigma
                cdf = 0.5 * math.erfc(-gamma * inv_sqrt2)
                pdf = math.exp(-0.5 * gamma * gamma) * inv_sqrt2pi
                ei[q] += delta * cdf + sigma * pdf
            elif delta > 0.0:
                ei[q] += delta
    for q in range(mq):
        ei[q] = max(ei[q] / N, 0.0)
    return ei


@njit(cache=True)
def systematic_resample(weights, u0):
    n = weights.shape[0]
    idx = np.empty(n, dtype=np.int64)
    cum = weights[0]
    i = 0
    for k in range(n):
        p = (k + u0) / n
        while cum < p and i < n - 1:
            i += 1
            cum += weights[i]
        idx[k] = i
    return idx


@njit(cache=True)
def iso_normal_logpdf(y, mu, sigma):
    k = y.shape[0]
    q = 0.0
    for i in range(k):
        d = y[i] - mu[i]
        q += d * d
    return -0.5 * q / (sigma * sigma) - k * math.log(sigma) - 0.5 * k * _LOG_2PI


@njit(cache=True)
def diag_normal_logpdf(y, mu, sigmas):
    k = y.shape[0]
    out = -0.5 * k * _LOG_2PI
    for i in range(k):
        z = (y[i] - mu[i]) / sigmas[i]
        out -= 0.5 * z * z + math.log(sigmas[i])
    return out


@njit(cache=True)
def pickover_trajectory(x1, beta, eta, T):
    out = np.empty((T, 3))
    out[0, 0] = x1[0]
    out[0, 1] = x1[1]
    out[0, 2] = x1[2]
    a = x1[0]
    b = x1[1]
    c = x1[2]
    for t in range(1, T):
        na = math.sin(beta * b) - math.cos(2.5 * a) * c
        nb = -math.sin(1.5 * a) * c - math.cos(eta * b)
        nc = math.sin(a)
        a, b, c = na, nb, nc
        out[t, 0] = a
        out[t, 1] = b
        out[t, 2] = c
    return out
