"""Mixture-model hyperparameter target with collapsed conjugate clusters.

Optimization variables are the assignment concentration alpha and the
inverse-gamma degrees of freedom nu. Each cluster keeps an independent
normal-inverse-gamma posterior per dimension (diagonal covariance), so the
cluster parameters integrate out analytically into Student-t predictive
densities; the assignments themselves are latents marginalized by SMC.
"""

import math

import numpy as np
from scipy.special import gammaln

from ..dists import Discrete, Factor, UniformContinuous
from ..errors import ParameterError
from ..model import ModelProgram, observe, sample


def _log_t_pdf(x, df, loc, scale2):
    z2 = (x - loc) ** 2 / (df * scale2)
    return (gammaln(0.5 * (df + 1.0)) - gammaln(0.5 * df)
            - 0.5 * math.log(df * math.pi * scale2)
            - 0.5 * (df + 1.0) * math.log1p(z2))


class _Cluster:
    """Running per-dimension sufficient statistics of one cluster."""

    __slots__ = ("n", "sums", "sumsqs")

    def __init__(self, d):
        self.n = 0
        self.sums = np.zeros(d)
        self.sumsqs = np.zeros(d)

    def log_predictive(self, row, mu0, kappa0, a0, b0):
        n = self.n
        kappa_n = kappa0 + n
        if n > 0:
            ybar = self.sums / n
            m_n = (kappa0 * mu0 + n * ybar) / kappa_n
            ss = self.sumsqs - n * ybar * ybar
            b_n = b0 + 0.5 * np.maximum(ss, 0.0) \
                + 0.5 * kappa0 * n * (ybar - mu0) ** 2 / kappa_n
            a_n = a0 + 0.5 * n
        else:
            m_n = mu0
            b_n = b0
            a_n = a0
        scale2 = b_n * (kappa_n + 1.0) / (a_n * kappa_n)
        df = 2.0 * a_n
        total = 0.0
        for j in range(row.shape[0]):
            total += _log_t_pdf(float(row[j]), float(df), float(m_n[j]),
                                float(scale2[j]))
        return total

    def absorb(self, row):
        self.n += 1
        self.sums += row
        self.sumsqs += row * row


def make_gmm_model(data, n_components=10, mu0=None, kappa=1.0, psi=None):
    """Evidence target over (alpha, nu) for the collapsed mixture.

    ``nu`` sets the inverse-gamma shape (a0 = nu/2); its prior lower bound is
    d - 1 so the shape stays positive for any data dimension.
    """
    data = np.atleast_2d(np.asarray(data, dtype=float))
    n, d = data.shape
    if n < 1:
        raise ParameterError("need at least one data row")
    mu0 = np.full(d, float(np.mean(data))) if mu0 is None \
        else np.asarray(mu0, dtype=float)
    psi = np.full(d, max(float(np.var(data)), 1e-6)) if psi is None \
        else np.asarray(psi, dtype=float)
    if mu0.shape != (d,) or psi.shape != (d,):
        raise ParameterError("mu0 and psi must have one entry per dimension")
    K = int(n_components)
    factor = Factor()
    alpha_prior = UniformContinuous(0.01, 100.0)
    nu_prior = UniformContinuous(float(d - 1), 100.0)

    def body(_inputs):
        alpha = yield sample(alpha_prior, name="alpha")
        nu = yield sample(nu_prior, name="nu")
        a0 = 0.5 * nu
        b0 = 0.5 * psi
        clusters = [_Cluster(d) for _ in range(K)]
        counts = np.zeros(K)
        for i in range(n):
            probs = (counts + alpha) / (i + K * alpha)
            z = yield sample(Discrete(probs))
            logp = clusters[z].log_predictive(data[i], mu0, kappa, a0, b0)
            yield observe(factor, logp)
            clusters[z].absorb(data[i])
            counts[z] += 1.0
        return counts

    return ModelProgram(body, ("alpha", "nu"), name="gmm")


def synthetic_mixture_data(rng, n=30, d=4):
    """Small well-separated diagonal-Gaussian mixture for tests and demos."""
    centers = np.stack([np.full(d, -2.0), np.zeros(d), np.full(d, 2.5)])
    stds = np.array([0.4, 0.6, 0.5])
    rows = np.empty((n, d))
    for i in range(n):
        k = int(rng.integers(0, centers.shape[0]))
        rows[i] = centers[k] + stds[k] * rng.standard_normal(d)
    return rows


def load_csv(path):
    """Load a dataset CSV: header row, one observation per line."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data


def save_csv(path, data, header=None):
    """Write a dataset CSV in the same layout ``load_csv`` reads."""
    data = np.atleast_2d(np.asarray(data, dtype=float))
    if header is None:
        header = ",".join(f"c{j}" for j in range(data.shape[1]))
    np.savetxt(path, data, delimiter=",", header=header, comments="")
