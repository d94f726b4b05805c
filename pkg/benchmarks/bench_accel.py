"""Timing comparison of the numba kernels against the numpy reference path.

Runs each hot kernel on representative problem sizes with both backends and
prints a table of per-call times and speedups. The backends are imported
directly, so this works regardless of MARGOPT_DISABLE_NUMBA.

Usage: python benchmarks/bench_accel.py [--repeats 200]
"""

import argparse
import time

import numpy as np

from margopt.accel import jit as jit_mod
from margopt.accel import reference as ref
from margopt.gp import sample_hyperprior


def _time(fn, args, repeats):
    fn(*args)  # warmup / compile
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn(*args)
    return (time.perf_counter() - t0) / repeats


def _cases(rng):
    for m, D in ((25, 1), (55, 2), (105, 2)):
        X = rng.uniform(-1, 1, (m, D))
        hp = sample_hyperprior(D, rng).log_values
        K = ref.matern_gram(X, hp) + (np.exp(2 * hp[0]) + 1e-8) * np.eye(m)
        L = np.linalg.cholesky(K)
        resid = L @ rng.standard_normal(m)
        kr = np.linalg.solve(K, resid)
        yield f"matern_gram m={m} D={D}", "matern_gram", (X, hp)
        yield f"lml_value_grad m={m} D={D}", "lml_value_grad", (X, resid, hp, 1e-10)
        Xq = rng.uniform(-1, 1, (8, D))
        N = 10
        Ls = np.stack([L] * N)
        krs = np.stack([kr] * N)
        hps = np.stack([hp] * N)
        mean_q = np.zeros(8)
        yield (f"mixture_ei m={m} N={N} q=8", "mixture_ei",
               (Xq, X, Ls, krs, hps, mean_q, 0.5))

    w = rng.random(200)
    w /= w.sum()
    yield "systematic_resample n=200", "systematic_resample", (w, 0.37)
    y = rng.normal(0, 1, 20)
    mu = rng.normal(0, 1, 20)
    yield "iso_normal_logpdf k=20", "iso_normal_logpdf", (y, mu, 0.2)
    x1 = np.array([-0.2149, -0.0177, 0.7630])
    yield "pickover_trajectory T=500", "pickover_trajectory", (x1, -2.3, 1.25, 500)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=200)
    args = parser.parse_args()
    rng = np.random.default_rng(0)

    rows = []
    for label, name, call_args in _cases(rng):
        t_ref = _time(getattr(ref, name), call_args, args.repeats)
        t_jit = _time(getattr(jit_mod, name), call_args, args.repeats)
        rows.append((label, t_ref * 1e6, t_jit * 1e6, t_ref / t_jit))

    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  {'numpy (us)':>12}  {'numba (us)':>12}  {'speedup':>8}")
    for label, t_ref, t_jit, speedup in rows:
        print(f"{label:<{width}}  {t_ref:12.1f}  {t_jit:12.1f}  {speedup:8.1f}x")


if __name__ == "__main__":
    main()
