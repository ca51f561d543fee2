"""Microbenchmarks for the hot kernels, numpy backend vs numba backend.

Runs each kernel on system-scale inputs (24 APs x 4 antennas, 24 users,
216-sample data blocks) and prints median wall time per call for both
implementations.  The numba timings exclude compilation: each jitted
kernel is called once to warm the cache before measurement.

Usage: python3 benchmarks/bench_kernels.py [--repeats R]
"""

import argparse
import statistics
import time

import numpy as np

from stripesim import _kernels


def _psd_blocks(rng, *shape):
    n = shape[-1]
    B = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return B @ B.conj().swapaxes(-1, -2) / n


def make_inputs(rng):
    L, N, K, T = 24, 4, 24, 216
    M = L * N
    theta = rng.uniform(-np.pi / 2, np.pi / 2, size=L * K)
    h_hat = (rng.standard_normal((M, K))
             + 1j * rng.standard_normal((M, K))) * 1e-4
    c_err = _psd_blocks(rng, K, L, N, N) * 1e-9
    c_sum = np.sum(0.05 * c_err, axis=0)
    p = np.full(K, 0.05)
    sigma2 = 6.3e-13
    serve_full = np.ones((K, L), dtype=bool)
    serve_uc = np.zeros((K, L), dtype=bool)
    for k in range(K):
        serve_uc[k, rng.permutation(L)[:6]] = True
    h_eff = (rng.standard_normal((L, N, K))
             + 1j * rng.standard_normal((L, N, K))) * 1e-4
    x = np.einsum("lnk,kt->lnt", h_eff,
                  rng.standard_normal((K, T)) + 1j * rng.standard_normal((K, T)))
    x += (rng.standard_normal((L, N, T))
          + 1j * rng.standard_normal((L, N, T))) * np.sqrt(sigma2 / 2)
    return {
        "scattering (576 angles)": lambda: _kernels.scattering_integrals(
            theta, np.deg2rad(15.0), N),
        "lmmse solves (all APs)": lambda: _kernels.lmmse_combiner_solves(
            h_hat, c_err, c_sum, p, sigma2, serve_full, N),
        "lmmse solves (6/24 APs)": lambda: _kernels.lmmse_combiner_solves(
            h_hat, c_err, c_sum, p, sigma2, serve_uc, N),
        "sequential chain (T=216)": lambda: _kernels.nlmmse_chain(
            h_eff, x, serve_full.T.copy(), sigma2),
    }


def time_call(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    rng = np.random.default_rng(2024)
    cases = make_inputs(rng)

    if not _kernels.HAVE_NUMBA:
        print("numba not importable; timing the numpy backend only")

    rows = []
    for name, fn in cases.items():
        _kernels.USE_NUMBA = False
        fn()
        t_np = time_call(fn, args.repeats)
        t_nb = None
        if _kernels.HAVE_NUMBA:
            _kernels.USE_NUMBA = True
            fn()                      # warm the jit cache
            t_nb = time_call(fn, args.repeats)
            _kernels.USE_NUMBA = False
        rows.append((name, t_np, t_nb))

    print("%-26s %12s %12s %9s"
          % ("kernel", "numpy [ms]", "numba [ms]", "speedup"))
    for name, t_np, t_nb in rows:
        if t_nb is None:
            print("%-26s %12.3f %12s %9s" % (name, 1e3 * t_np, "-", "-"))
        else:
            print("%-26s %12.3f %12.3f %8.1fx"
                  % (name, 1e3 * t_np, 1e3 * t_nb, t_np / t_nb))


if __name__ == "__main__":
    main()
