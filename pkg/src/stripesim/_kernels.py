"""Hot numeric kernels with numba and pure-numpy implementations.

The backend is chosen once at import time from the STRIPESIM_NUMBA
environment variable: "0" forces the numpy path, "1" requires numba,
anything else (default) uses numba when importable.  Both paths implement
the same math; they agree to floating-point reassociation error and are
parity-tested.  `benchmarks/bench_kernels.py` compares their speed.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn
        if args and callable(args[0]):
            return args[0]
        return wrap


_flag = os.environ.get("STRIPESIM_NUMBA", "auto").strip().lower()
if _flag in ("0", "false", "off", "no"):
    USE_NUMBA = False
elif _flag in ("1", "true", "on", "yes"):
    if not HAVE_NUMBA:
        raise ImportError("STRIPESIM_NUMBA=1 but numba is not importable")
    USE_NUMBA = True
else:
    USE_NUMBA = HAVE_NUMBA


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"


# ----------------------------------------------------------------------
# Laplace local-scattering quadrature
# ----------------------------------------------------------------------

# Gauss-Legendre node counts per half-interval; escalation stops at the
# first level whose result agrees with the previous one within tolerance.
QUAD_LEVELS = (32, 64, 128, 256, 512)
_GL_CACHE = {n: np.polynomial.legendre.leggauss(n) for n in QUAD_LEVELS}


def _quad_grids(spread: float):
    """Per-level (delta, weight*pdf) grids for the truncated Laplace density.

    The density exp(-sqrt(2)|d|/spread) has a kink at 0, so each level
    integrates [-5*spread, 0] and [0, 5*spread] separately.  Weights are
    normalized so that sum(w) == 1 exactly, which pins the zero-offset
    integral (and hence trace(R)/N) to the large-scale gain.
    """
    half = 5.0 * spread
    deltas, weights = [], []
    for n in QUAD_LEVELS:
        t, w = _GL_CACHE[n]
        lo = 0.5 * half * (t - 1.0)          # [-half, 0]
        hi = 0.5 * half * (t + 1.0)          # [0, half]
        d = np.concatenate([lo, hi])
        wq = np.concatenate([w, w]) * (0.5 * half)
        wf = wq * np.exp(-np.sqrt(2.0) * np.abs(d) / spread)
        wf /= wf.sum()
        deltas.append(d)
        weights.append(wf)
    return deltas, weights


def _scattering_numpy(theta, deltas, weights, n_ant, tol):
    P = theta.shape[0]
    r = np.zeros((P, n_ant), dtype=np.complex128)
    err = np.full(P, np.inf)
    pending = np.ones(P, dtype=bool)
    prev = None
    for lvl, (d, wf) in enumerate(zip(deltas, weights)):
        idx = np.flatnonzero(pending)
        if idx.size == 0:
            break
        ex = np.exp(1j * np.pi * np.sin(theta[idx, None] + d[None, :]))
        cur = np.ones_like(ex)
        r_lvl = np.empty((idx.size, n_ant), dtype=np.complex128)
        r_lvl[:, 0] = 1.0
        for m in range(1, n_ant):
            cur = cur * ex
            r_lvl[:, m] = cur @ wf
        if lvl == 0:
            prev = r_lvl
            r[idx] = r_lvl
            continue
        diff = np.abs(r_lvl - prev).max(axis=1) if n_ant > 1 else np.zeros(idx.size)
        r[idx] = r_lvl
        err[idx] = diff
        done = diff <= tol
        pending[idx[done]] = False
        prev = r_lvl[~done]
    if n_ant == 1:
        err[:] = 0.0
    return r, err


@njit(cache=True)
def _scattering_numba(theta, delta_flat, weight_flat, level_off, n_ant, tol):
    P = theta.shape[0]
    n_lvl = level_off.shape[0] - 1
    r = np.zeros((P, n_ant), dtype=np.complex128)
    err = np.full(P, np.inf)
    prev = np.zeros(n_ant, dtype=np.complex128)
    cur = np.zeros(n_ant, dtype=np.complex128)
    for pi in range(P):
        th = theta[pi]
        for lvl in range(n_lvl):
            a, b = level_off[lvl], level_off[lvl + 1]
            for m in range(n_ant):
                cur[m] = 0.0
            for q in range(a, b):
                s = np.sin(th + delta_flat[q])
                e = np.exp(1j * np.pi * s)
                w = weight_flat[q]
                acc = w + 0j
                cur[0] += acc
                for m in range(1, n_ant):
                    acc = acc * e
                    cur[m] += acc
            if lvl > 0:
                d = 0.0
                for m in range(n_ant):
                    dm = abs(cur[m] - prev[m])
                    if dm > d:
                        d = dm
                err[pi] = d
                if d <= tol:
                    break
            for m in range(n_ant):
                prev[m] = cur[m]
        for m in range(n_ant):
            r[pi, m] = cur[m]
        if n_ant == 1:
            err[pi] = 0.0
    return r, err


def scattering_integrals(theta, spread, n_ant, tol=1e-8):
    """Array-response integrals under a truncated Laplace angle distribution.

    For each nominal angle theta[p] returns r[p, m] approximating
    E{ exp(1j*pi*m*sin(theta + delta)) } for antenna offsets m = 0..n_ant-1,
    with delta Laplace-distributed (scale spread/sqrt(2), truncated at
    +-5*spread and renormalized).  Also returns the per-angle quadrature
    error estimate; entries above `tol` did not converge.
    """
    theta = np.ascontiguousarray(theta, dtype=np.float64)
    deltas, weights = _quad_grids(float(spread))
    if USE_NUMBA:
        delta_flat = np.concatenate(deltas)
        weight_flat = np.concatenate(weights)
        level_off = np.zeros(len(deltas) + 1, dtype=np.int64)
        np.cumsum([d.size for d in deltas], out=level_off[1:])
        return _scattering_numba(theta, delta_flat, weight_flat, level_off,
                                 n_ant, tol)
    return _scattering_numpy(theta, deltas, weights, n_ant, tol)


# ----------------------------------------------------------------------
# Per-user LMMSE combiner solves (optionally restricted to serving APs)
# ----------------------------------------------------------------------

def _lmmse_combiners_numpy(h_hat, c_err, c_sum, p, sigma2, serve, n_ant):
    M, K = h_hat.shape
    L = serve.shape[1]
    V = np.zeros((M, K), dtype=np.complex128)
    for k in range(K):
        aps = np.flatnonzero(serve[k])
        idx = (aps[:, None] * n_ant + np.arange(n_ant)[None, :]).ravel()
        Hs = h_hat[idx, :]
        A = (Hs * p[None, :]) @ Hs.conj().T
        A -= p[k] * np.outer(Hs[:, k], Hs[:, k].conj())
        for t, l in enumerate(aps):
            blk = slice(t * n_ant, (t + 1) * n_ant)
            A[blk, blk] += c_sum[l] - p[k] * c_err[k, l]
        A[np.diag_indices_from(A)] += sigma2
        v = np.linalg.solve(A, Hs[:, k])
        V[idx, k] = v
    return V


@njit(cache=True)
def _lmmse_combiners_numba(h_hat, c_err, c_sum, p, sigma2, serve, n_ant):
    M, K = h_hat.shape
    L = serve.shape[1]
    V = np.zeros((M, K), dtype=np.complex128)
    for k in range(K):
        na = 0
        for l in range(L):
            if serve[k, l]:
                na += 1
        Mk = na * n_ant
        idx = np.empty(Mk, dtype=np.int64)
        t = 0
        for l in range(L):
            if serve[k, l]:
                for a in range(n_ant):
                    idx[t * n_ant + a] = l * n_ant + a
                t += 1
        Hs = np.empty((Mk, K), dtype=np.complex128)
        for r in range(Mk):
            for c in range(K):
                Hs[r, c] = h_hat[idx[r], c]
        A = np.zeros((Mk, Mk), dtype=np.complex128)
        for i in range(K):
            if i == k:
                continue
            pi = p[i]
            for r in range(Mk):
                hri = Hs[r, i]
                for c in range(Mk):
                    A[r, c] += pi * hri * np.conj(Hs[c, i])
        t = 0
        for l in range(L):
            if not serve[k, l]:
                continue
            base = t * n_ant
            for a in range(n_ant):
                for b in range(n_ant):
                    A[base + a, base + b] += (c_sum[l, a, b]
                                              - p[k] * c_err[k, l, a, b])
            t += 1
        for r in range(Mk):
            A[r, r] += sigma2
        v = np.linalg.solve(A, np.ascontiguousarray(Hs[:, k]))
        for r in range(Mk):
            V[idx[r], k] = v[r]
    return V


def lmmse_combiner_solves(h_hat, c_err, c_sum, p, sigma2, serve, n_ant):
    """Solve the per-user combining systems.

    v_k = (sum_{i != k} p_i (h_i h_i^H + C_i) + sigma2 I)^{-1} h_k restricted
    to the antennas of user k's serving APs (rows given by `serve`), zero
    elsewhere.  `c_err[i, l]` is the NxN estimation-error covariance block of
    user i at AP l and `c_sum[l] = sum_i p_i c_err[i, l]`.
    """
    args = (np.ascontiguousarray(h_hat), np.ascontiguousarray(c_err),
            np.ascontiguousarray(c_sum), np.ascontiguousarray(p, dtype=np.float64),
            float(sigma2), np.ascontiguousarray(serve), n_ant)
    if USE_NUMBA:
        return _lmmse_combiners_numba(*args)
    return _lmmse_combiners_numpy(*args)


# ----------------------------------------------------------------------
# Sequential N-LMMSE chain along the stripe
# ----------------------------------------------------------------------

def _nlmmse_chain_numpy(h_eff, x, serve, sigma2):
    L, N, K = h_eff.shape
    T = x.shape[2]
    S = np.zeros((K, T), dtype=np.complex128)
    G = np.zeros((K, K), dtype=np.complex128)
    eye = sigma2 * np.eye(N + 1)
    for l in range(L):
        act = serve[l]
        if not act.any():
            continue
        Hl = np.where(act[None, :], h_eff[l], 0.0)
        haug = np.empty((K, N + 1, K), dtype=np.complex128)
        haug[:, :N, :] = Hl[None, :, :]
        haug[:, N, :] = G
        C = haug @ haug.conj().transpose(0, 2, 1) + eye[None]
        t = haug[np.arange(K), :, np.arange(K)]            # (K, N+1)
        if sigma2 > 0.0:
            v = np.linalg.solve(C, t[..., None])[..., 0]
        else:
            v = (np.linalg.pinv(C) @ t[..., None])[..., 0]
        vc = v.conj()
        s_new = vc[:, :N] @ x[l] + vc[:, N:] * S
        g_new = np.einsum("kn,knj->kj", vc, haug)
        if l < L - 1 and sigma2 > 0.0:
            nrm = np.sqrt(np.sum(np.abs(v) ** 2, axis=1))
            scale = np.where(nrm > 0.0, 1.0 / np.maximum(nrm, 1e-300), 0.0)
            s_new = s_new * scale[:, None]
            g_new = g_new * scale[:, None]
        S = np.where(act[:, None], s_new, S)
        G = np.where(act[:, None], g_new, G)
    return S


@njit(cache=True)
def _nlmmse_chain_numba(h_eff, x, serve, sigma2):
    L, N, K = h_eff.shape
    T = x.shape[2]
    S = np.zeros((K, T), dtype=np.complex128)
    G = np.zeros((K, K), dtype=np.complex128)
    Hl = np.zeros((N, K), dtype=np.complex128)
    haug = np.zeros((N + 1, K), dtype=np.complex128)
    s_new = np.zeros((K, T), dtype=np.complex128)
    g_new = np.zeros((K, K), dtype=np.complex128)
    for l in range(L):
        n_act = 0
        for k in range(K):
            if serve[l, k]:
                n_act += 1
        if n_act == 0:
            continue
        for k in range(K):
            if serve[l, k]:
                for a in range(N):
                    Hl[a, k] = h_eff[l, a, k]
            else:
                for a in range(N):
                    Hl[a, k] = 0.0
        for k in range(K):
            if not serve[l, k]:
                continue
            for a in range(N):
                for j in range(K):
                    haug[a, j] = Hl[a, j]
            for j in range(K):
                haug[N, j] = G[k, j]
            C = haug @ haug.conj().T
            for a in range(N + 1):
                C[a, a] += sigma2
            t = np.ascontiguousarray(haug[:, k])
            if sigma2 > 0.0:
                v = np.linalg.solve(C, t)
            else:
                v = np.linalg.pinv(C) @ t
            vc = v.conj()
            for c in range(T):
                acc = vc[N] * S[k, c]
                for a in range(N):
                    acc += vc[a] * x[l, a, c]
                s_new[k, c] = acc
            for j in range(K):
                acc = 0.0 + 0j
                for a in range(N + 1):
                    acc += vc[a] * haug[a, j]
                g_new[k, j] = acc
            if l < L - 1 and sigma2 > 0.0:
                nsq = 0.0
                for a in range(N + 1):
                    nsq += abs(v[a]) ** 2
                if nsq > 0.0:
                    sc = 1.0 / np.sqrt(nsq)
                    for c in range(T):
                        s_new[k, c] *= sc
                    for j in range(K):
                        g_new[k, j] *= sc
        for k in range(K):
            if serve[l, k]:
                for c in range(T):
                    S[k, c] = s_new[k, c]
                for j in range(K):
                    G[k, j] = g_new[k, j]
    return S


def nlmmse_chain(h_eff, x, serve, sigma2):
    """Run the sequential per-AP LMMSE pipeline and return the CPU streams.

    Each user stream is refined independently: AP l forms the (N+1)-row
    observation [x_l ; incoming stream k] with model channel
    [h_eff_l ; g_k] (g_k is the stream's tracked effective-channel row),
    solves the per-user LMMSE system, and, except at the last AP, rescales
    the refreshed stream so its noise power is sigma2 again.  APs not
    serving user k (serve[l, k] False) pass that user's stream through
    unchanged and contribute no estimate of user k's channel.
    """
    args = (np.ascontiguousarray(h_eff), np.ascontiguousarray(x),
            np.ascontiguousarray(serve), float(sigma2))
    if USE_NUMBA:
        return _nlmmse_chain_numba(*args)
    return _nlmmse_chain_numpy(*args)
