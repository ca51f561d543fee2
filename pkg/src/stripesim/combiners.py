"""Uplink receivers: MRC partial sums, centralized LMMSE, sequential chain."""

from __future__ import annotations

import numpy as np

from . import _kernels


def uc_select(gains: np.ndarray, uc_fraction: float) -> np.ndarray:
    """User-centric serving mask from large-scale gains.

    gains : (L, K).  Each user is served by the ceil(uc_fraction * L) APs
    with the largest gain toward it; ties go to the lower AP index.
    Returns a (K, L) boolean mask.
    """
    L, K = gains.shape
    n_serve = int(np.ceil(uc_fraction * L))
    order = np.argsort(-gains.T, axis=1, kind="stable")
    serve = np.zeros((K, L), dtype=bool)
    rows = np.repeat(np.arange(K), n_serve)
    serve[rows, order[:, :n_serve].ravel()] = True
    return serve


def mrc_combine(h_hat: np.ndarray, Y: np.ndarray,
                serve: np.ndarray | None = None) -> np.ndarray:
    """Matched-filter streams accumulated AP by AP over the fronthaul.

    h_hat : (K, L, N) channel estimates, Y : (L, N, T) receive blocks,
    serve : optional (K, L) bool mask of serving APs.  Returns the (K, T)
    sums s_k = sum_{l in serve(k)} h_hat_{k,l}^H y_l; each AP only adds its
    own term, so the fronthaul carries K streams regardless of L.
    """
    if serve is None:
        return np.einsum("kln,lnt->kt", np.conj(h_hat), Y)
    hm = np.where(serve[:, :, None], h_hat, 0.0)
    return np.einsum("kln,lnt->kt", np.conj(hm), Y)


def lmmse_combiners(h_hat: np.ndarray, C_err: np.ndarray, p: np.ndarray,
                    sigma2: float, serve: np.ndarray | None = None,
                    R: np.ndarray | None = None) -> np.ndarray:
    """Centralized per-user LMMSE combining vectors, (M, K).

    h_hat : (K, L, N) estimates, C_err : (K, L, N, N) estimation-error
    covariances (R - Gamma), p : (K,), serve : optional (K, L) mask,
    R : (K, L, N, N) channel covariances (required with a mask).  User k's
    vector solves

        (sum_{i != k} p_i (h_hat_i h_hat_i^H + C_i) + sigma2 I) v_k = h_hat_k

    restricted to the antennas of k's serving APs, zero elsewhere.  Under
    a mask the available channel knowledge is restricted the same way the
    estimation work is counted: AP l only estimates the users it serves,
    so for a non-served pair (i, l) the interferer's estimate is absent
    and its full covariance R_{i,l} replaces h_hat h_hat^H + C_i there.
    """
    K, L, N = h_hat.shape
    H = h_hat.transpose(1, 2, 0).reshape(L * N, K)
    if serve is None:
        serve = np.ones((K, L), dtype=bool)
        D = C_err
    else:
        if R is None:
            raise ValueError("spatial covariances R are required with a "
                             "serving mask")
        H = H * np.repeat(serve, N, axis=1).T
        D = np.where(serve[:, :, None, None], C_err, R)
    c_sum = np.einsum("k,klnm->lnm", p, D)
    return _kernels.lmmse_combiner_solves(H, C_err, c_sum, p, sigma2,
                                          np.ascontiguousarray(serve), N)


def apply_combiners(V: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """(K, T) soft estimates V^H y for stacked receive blocks Y : (L, N, T)."""
    M = V.shape[0]
    return V.conj().T @ Y.reshape(M, -1)


def lmmse_receive_forms(H: np.ndarray, Y: np.ndarray, sigma2: float):
    """Two algebraically equal joint-LMMSE receivers for x with y = H x + n.

    H : (M, K), Y : (M, T).  Returns (X_m, X_k):
    X_m = H^H (H H^H + sigma2 I_M)^{-1} Y   (M-sized solve)
    X_k = (H^H H + sigma2 I_K)^{-1} H^H Y   (K-sized solve)
    The push-through identity makes them equal up to conditioning.
    """
    M, K = H.shape
    Am = H @ H.conj().T + sigma2 * np.eye(M)
    X_m = H.conj().T @ np.linalg.solve(Am, Y)
    Ak = H.conj().T @ H + sigma2 * np.eye(K)
    X_k = np.linalg.solve(Ak, H.conj().T @ Y)
    return X_m, X_k


def nlmmse_receive(h_hat: np.ndarray, Y: np.ndarray, p: np.ndarray,
                   sigma2: float, serve: np.ndarray | None = None
                   ) -> np.ndarray:
    """Sequential normalized-LMMSE processing along the stripe.

    Each AP refines each incoming soft stream from its N antennas plus
    that one stream ((N+1)-dimensional solves per user), tracking the
    stream's effective-channel row toward all users, then renormalizes
    refreshed streams to noise power sigma2 before forwarding (the last
    AP skips the normalization so a single-AP chain equals the
    centralized receiver).  Returns (K, T) soft estimates of the
    unit-variance symbols; the sqrt(p) transmit gains live inside the
    effective channels, so no output rescale is needed.
    """
    K, L, N = h_hat.shape
    h_eff = (np.sqrt(p)[:, None, None] * h_hat).transpose(1, 2, 0)
    if serve is None:
        serve_lk = np.ones((L, K), dtype=bool)
    else:
        serve_lk = np.ascontiguousarray(serve.T)
    return _kernels.nlmmse_chain(np.ascontiguousarray(h_eff),
                                 np.ascontiguousarray(Y), serve_lk, sigma2)


def instantaneous_sinr(V: np.ndarray, H_true: np.ndarray, p: np.ndarray,
                       sigma2: float) -> np.ndarray:
    """Per-user SINR of explicit combiners against the true channel.

    V : (M, K) combining vectors, H_true : (M, K) true channels, p : (K,).
    SINR_k = p_k |v_k^H h_k|^2 /
             (sum_{i != k} p_i |v_k^H h_i|^2 + sigma2 ||v_k||^2).
    """
    G = V.conj().T @ H_true                  # (K, K) cross gains
    num = p[None, :] * np.abs(G) ** 2        # row k: towards each user i
    sig = np.diag(num).copy()
    interf = num.sum(axis=1) - sig
    noise = sigma2 * np.sum(np.abs(V) ** 2, axis=0)
    den = interf + noise
    safe = sig / np.where(den > 0.0, den, 1.0)
    # zero combiner -> 0; perfect noiseless separation -> infinite SINR
    return np.where(den > 0.0, safe, np.where(sig > 0.0, np.inf, 0.0))
