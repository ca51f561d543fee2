"""Linear MMSE channel estimation from pilot observations."""

from __future__ import annotations

import numpy as np


def estimation_matrices(R: np.ndarray, assignment: np.ndarray,
                        p: np.ndarray, tau_p: int, sigma2: float):
    """Per-(user, AP) estimator inputs.

    R : (K, L, N, N) channel covariances, assignment : (K,) pilot indices,
    p : (K,) powers.  Returns (W, Gamma):

    W     : (K, L, N, N) with W_{k,l} = sqrt(p_k) R_{k,l} Q_{t_k,l}^{-1},
            where Q_{t,l} = tau_p * sum_{i: t_i = t} p_i R_{i,l} + sigma2 I
            is the covariance of the despread pilot observation;
    Gamma : (K, L, N, N) covariance of the estimate,
            Gamma_{k,l} = tau_p p_k R_{k,l} Q_{t_k,l}^{-1} R_{k,l}.

    Gamma and R - Gamma are PSD by construction (hermitized against
    roundoff).  The estimate itself is h_hat_{k,l} = W_{k,l} z, with z the
    despread observation Z_l conj(phi_{t_k}).
    """
    K, L, N, _ = R.shape
    Q = np.zeros((tau_p, L, N, N), dtype=np.complex128)
    for i in range(K):
        Q[assignment[i]] += tau_p * p[i] * R[i]
    Q[:, :, np.arange(N), np.arange(N)] += sigma2
    Qk = Q[assignment]                       # (K, L, N, N)
    # solve Q X = R  =>  X = Q^{-1} R; W = sqrt(p) R Q^{-1} = sqrt(p) X^H
    # (Q and R are Hermitian, and R Q^{-1} = (Q^{-1} R)^H).
    X = np.linalg.solve(Qk, R)
    W = np.sqrt(p)[:, None, None, None] * np.conj(np.swapaxes(X, -1, -2))
    Gamma = tau_p * np.sqrt(p)[:, None, None, None] * (W @ R)
    Gamma = 0.5 * (Gamma + np.conj(np.swapaxes(Gamma, -1, -2)))
    return W, Gamma


def estimate_channels(Z: np.ndarray, W: np.ndarray, pilots: np.ndarray,
                      assignment: np.ndarray) -> np.ndarray:
    """LMMSE channel estimates h_hat : (K, L, N).

    Z : (L, N, tau_p) pilot receive blocks, W : (K, L, N, N) estimator
    matrices, pilots : (tau_p, tau_p), assignment : (K,).
    """
    phi = np.conj(pilots[assignment])        # (K, tau_p)
    z = np.einsum("lnt,kt->kln", Z, phi)     # despread per user
    return np.einsum("klnm,klm->kln", W, z)
