"""Gram-matrix recovery from matched-filter streams and its LMMSE equalizer.

The CPU only sees the K accumulated matched-filter streams s = G x + H^H n,
where G = H^H H is the user Gram matrix.  Because E{s s^H} = G^2 + sigma2 G,
the Gram matrix can be recovered from the sample second moment of the
streams alone: eigenvalues omega of the moment map to Gram eigenvalues
through omega = lam^2 + sigma2 * lam, and inverting that quadratic per
eigenvalue also yields the equalizer (G + sigma2 I)^{-1} directly.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class GramRecovery:
    """Eigen-domain recovery of the Gram matrix and its equalizer.

    U      : (K, K) eigenvectors of the stream second moment (descending)
    omega  : (K,) moment eigenvalues, clamped at zero
    lam    : (K,) recovered Gram eigenvalues
    mu     : (K,) equalizer eigenvalues, mu = 1 / (lam + sigma2)
    gram   : (K, K) recovered Gram matrix U diag(lam) U^H
    combiner : (K, K) equalizer U diag(mu) U^H
    sigma2 : noise power used in the inversion
    """

    U: np.ndarray
    omega: np.ndarray
    lam: np.ndarray
    mu: np.ndarray
    gram: np.ndarray
    combiner: np.ndarray
    sigma2: float


def stream_second_moment(S: np.ndarray, block_len: int | None = None
                         ) -> np.ndarray:
    """Sample second moment S S^H / T of the (K, T) stream block."""
    T = S.shape[1] if block_len is None else block_len
    return S @ S.conj().T / T


def eigenvalue_roundtrip(lam: np.ndarray, sigma2: float) -> np.ndarray:
    """Map Gram eigenvalues through the moment and back (test utility).

    Computes omega = lam^2 + sigma2 lam and then inverts with the same
    cancellation-free formula used in recovery.
    """
    lam = np.asarray(lam, dtype=np.float64)
    omega = lam * lam + sigma2 * lam
    root = np.sqrt(sigma2 * sigma2 + 4.0 * omega) + sigma2
    return np.divide(2.0 * omega, root, out=np.zeros_like(omega),
                     where=root > 0.0)


def recover_gram(A: np.ndarray, sigma2: float,
                 neg_tol: float = 1e-9) -> GramRecovery:
    """Recover Gram matrix and equalizer from a (K, K) moment estimate.

    A is hermitized and eigendecomposed; eigenvalues are sorted descending
    and clamped at zero (a warning is raised if any falls below
    -neg_tol * trace(A), which indicates the input is not close to PSD).
    The quadratic omega = lam^2 + sigma2 lam is inverted per eigenvalue in
    the form lam = 2 omega / (sqrt(sigma2^2 + 4 omega) + sigma2), which is
    exact for omega = 0 and loses no precision for small omega.  The
    equalizer eigenvalues mu = 2 / (sqrt(sigma2^2 + 4 omega) + sigma2)
    equal 1 / (lam + sigma2) algebraically; the identity is checked to
    1e-12 as an internal consistency guard.
    """
    A = 0.5 * (A + A.conj().T)
    w, U = np.linalg.eigh(A)
    w = w[::-1]
    U = np.ascontiguousarray(U[:, ::-1])
    tr = float(np.real(np.trace(A)))
    floor = -neg_tol * max(tr, 0.0)
    if w.min() < floor:
        warnings.warn(
            "moment estimate has eigenvalue %.3g below -%.1g * trace; "
            "clamping to zero" % (float(w.min()), neg_tol),
            RuntimeWarning, stacklevel=2)
    omega = np.clip(w, 0.0, None)
    root = np.sqrt(sigma2 * sigma2 + 4.0 * omega) + sigma2
    pos = root > 0.0
    lam = np.divide(2.0 * omega, root, out=np.zeros_like(omega), where=pos)
    mu = np.divide(2.0, root, out=np.full_like(omega, np.inf), where=pos)
    check = np.abs(mu[pos] * (lam[pos] + sigma2) - 1.0)
    assert float(check.max(initial=0.0)) <= 1e-12
    gram = (U * lam[None, :]) @ U.conj().T
    gram = 0.5 * (gram + gram.conj().T)
    combiner = (U * mu[None, :]) @ U.conj().T
    combiner = 0.5 * (combiner + combiner.conj().T)
    return GramRecovery(U=U, omega=omega, lam=lam, mu=mu, gram=gram,
                        combiner=combiner, sigma2=float(sigma2))


def qlmmse_receive(S: np.ndarray, sigma2: float,
                   block_len: int | None = None,
                   a_matrix: np.ndarray | None = None):
    """Equalize matched-filter streams using only their own statistics.

    S : (K, T) accumulated matched-filter streams.  The second moment is
    estimated from the block itself (or taken from `a_matrix` when the
    exact statistic is available, e.g. for infinite-block references).
    Returns (X_hat, recovery) where X_hat = combiner @ S.
    """
    A = stream_second_moment(S, block_len) if a_matrix is None else a_matrix
    rec = recover_gram(A, sigma2)
    return rec.combiner @ S, rec
