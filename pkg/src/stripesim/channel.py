"""Correlated Rayleigh channel draws and pilot/data signal generation."""

from __future__ import annotations

import numpy as np


def covariance_factors(R: np.ndarray) -> np.ndarray:
    """Square-root factors F with F F^H = R for a batch of PSD matrices.

    R has shape (..., N, N); eigenvalues are clipped at zero so factors of
    rank-deficient or slightly indefinite inputs stay real-safe.
    """
    w, U = np.linalg.eigh(R)
    w = np.clip(w, 0.0, None)
    return U * np.sqrt(w)[..., None, :]


def draw_channels(F: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """h = F g with g ~ CN(0, I), batched over leading axes of F.

    F has shape (..., N, N); the result has shape (..., N).
    """
    shape = F.shape[:-1]
    g = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    g /= np.sqrt(2.0)
    return np.einsum("...nm,...m->...n", F, g)


def pilot_matrix(tau_p: int) -> np.ndarray:
    """(tau_p, tau_p) DFT pilot book with phi_t^H phi_t = tau_p."""
    t = np.arange(tau_p)
    return np.exp(-2j * np.pi * np.outer(t, t) / tau_p)


def complex_noise(shape, sigma2: float, rng: np.random.Generator) -> np.ndarray:
    """CN(0, sigma2) samples of the given shape."""
    z = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return z * np.sqrt(sigma2 / 2.0)


def gaussian_symbols(shape, rng: np.random.Generator) -> np.ndarray:
    """Unit-variance circularly-symmetric complex Gaussian symbols."""
    z = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return z / np.sqrt(2.0)


def qpsk_symbols(shape, rng: np.random.Generator) -> np.ndarray:
    """Unit-power QPSK symbols."""
    re = rng.integers(0, 2, shape) * 2 - 1
    im = rng.integers(0, 2, shape) * 2 - 1
    return (re + 1j * im) / np.sqrt(2.0)


def received_pilots(h: np.ndarray, pilots: np.ndarray, assignment: np.ndarray,
                    p: np.ndarray, noise: np.ndarray) -> np.ndarray:
    """Pilot-phase receive blocks Z_l, one per AP.

    h : (K, L, N) channels, pilots : (tau_p, tau_p) book, assignment : (K,)
    pilot index per user, p : (K,) transmit powers, noise : (L, N, tau_p).
    Returns (L, N, tau_p) with Z_l = sum_k sqrt(p_k) h_{k,l} phi_{t_k}^T + N_l.
    """
    amp = np.sqrt(p)[:, None] * pilots[assignment]          # (K, tau_p)
    sig = np.einsum("kln,kt->lnt", h, amp)
    return sig + noise


def received_data(h: np.ndarray, s: np.ndarray, p: np.ndarray,
                  noise: np.ndarray) -> np.ndarray:
    """Data-phase receive blocks Y_l.

    h : (K, L, N), s : (K, T) unit-power symbols, p : (K,) powers,
    noise : (L, N, T).  Returns (L, N, T).
    """
    amp = np.sqrt(p)[:, None] * s
    return np.einsum("kln,kt->lnt", h, amp) + noise
