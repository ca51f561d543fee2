"""SINR probing, spectral efficiency, and distribution summaries."""

from __future__ import annotations

import numpy as np


def sinr_from_probes(T_s: np.ndarray, T_n: np.ndarray,
                     sigma2: float) -> np.ndarray:
    """Per-user SINR of a fixed linear receiver from two probe responses.

    T_s : (K, K) receiver output when the input is the true effective
          channel matrix (columns scaled by the transmit amplitudes), so
          T_s[k, i] is receiver k's gain toward user i's symbol.
    T_n : (K, M) receiver output when the input is I_M, i.e. the receiver
          rows themselves; row norms give the noise amplification.
    """
    g = np.abs(T_s) ** 2
    sig = np.diag(g).copy()
    interf = g.sum(axis=1) - sig
    noise = sigma2 * np.sum(np.abs(T_n) ** 2, axis=1)
    den = interf + noise
    safe = sig / np.where(den > 0.0, den, 1.0)
    return np.where(den > 0.0, safe, np.where(sig > 0.0, np.inf, 0.0))


def spectral_efficiency(sinr: np.ndarray, prelog: float) -> np.ndarray:
    """SE in bit/s/Hz with the pilot-overhead prelog factor."""
    return prelog * np.log2(1.0 + sinr)


def summarize_samples(se: np.ndarray) -> dict:
    """Mean and 10th percentile (90%-likely value) of SE samples."""
    se = np.asarray(se, dtype=np.float64).ravel()
    return {"mean": float(se.mean()),
            "p10": float(np.percentile(se, 10.0))}


def cdf_table(values: np.ndarray) -> np.ndarray:
    """(n, 2) empirical CDF table: sorted values, probabilities i/n."""
    v = np.sort(np.asarray(values, dtype=np.float64).ravel())
    p = np.arange(1, v.size + 1) / v.size
    return np.column_stack([v, p])
