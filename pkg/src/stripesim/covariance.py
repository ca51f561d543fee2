"""Spatial correlation matrices for the stripe-mounted uniform linear arrays.

Each AP sees each user through a local-scattering channel: the nominal
angle is the user's azimuth relative to the AP's wall, and the angular
deviation follows a Laplace distribution.  The resulting antenna
covariance is Hermitian Toeplitz with first row given by the
characteristic-function integrals in `_kernels.scattering_integrals`.
"""

from __future__ import annotations

import warnings

import numpy as np

from . import _kernels
from .config import SystemConfig
from .geometry import Layout


def nominal_angles(layout: Layout) -> np.ndarray:
    """(L, K) azimuth of each user in each AP's local frame.

    The angle is measured from the AP's inward wall normal toward the wall
    tangent, so a user straight in front of the array sits at 0 and the
    array axis directions are at +-pi/2.  Uses the horizontal displacement
    only; elevation enters through the link distance, not the angle.
    """
    d = layout.user_positions[None, :, :2] - layout.ap_positions[:, None, :2]
    t = layout.ap_tangents[:, None, :2]
    n = layout.ap_normals[:, None, :2]
    along = np.sum(d * t, axis=2)
    inward = np.sum(d * n, axis=2)
    return np.arctan2(along, inward)


def spatial_covariances(cfg: SystemConfig, layout: Layout,
                        quad_tol: float = 1e-8) -> np.ndarray:
    """(K, L, N, N) channel covariance R_{k,l} for every user-AP pair.

    correlated mode: [R]_{a,b} = beta * r(a - b) with r(m) the Laplace
    local-scattering integral at the pair's nominal angle (angle spread
    cfg.angle_spread_deg).  uncorrelated mode: R = beta * I.  Either way
    trace(R) = N * beta holds to machine precision because the quadrature
    weights are normalized to unit mass.
    """
    L, N, K = cfg.L, cfg.N, cfg.K
    beta = layout.gains  # (L, K)
    R = np.zeros((K, L, N, N), dtype=np.complex128)
    if cfg.antenna_mode == "uncorrelated" or N == 1:
        idx = np.arange(N)
        R[:, :, idx, idx] = beta.T[:, :, None]
        return R
    spread = np.deg2rad(cfg.angle_spread_deg)
    theta = nominal_angles(layout)  # (L, K)
    r, err = _kernels.scattering_integrals(theta.ravel(), spread, N,
                                           tol=quad_tol)
    bad = err > quad_tol
    if bad.any():
        warnings.warn(
            "scattering quadrature did not reach tol=%g for %d of %d angles "
            "(worst error %.3g)" % (quad_tol, int(bad.sum()), bad.size,
                                    float(err[bad].max())),
            RuntimeWarning, stacklevel=2)
    r = r.reshape(L, K, N)
    a, b = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
    lag = a - b  # Toeplitz lag; negative lags are conjugates
    toep = np.where(lag[None, None] >= 0,
                    r[:, :, np.abs(lag)],
                    np.conj(r[:, :, np.abs(lag)]))
    R = (beta[:, :, None, None] * toep).transpose(1, 0, 2, 3)
    return np.ascontiguousarray(R)
