import numpy as np

from stripesim.channel import (
    complex_noise,
    covariance_factors,
    draw_channels,
    pilot_matrix,
    received_pilots,
)
from stripesim.config import SystemConfig
from stripesim.covariance import spatial_covariances
from stripesim.estimation import estimate_channels, estimation_matrices
from stripesim.geometry import place_layout


def random_psd(n, rng):
    B = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return B @ B.conj().T / n


def test_scalar_closed_form_uncorrelated():
    # R = beta I makes the estimator a scalar gain:
    # h_hat = sqrt(p) beta / (tau_p p beta + sigma2) * z
    beta, p, tau_p, sigma2 = 0.7, 2.0, 8, 0.3
    R = (beta * np.eye(3))[None, None]
    W, Gamma = estimation_matrices(R, np.array([0]), np.array([p]),
                                   tau_p, sigma2)
    gain = np.sqrt(p) * beta / (tau_p * p * beta + sigma2)
    np.testing.assert_allclose(W[0, 0], gain * np.eye(3), atol=1e-14)
    gamma = tau_p * p * beta ** 2 / (tau_p * p * beta + sigma2)
    np.testing.assert_allclose(Gamma[0, 0], gamma * np.eye(3), atol=1e-14)


def test_gamma_and_error_covariance_psd():
    cfg = SystemConfig(L=6, K=5, tau_p=5)
    layout = place_layout(cfg, np.random.default_rng(0))
    R = spatial_covariances(cfg, layout)
    W, Gamma = estimation_matrices(R, np.arange(5), cfg.p_vector,
                                   cfg.tau_p, cfg.sigma2_mw)
    for arr in (Gamma, R - Gamma):
        arr = 0.5 * (arr + np.conj(np.swapaxes(arr, -1, -2)))
        w = np.linalg.eigvalsh(arr.reshape(-1, cfg.N, cfg.N))
        assert w.min() > -1e-12 * np.abs(w).max()


def test_noiseless_full_rank_estimation_is_exact():
    rng = np.random.default_rng(1)
    K, L, N, tau_p = 2, 3, 3, 4
    R = np.stack([np.stack([random_psd(N, rng) for _ in range(L)])
                  for _ in range(K)])
    p = np.array([1.0, 3.0])
    assignment = np.array([0, 1])
    phi = pilot_matrix(tau_p)
    W, Gamma = estimation_matrices(R, assignment, p, tau_p, 1e-12)
    F = covariance_factors(R)
    h = draw_channels(F, rng)
    Z = received_pilots(h, phi, assignment, p,
                        np.zeros((L, N, tau_p), dtype=complex))
    h_hat = estimate_channels(Z, W, phi, assignment)
    np.testing.assert_allclose(h_hat, h, atol=1e-6)
    np.testing.assert_allclose(Gamma, R, atol=1e-6)


def test_estimate_matches_dense_lmmse_oracle():
    rng = np.random.default_rng(2)
    K, L, N, tau_p, sigma2 = 3, 2, 2, 4, 0.5
    R = np.stack([np.stack([random_psd(N, rng) for _ in range(L)])
                  for _ in range(K)])
    p = np.array([1.0, 2.0, 0.5])
    assignment = np.array([0, 1, 2])
    phi = pilot_matrix(tau_p)
    W, _ = estimation_matrices(R, assignment, p, tau_p, sigma2)
    h = draw_channels(covariance_factors(R), rng)
    noise = complex_noise((L, N, tau_p), sigma2, rng)
    Z = received_pilots(h, phi, assignment, p, noise)
    h_hat = estimate_channels(Z, W, phi, assignment)
    for k in range(K):
        for l in range(L):
            z = Z[l] @ np.conj(phi[:, assignment[k]])
            Q = tau_p * p[k] * R[k, l] + sigma2 * np.eye(N)
            ref = np.sqrt(p[k]) * R[k, l] @ np.linalg.solve(Q, z)
            np.testing.assert_allclose(h_hat[k, l], ref, atol=1e-10)


def test_empirical_estimate_covariance_matches_gamma():
    rng = np.random.default_rng(3)
    N, tau_p, sigma2 = 2, 4, 0.4
    R = random_psd(N, rng)[None, None]
    p = np.array([1.5])
    assignment = np.array([0])
    phi = pilot_matrix(tau_p)
    W, Gamma = estimation_matrices(R, assignment, p, tau_p, sigma2)
    F = covariance_factors(R)
    n = 100_000
    acc = np.zeros((N, N), dtype=complex)
    xerr = np.zeros((N, N), dtype=complex)
    for _ in range(n):
        h = draw_channels(F, rng)
        Z = received_pilots(h, phi, assignment, p,
                            complex_noise((1, N, tau_p), sigma2, rng))
        h_hat = estimate_channels(Z, W, phi, assignment)[0, 0]
        acc += np.outer(h_hat, h_hat.conj())
        err = h[0, 0] - h_hat
        xerr += np.outer(err, h_hat.conj())
    emp = acc / n
    assert np.linalg.norm(emp - Gamma[0, 0]) / np.linalg.norm(Gamma[0, 0]) < 0.02
    # orthogonality principle: error uncorrelated with the estimate
    assert np.linalg.norm(xerr / n) / np.linalg.norm(Gamma[0, 0]) < 0.02


def test_lmmse_beats_perturbed_estimators():
    # empirical MSE of the returned W is no worse than nearby linear maps
    rng = np.random.default_rng(4)
    N, tau_p, sigma2 = 2, 3, 0.6
    R = random_psd(N, rng)[None, None]
    p = np.array([1.0])
    assignment = np.array([0])
    phi = pilot_matrix(tau_p)
    W, _ = estimation_matrices(R, assignment, p, tau_p, sigma2)
    F = covariance_factors(R)
    n = 20_000
    hs = np.empty((n, N), dtype=complex)
    zs = np.empty((n, N), dtype=complex)
    for i in range(n):
        h = draw_channels(F, rng)
        Z = received_pilots(h, phi, assignment, p,
                            complex_noise((1, N, tau_p), sigma2, rng))
        hs[i] = h[0, 0]
        zs[i] = Z[0] @ np.conj(phi[:, 0])
    mse_w = np.mean(np.abs(hs - zs @ W[0, 0].T) ** 2)
    for trial in range(5):
        P = 0.05 * (rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N)))
        mse_p = np.mean(np.abs(hs - zs @ (W[0, 0] + P).T) ** 2)
        assert mse_p > mse_w, trial


def test_pilot_reuse_contaminates_estimates():
    # two users sharing a pilot produce correlated estimates; a third user
    # on a clean pilot is unaffected
    rng = np.random.default_rng(5)
    N, tau_p, sigma2 = 2, 4, 0.1
    R = np.stack([random_psd(N, rng)[None] for _ in range(3)])
    p = np.ones(3)
    assignment = np.array([0, 0, 2])
    phi = pilot_matrix(tau_p)
    W, Gamma = estimation_matrices(R, assignment, p, tau_p, sigma2)
    # shared pilot: Q contains both users, so Gamma < the clean-pilot value
    Q_shared = tau_p * (R[0, 0] + R[1, 0]) + sigma2 * np.eye(N)
    ref = tau_p * R[0, 0] @ np.linalg.solve(Q_shared, R[0, 0])
    np.testing.assert_allclose(Gamma[0, 0], 0.5 * (ref + ref.conj().T),
                               atol=1e-12)
    n = 30_000
    c01 = np.zeros((N, N), dtype=complex)
    c02 = np.zeros((N, N), dtype=complex)
    for _ in range(n):
        h = draw_channels(covariance_factors(R), rng)
        Z = received_pilots(h, phi, assignment, p,
                            complex_noise((1, N, tau_p), sigma2, rng))
        hh = estimate_channels(Z, W, phi, assignment)
        c01 += np.outer(hh[0, 0], hh[1, 0].conj())
        c02 += np.outer(hh[0, 0], hh[2, 0].conj())
    scale = np.linalg.norm(Gamma[0, 0])
    assert np.linalg.norm(c01 / n) / scale > 0.2      # contaminated pair
    assert np.linalg.norm(c02 / n) / scale < 0.05     # clean pair
