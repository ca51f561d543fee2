import numpy as np
import pytest

from stripesim.channel import complex_noise, gaussian_symbols
from stripesim.combiners import lmmse_receive_forms
from stripesim.qlmmse import (
    eigenvalue_roundtrip,
    qlmmse_receive,
    recover_gram,
    stream_second_moment,
)


def random_gram(K, rng, scale=1.0):
    H = rng.standard_normal((2 * K, K)) + 1j * rng.standard_normal((2 * K, K))
    H *= np.sqrt(scale / (2 * K))
    return H.conj().T @ H, H


def test_roundtrip_identity_dense_grid():
    rng = np.random.default_rng(0)
    lam = 10.0 ** rng.uniform(-8, 4, size=100_000)
    for sigma2 in (0.0, 1e-6, 0.37, 10.0):
        back = eigenvalue_roundtrip(lam, sigma2)
        assert np.max(np.abs(back - lam) / lam) < 1e-12


def test_roundtrip_zero_eigenvalue():
    assert eigenvalue_roundtrip(np.array([0.0]), 0.0)[0] == 0.0
    assert eigenvalue_roundtrip(np.array([0.0]), 2.0)[0] == 0.0


def test_recovery_from_exact_moment():
    rng = np.random.default_rng(1)
    for trial in range(25):
        K = int(rng.integers(2, 7))
        sigma2 = float(10.0 ** rng.uniform(-2, 1))
        G, _ = random_gram(K, rng, scale=rng.uniform(0.1, 10.0))
        A = G @ G + sigma2 * G
        rec = recover_gram(A, sigma2)
        assert np.linalg.norm(rec.gram - G) / np.linalg.norm(G) < 1e-9, trial
        ref = np.linalg.inv(G + sigma2 * np.eye(K))
        assert np.linalg.norm(rec.combiner - ref) / np.linalg.norm(ref) < 1e-9


def test_recovery_with_repeated_eigenvalues():
    # multiplicity-2 spectrum: recovery must not depend on how eigh picks a
    # basis inside the degenerate subspace
    rng = np.random.default_rng(2)
    K = 5
    Q, _ = np.linalg.qr(rng.standard_normal((K, K))
                        + 1j * rng.standard_normal((K, K)))
    lam = np.array([3.0, 2.0, 2.0, 1.0, 0.5])
    G = (Q * lam[None, :]) @ Q.conj().T
    G = 0.5 * (G + G.conj().T)
    sigma2 = 0.4
    A = G @ G + sigma2 * G
    rec = recover_gram(A, sigma2)
    assert np.linalg.norm(rec.gram - G) / np.linalg.norm(G) < 1e-9


def test_recovery_basis_stability():
    # rotate A inside its degenerate eigenspace: gram must be unchanged
    rng = np.random.default_rng(3)
    lam = np.array([4.0, 1.0, 1.0, 0.2])
    Q, _ = np.linalg.qr(rng.standard_normal((4, 4))
                        + 1j * rng.standard_normal((4, 4)))
    G = (Q * lam[None, :]) @ Q.conj().T
    sigma2 = 0.7
    A = G @ G + sigma2 * G
    rec1 = recover_gram(A, sigma2)
    # a unitary alignment within the multiplicity-2 block of A leaves A
    # numerically identical; perturb at roundoff scale instead
    rec2 = recover_gram(A + 1e-15 * np.eye(4), sigma2)
    assert np.linalg.norm(rec1.gram - rec2.gram) < 1e-9


def test_noiseless_lambda_is_sqrt_omega():
    rng = np.random.default_rng(4)
    G, _ = random_gram(4, rng)
    A = G @ G
    rec = recover_gram(A, 0.0)
    np.testing.assert_allclose(rec.lam, np.sqrt(rec.omega), atol=1e-12)
    assert np.linalg.norm(rec.gram - G) / np.linalg.norm(G) < 1e-9


def test_scalar_recovery_hand_computed():
    # K=1: A = g^2 + sigma2 g with g=2, sigma2=3 -> A=10;
    # lam = (sqrt(9+40)-3)/2 = 2, mu = 1/(2+3) = 0.2
    rec = recover_gram(np.array([[10.0 + 0j]]), 3.0)
    assert rec.lam[0] == pytest.approx(2.0, abs=1e-12)
    assert rec.mu[0] == pytest.approx(0.2, abs=1e-12)
    assert rec.gram[0, 0].real == pytest.approx(2.0, abs=1e-12)


def test_negative_eigenvalue_clamps_and_warns():
    A = np.diag([1.0, -0.5]).astype(complex)
    with pytest.warns(RuntimeWarning):
        rec = recover_gram(A, 0.3)
    assert rec.omega.min() == 0.0
    assert rec.lam.min() == 0.0
    # mu for a zero eigenvalue is 1/sigma2
    assert rec.mu[-1] == pytest.approx(1.0 / 0.3)


def test_tiny_negative_eigenvalue_clamps_silently():
    A = np.diag([1.0, -1e-14]).astype(complex)
    import warnings as _w
    with _w.catch_warnings():
        _w.simplefilter("error")
        rec = recover_gram(A, 0.5)
    assert rec.omega.min() == 0.0


def test_receive_equals_k_form_lmmse_with_exact_statistics():
    rng = np.random.default_rng(5)
    for trial in range(20):
        K, M, T = 4, 8, 6
        H = rng.standard_normal((M, K)) + 1j * rng.standard_normal((M, K))
        sigma2 = float(10.0 ** rng.uniform(-2, 0.5))
        x = gaussian_symbols((K, T), rng)
        n = complex_noise((M, T), sigma2, rng)
        Y = H @ x + n
        S = H.conj().T @ Y
        G = H.conj().T @ H
        A = G @ G + sigma2 * G
        X_hat, rec = qlmmse_receive(S, sigma2, a_matrix=A)
        _, ref = lmmse_receive_forms(H, Y, sigma2)
        assert np.linalg.norm(X_hat - ref) / np.linalg.norm(ref) < 1e-9, trial


def test_sampled_statistic_converges_with_block_length():
    rng = np.random.default_rng(6)
    wins = 0
    trials = 20
    for _ in range(trials):
        K, M = 3, 6
        H = rng.standard_normal((M, K)) + 1j * rng.standard_normal((M, K))
        sigma2 = 0.5
        G = H.conj().T @ H
        A = G @ G + sigma2 * G
        devs = []
        for T in (100, 10_000):
            x = gaussian_symbols((K, T), rng)
            n = complex_noise((M, T), sigma2, rng)
            S = H.conj().T @ (H @ x + n)
            devs.append(np.linalg.norm(stream_second_moment(S) - A))
        if devs[1] < devs[0]:
            wins += 1
    assert wins > trials // 2


def test_stream_second_moment_explicit_block_length():
    S = np.ones((2, 4), dtype=complex)
    np.testing.assert_allclose(stream_second_moment(S),
                               np.ones((2, 2)), atol=1e-15)
    np.testing.assert_allclose(stream_second_moment(S, block_len=8),
                               0.5 * np.ones((2, 2)), atol=1e-15)


def test_recovery_reports_descending_eigenvalues():
    rng = np.random.default_rng(7)
    G, _ = random_gram(5, rng)
    rec = recover_gram(G @ G + 0.2 * G, 0.2)
    assert np.all(np.diff(rec.omega) <= 0)
    assert np.all(np.diff(rec.lam) <= 0)
    assert np.all(np.diff(rec.mu) >= 0)


def test_zero_moment_zero_streams():
    S = np.zeros((3, 5), dtype=complex)
    X_hat, rec = qlmmse_receive(S, 0.8)
    assert np.all(X_hat == 0)
    assert np.all(rec.lam == 0)
    np.testing.assert_allclose(rec.mu, 1.0 / 0.8)
