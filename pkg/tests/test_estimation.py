import math

import numpy as np
import pytest

from lowres_mimo.channel import complex_normal, rician_mix, steering_matrix
from lowres_mimo.estimation import (
    error_variance,
    estimate_gain,
    mmse_estimate,
    pilot_noise_std,
    pilot_observe,
)
from lowres_mimo.scenario import UserLink

USERS = [UserLink(1.0, 1.0, 0.3), UserLink(0.2, 10.0, -0.6), UserLink(3.0, 0.0, 1.1)]


def simulate(users, M, p_p, T, seed):
    rng = np.random.default_rng(seed)
    beta = np.array([u.beta for u in users])
    k = np.array([u.rician_k for u in users])
    Hb = steering_matrix(M, [u.theta for u in users])
    Hw = complex_normal(rng, (T, M, len(users)))
    G = rician_mix(Hb, Hw, beta, k)
    Y = pilot_observe(G, p_p, rng, k)
    return G, mmse_estimate(Y, users, Hb, p_p, G=G)


def test_error_variance_formula():
    assert error_variance(1.0, 1.0, 10.0) == pytest.approx(1 / (11 * 2))
    assert error_variance(2.0, 0.0, 0.5) == pytest.approx(2 / 2)


def test_error_variance_matches_simulation():
    p_p = 5.0
    _, est = simulate(USERS, 4, p_p, 100_000, 1)
    var = np.mean(np.abs(est.Xi) ** 2, axis=(0, 1))
    assert np.allclose(var, est.sigma_sq, rtol=0.02)


def test_estimate_unbiased_and_error_orthogonal():
    _, est = simulate(USERS, 4, 2.0, 100_000, 2)
    assert np.max(np.abs(np.mean(est.Xi, axis=0))) < 0.01
    # MMSE orthogonality: the error is uncorrelated with the estimate's fluctuation
    mean = np.mean(est.G_hat, axis=0)
    corr = np.mean(np.conj(est.G_hat - mean) * est.Xi, axis=0)
    assert np.max(np.abs(corr)) < 0.01


def test_estimate_power():
    p_p = 3.0
    _, est = simulate(USERS, 4, p_p, 100_000, 3)
    beta = np.array([u.beta for u in USERS])
    k = np.array([u.rician_k for u in USERS])
    eta = estimate_gain(beta, p_p)
    got = np.mean(np.abs(est.G_hat) ** 2, axis=(0, 1))
    assert np.allclose(got, beta * (k + eta) / (k + 1), rtol=0.02)


def test_power_split_exact():
    rng = np.random.default_rng(4)
    for _ in range(100):
        beta, k, p_p = rng.uniform(1e-4, 10), rng.uniform(0, 100), rng.uniform(0.01, 1e3)
        eta = estimate_gain(beta, p_p)
        total = beta * (k + eta) / (k + 1) + error_variance(beta, k, p_p)
        assert total == pytest.approx(beta, rel=1e-12)


def test_noise_std_and_validation(rng):
    assert pilot_noise_std(0.0, 4.0) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        pilot_observe(np.zeros((2, 2)), 0.0, rng)
    with pytest.raises(ValueError):
        mmse_estimate(np.zeros((3, 2)), USERS, steering_matrix(3, [0, 0, 0]), 1.0)


def test_true_channel_recovered(rng):
    G, est = simulate(USERS, 5, 1.0, 3, 7)
    assert np.allclose(est.G, G)
    Y = pilot_observe(G, 1.0, rng)
    assert np.all(np.isnan(mmse_estimate(Y, USERS, steering_matrix(5, [u.theta for u in USERS]), 1.0).Xi))
