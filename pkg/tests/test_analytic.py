import math
import warnings

import numpy as np
import pytest

from lowres_mimo.analytic import (
    AnalyticInputs,
    LimitKind,
    fourth_moment,
    fourth_moment_estimate,
    imperfect_sinr_approx,
    moment_diag_imperfect,
    moment_diag_perfect,
    perfect_sinr_approx,
    se_imperfect_approx,
    se_imperfect_approx_all,
    se_limit,
    se_perfect_approx,
    se_perfect_approx_all,
    se_rayleigh_perfect,
)
from lowres_mimo.channel import complex_normal, rician_mix, steering_matrix
from lowres_mimo.estimation import error_variance, estimate_gain, pilot_noise_std
from lowres_mimo.quantization import QuantizerModel
from lowres_mimo.scenario import UserLink

USERS = [UserLink(1.0, 2.0, 0.3), UserLink(0.4, 5.0, -0.8), UserLink(2.0, 0.5, 1.2)]


def mc_expectations(users, M, T, seed, p_p=None, chunk=50_000):
    """Monte Carlo means of the quadratic forms entering both SINR ratios."""
    rng = np.random.default_rng(seed)
    beta = np.array([u.beta for u in users])
    k = np.array([u.rician_k for u in users])
    Hb = steering_matrix(M, [u.theta for u in users])
    mean = Hb * np.sqrt(k * beta / (k + 1))
    sums = None
    for start in range(0, T, chunk):
        n = min(chunk, T - start)
        G = rician_mix(Hb, complex_normal(rng, (n, M, len(users))), beta, k)
        if p_p is None:
            A = G
        else:
            Y = G + complex_normal(rng, G.shape) * pilot_noise_std(k, p_p)
            A = mean + estimate_gain(beta, p_p) * (Y - mean)
        gram = np.abs(np.einsum("tmn,tmi->tni", A.conj(), A)) ** 2
        norm = np.sum(np.abs(A) ** 2, axis=1)
        vals = {
            "norm": norm,
            "norm2": norm**2,
            "intf": gram.sum(axis=2) - np.diagonal(gram, axis1=1, axis2=2),
            "quad": np.einsum("tmn,tm->tn", np.abs(A) ** 2, np.sum(np.abs(A) ** 2, axis=2)),
        }
        part = {key: v.sum(axis=0) for key, v in vals.items()}
        sums = part if sums is None else {key: sums[key] + part[key] for key in sums}
    return {key: v / T for key, v in sums.items()}


def test_perfect_ratio_matches_mc_expectations():
    M, p_u = 8, 3.0
    q = QuantizerModel.from_bits(2)
    e = mc_expectations(USERS, M, 400_000, 1)
    want = q.kappa * p_u * e["norm2"] / (q.kappa * p_u * e["intf"] + e["norm"] + q.rho * p_u * e["quad"])
    got = perfect_sinr_approx(AnalyticInputs(USERS, M, q, p_u))
    assert np.allclose(got, want, rtol=0.01)


def test_imperfect_ratio_matches_mc_expectations():
    # the approximation leaves the estimation-error term without kappa and
    # evaluates the quantization term on the estimate
    M, p_u, p_p = 8, 2.0, 6.0
    q = QuantizerModel.from_bits(1)
    beta = np.array([u.beta for u in USERS])
    k = np.array([u.rician_k for u in USERS])
    sig = float(np.sum(error_variance(beta, k, p_p)))
    e = mc_expectations(USERS, M, 400_000, 2, p_p=p_p)
    want = q.kappa * p_u * e["norm2"] / (
        q.kappa * p_u * e["intf"] + e["norm"] * (p_u * sig + 1) + q.rho * p_u * e["quad"])
    got = imperfect_sinr_approx(AnalyticInputs(USERS, M, q, p_u, p_p))
    assert np.allclose(got, want, rtol=0.01)


def test_moments_match_mc():
    M = 8
    e = mc_expectations(USERS, M, 400_000, 3)
    for n, u in enumerate(USERS):
        assert e["norm2"][n] == pytest.approx(fourth_moment(u.beta, u.rician_k, M), rel=0.01)
        assert e["quad"][n] == pytest.approx(moment_diag_perfect(USERS, M, n), rel=0.01)
    p_p = 4.0
    e = mc_expectations(USERS, M, 400_000, 4, p_p=p_p)
    for n, u in enumerate(USERS):
        eta = estimate_gain(u.beta, p_p)
        assert e["norm2"][n] == pytest.approx(fourth_moment_estimate(u.beta, u.rician_k, M, eta), rel=0.01)
        assert e["quad"][n] == pytest.approx(moment_diag_imperfect(USERS, M, n, p_p), rel=0.01)


def test_fourth_moment_rayleigh_and_los():
    # Rayleigh: E||g||^4 = beta^2 M (M + 1); pure LoS: beta^2 M^2
    assert fourth_moment(2.0, 0.0, 10) == pytest.approx(4 * 10 * 11)
    assert fourth_moment(2.0, 1e12, 10) == pytest.approx(400, rel=1e-9)
    # eta = 1 makes the estimate the channel
    assert fourth_moment_estimate(1.5, 3.0, 7, 1.0) == pytest.approx(fourth_moment(1.5, 3.0, 7))


def test_rayleigh_reduction_exact():
    rng = np.random.default_rng(0)
    for _ in range(50):
        N = int(rng.integers(1, 8))
        users = [UserLink(float(b), 0.0, float(t)) for b, t in zip(rng.uniform(0.01, 3, N), rng.uniform(-1.5, 1.5, N))]
        inp = AnalyticInputs(users, int(rng.integers(1, 300)), QuantizerModel.from_bits(int(rng.integers(1, 5))),
                             float(rng.uniform(0.1, 50)))
        assert np.allclose(se_perfect_approx_all(inp), se_rayleigh_perfect(inp), rtol=1e-12, atol=0)


def test_perfect_estimation_limit():
    # huge pilot power: estimate equals the channel
    inp = AnalyticInputs(USERS, 64, QuantizerModel.from_bits(3), 1.0, p_p=1e12)
    assert np.allclose(se_imperfect_approx_all(inp), se_perfect_approx_all(inp), rtol=1e-8)


def test_single_user_api_and_validation():
    inp = AnalyticInputs(USERS, 16, QuantizerModel.from_bits(2), 1.0, 10.0)
    assert se_perfect_approx(inp, 1) == se_perfect_approx_all(inp)[1]
    assert se_imperfect_approx(inp, 2) == se_imperfect_approx_all(inp)[2]
    with pytest.raises(ValueError):
        imperfect_sinr_approx(AnalyticInputs(USERS, 16, QuantizerModel.ideal(), 1.0))
    with pytest.raises(ValueError):
        AnalyticInputs(USERS, 0, QuantizerModel.ideal(), 1.0)
    with pytest.raises(ValueError):
        AnalyticInputs([], 4, QuantizerModel.ideal(), 1.0)


def test_se_increases_with_antennas():
    q = QuantizerModel.from_bits(2)
    ses = [se_perfect_approx_all(AnalyticInputs(USERS, M, q, 10.0)).sum() for M in (16, 64, 256, 1024)]
    assert all(a < b for a, b in zip(ses, ses[1:]))


def test_limit_formulas():
    assert se_limit(LimitKind.PERFECT_SCALED, kappa=0.5, E_u=2.0, beta=3.0) == pytest.approx(math.log2(4.0))
    assert se_limit(LimitKind.IMPERFECT_HALF, kappa=0.5, E_u=2.0, beta=1.0, tau=4) == pytest.approx(math.log2(9.0))
    assert se_limit(LimitKind.IMPERFECT_FULL, kappa=1.0, E_u=2.0, beta=1.0, K=1.0) == pytest.approx(1.0)
    # general form at alpha = 1 tends to the full-scaling limit
    g = se_limit(LimitKind.IMPERFECT_GENERAL, kappa=1.0, E_u=2.0, beta=1.0, K=1.0, tau=10, alpha=1.0, M=1e9)
    assert g == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(ValueError):
        se_limit(LimitKind.IMPERFECT_HALF, kappa=1.0, E_u=1.0, beta=1.0)


def test_limit_warns_outside_analysed_range():
    with pytest.warns(UserWarning):
        se_limit(LimitKind.IMPERFECT_GENERAL, kappa=1.0, E_u=1.0, beta=1.0, tau=10, alpha=0.3, M=100)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        se_limit(LimitKind.IMPERFECT_GENERAL, kappa=1.0, E_u=1.0, beta=1.0, tau=10, alpha=0.5, M=100)
