"""MMSE channel estimation from unquantized orthogonal pilots.

Pilots bypass the low-resolution ADCs, so the estimator sees the de-spread
observation of each user's channel in Gaussian noise. The LoS mean is known;
only the scattered part is estimated. Its observation SNR is ``p_p * beta_n``,
i.e. the de-spread noise on column ``n`` of ``G`` has variance
``1 / (p_p (K_n + 1))``. With that model the per-element error variance is
``beta_n / ((1 + p_p beta_n)(K_n + 1))`` and the estimate gain is
``eta_n = p_p beta_n / (1 + p_p beta_n)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channel import complex_normal
from .scenario import UserLink, user_arrays


@dataclass(frozen=True, eq=False)
class ChannelEstimate:
    G_hat: np.ndarray
    Xi: np.ndarray
    sigma_sq: np.ndarray
    eta: np.ndarray

    @property
    def G(self):
        """The true channel, recovered as ``G_hat - Xi``."""
        return self.G_hat - self.Xi


def error_variance(beta, k, p_p):
    """Per-element estimation error variance of each user."""
    beta = np.asarray(beta, dtype=float)
    return beta / ((1.0 + p_p * beta) * (np.asarray(k, dtype=float) + 1.0))


def estimate_gain(beta, p_p):
    beta = np.asarray(beta, dtype=float)
    return p_p * beta / (1.0 + p_p * beta)


def pilot_noise_std(k, p_p):
    """Standard deviation of the de-spread pilot noise per user column."""
    return 1.0 / np.sqrt(p_p * (np.asarray(k, dtype=float) + 1.0))


def pilot_observe(G, p_p: float, rng: np.random.Generator, rician_k=0.0) -> np.ndarray:
    """De-spread pilot observation ``Y = G + W diag(1 / sqrt(p_p (K_n + 1)))``.

    ``W`` has i.i.d. CN(0, 1) entries. ``rician_k`` is a scalar or one value
    per column. The leading axes of ``G`` may be batch axes.
    """
    if not p_p > 0:
        raise ValueError("pilot power must be positive")
    G = np.asarray(G, dtype=complex)
    W = complex_normal(rng, G.shape)
    return G + W * pilot_noise_std(rician_k, p_p)


def mmse_estimate(
    Y, users: Sequence[UserLink], H_bar, p_p: float, G=None
) -> ChannelEstimate:
    """Per-user MMSE estimate ``g_hat_n = g_bar_n + eta_n (y_n - g_bar_n)``.

    ``g_bar_n = sqrt(K_n beta_n / (K_n + 1)) h_bar_n`` is the known LoS mean.
    When the true channel ``G`` is supplied, ``Xi = G_hat - G`` is filled in
    (otherwise it is left as NaN).
    """
    beta, k, _ = user_arrays(users)
    Y = np.asarray(Y, dtype=complex)
    H_bar = np.asarray(H_bar)
    if Y.shape[-2:] != H_bar.shape or Y.shape[-1] != len(users):
        raise ValueError(f"shape mismatch: Y {Y.shape}, H_bar {H_bar.shape}, {len(users)} users")
    eta = estimate_gain(beta, p_p)
    mean = H_bar * np.sqrt(k * beta / (k + 1.0))
    G_hat = mean + eta * (Y - mean)
    if G is None:
        Xi = np.full_like(G_hat, np.nan)
    else:
        Xi = G_hat - np.asarray(G)
    return ChannelEstimate(G_hat=G_hat, Xi=Xi, sigma_sq=error_variance(beta, k, p_p), eta=eta)
