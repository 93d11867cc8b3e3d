"""Closed-form SE approximations for MRC with AQNM quantization.

Both approximations have the form ``log2(1 + E{signal} / E{interference +
noise})`` with the expectations over Rician fading evaluated exactly. All
terms below have been multiplied through by ``(K_n + 1)^2 / beta_n``.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channel import phi
from .estimation import error_variance, estimate_gain
from .quantization import QuantizerModel
from .scenario import UserLink, user_arrays


@dataclass(frozen=True)
class AnalyticInputs:
    users: Sequence[UserLink]
    M: int
    q: QuantizerModel
    p_u: float
    p_p: float | None = None

    def __post_init__(self):
        if self.M < 1:
            raise ValueError("M must be >= 1")
        if not self.p_u > 0:
            raise ValueError("p_u must be positive")
        if self.p_p is not None and not self.p_p > 0:
            raise ValueError("p_p must be positive")
        if not self.users:
            raise ValueError("need at least one user")


def _phi_squared(M, theta):
    return phi(M, theta[:, None], theta[None, :]) ** 2


def _off_diagonal_sum(mat):
    """``sum_{i != n} mat[n, i]`` for each row ``n``."""
    return mat.sum(axis=1) - np.diagonal(mat)


def perfect_sinr_approx(inp: AnalyticInputs) -> np.ndarray:
    """Ratio of expectations inside the perfect-CSI approximation, all users."""
    beta, K, theta = user_arrays(inp.users)
    M, p_u = float(inp.M), inp.p_u
    kappa, rho = inp.q.kappa, inp.q.rho
    Kn, Ki = K[:, None], K[None, :]
    delta1 = (Kn * Ki * _phi_squared(inp.M, theta) + M * (Kn + Ki) + M) / (Ki + 1.0)
    interf = _off_diagonal_sum(beta[None, :] * delta1)
    beta_others = beta.sum() - beta
    num = kappa * p_u * beta * (M**2 * (K + 1.0) ** 2 + 2.0 * M * K + M)
    den = (
        kappa * p_u * (K + 1.0) * interf
        + M * (K + 1.0) ** 2
        + rho * p_u * M * (beta * (K**2 + 4.0 * K + 2.0) + (K + 1.0) ** 2 * beta_others)
    )
    return num / den


def imperfect_sinr_approx(inp: AnalyticInputs) -> np.ndarray:
    """Ratio of expectations inside the imperfect-CSI approximation, all users."""
    if inp.p_p is None:
        raise ValueError("imperfect-CSI approximation needs the pilot power p_p")
    beta, K, theta = user_arrays(inp.users)
    M, p_u, p_p = float(inp.M), inp.p_u, inp.p_p
    kappa, rho = inp.q.kappa, inp.q.rho
    eta = estimate_gain(beta, p_p)
    sigma_sum = float(np.sum(error_variance(beta, K, p_p)))
    Kn, Ki = K[:, None], K[None, :]
    en, ei = eta[:, None], eta[None, :]
    delta2 = (Kn * Ki * _phi_squared(inp.M, theta) + M * Ki * en + M * Kn * ei + M * en * ei) / (Ki + 1.0)
    interf = _off_diagonal_sum(beta[None, :] * delta2)
    w = beta / (K + 1.0) * (K + eta)
    delta3 = M * beta * (K**2 + 4.0 * K * eta + 2.0 * eta**2) + M * (K + 1.0) * (K + eta) * (w.sum() - w)
    num = kappa * p_u * beta * (M**2 * K**2 + 2.0 * M * K * eta * (1.0 + M) + (M**2 + M) * eta**2)
    den = (
        kappa * p_u * (K + 1.0) * interf
        + M * (K + eta) * (K + 1.0) * (p_u * sigma_sum + 1.0)
        + rho * p_u * delta3
    )
    return num / den


def se_perfect_approx_all(inp: AnalyticInputs) -> np.ndarray:
    return np.log2(1.0 + perfect_sinr_approx(inp))


def se_imperfect_approx_all(inp: AnalyticInputs) -> np.ndarray:
    return np.log2(1.0 + imperfect_sinr_approx(inp))


def se_perfect_approx(inp: AnalyticInputs, n: int) -> float:
    """Approximate SE (bits/s/Hz) of user ``n`` with perfect CSI."""
    return float(se_perfect_approx_all(inp)[n])


def se_imperfect_approx(inp: AnalyticInputs, n: int) -> float:
    """Approximate SE (bits/s/Hz) of user ``n`` with MMSE-estimated CSI."""
    return float(se_imperfect_approx_all(inp)[n])


def se_rayleigh_perfect(inp: AnalyticInputs) -> np.ndarray:
    """Perfect-CSI approximation specialised to ``K = 0`` for every user.

    ``log2(1 + kappa p_u beta_n (M + 1) / (p_u sum_{i!=n} beta_i + 2 rho p_u beta_n + 1))``.
    """
    beta, _, _ = user_arrays(inp.users)
    kappa, rho, p_u, M = inp.q.kappa, inp.q.rho, inp.p_u, inp.M
    others = beta.sum() - beta
    return np.log2(1.0 + kappa * p_u * beta * (M + 1) / (p_u * others + 2.0 * rho * p_u * beta + 1.0))


class LimitKind(enum.Enum):
    PERFECT_SCALED = "perfect_scaled"  # p_u = E_u / M
    IMPERFECT_GENERAL = "imperfect_general"  # p_u = E_u / M**alpha, finite-M form
    IMPERFECT_HALF = "imperfect_half"  # alpha = 1/2, K = 0
    IMPERFECT_FULL = "imperfect_full"  # alpha = 1


def se_limit(kind: LimitKind, *, kappa, E_u, beta, K=0.0, tau=None, alpha=None, M=None) -> float:
    """Large-array SE limits under power scaling.

    ``PERFECT_SCALED``: ``log2(1 + kappa E_u beta)``.
    ``IMPERFECT_GENERAL``: ``log2(1 + kappa E_u beta (M^alpha K + tau E_u beta) / (M^(2 alpha - 1) (K + 1)))``;
    warns when ``alpha`` lies outside [1/2, 1].
    ``IMPERFECT_HALF``: ``log2(1 + kappa tau E_u^2 beta^2)``.
    ``IMPERFECT_FULL``: ``log2(1 + kappa K E_u beta / (K + 1))``.
    """
    kind = LimitKind(kind)
    if kind is LimitKind.PERFECT_SCALED:
        return math.log2(1.0 + kappa * E_u * beta)
    if kind is LimitKind.IMPERFECT_HALF:
        if tau is None:
            raise ValueError("IMPERFECT_HALF needs tau")
        return math.log2(1.0 + kappa * tau * E_u**2 * beta**2)
    if kind is LimitKind.IMPERFECT_FULL:
        if math.isinf(K):
            return math.log2(1.0 + kappa * E_u * beta)
        return math.log2(1.0 + kappa * K * E_u * beta / (K + 1.0))
    if tau is None or alpha is None or M is None:
        raise ValueError("IMPERFECT_GENERAL needs tau, alpha and M")
    if not 0.5 <= alpha <= 1.0:
        warnings.warn(f"alpha={alpha} is outside the analysed range [1/2, 1]", stacklevel=2)
    return math.log2(1.0 + kappa * E_u * beta * (M**alpha * K + tau * E_u * beta) / (M ** (2 * alpha - 1) * (K + 1.0)))


def fourth_moment(beta, K, M):
    """``E{||g_n||^4}`` for a Rician column."""
    return beta**2 * (M**2 * (K + 1.0) ** 2 + 2.0 * M * K + M) / (K + 1.0) ** 2


def fourth_moment_estimate(beta, K, M, eta):
    """``E{||g_hat_n||^4}`` for the MMSE estimate."""
    return beta**2 * (M**2 * K**2 + 2.0 * M * K * eta * (1.0 + M) + (M**2 + M) * eta**2) / (K + 1.0) ** 2


def moment_diag_perfect(users: Sequence[UserLink], M: int, n: int) -> float:
    """``E{g_n^H diag(G G^H) g_n}``."""
    beta, K, _ = user_arrays(users)
    others = beta.sum() - beta[n]
    return float(beta[n] ** 2 * M * (K[n] ** 2 + 4 * K[n] + 2) / (K[n] + 1) ** 2 + M * beta[n] * others)


def moment_diag_imperfect(users: Sequence[UserLink], M: int, n: int, p_p: float) -> float:
    """``E{g_hat_n^H diag(G_hat G_hat^H) g_hat_n}``."""
    beta, K, _ = user_arrays(users)
    eta = estimate_gain(beta, p_p)
    w = beta / (K + 1.0) * (K + eta)
    others = w.sum() - w[n]
    Kn, en = K[n], eta[n]
    return float(
        M * beta[n] ** 2 / (Kn + 1) ** 2 * (Kn**2 + 4 * Kn * en + 2 * en**2)
        + M * beta[n] / (Kn + 1) * (Kn + en) * others
    )
