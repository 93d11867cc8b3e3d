"""Monte Carlo ergodic SE of MRC receivers under perfect and imperfect CSI.

Each trial ``t`` draws its fading (and pilot noise) from its own stream
``rng_stream(seed, FADING_STREAM, drop, t)``, so results do not depend on how trials
are split across worker threads. The quadratic forms that the SINR needs are
computed once per trial by :func:`lowres_mimo.kernels.mrc_terms`; SE for any
quantizer or power level is then a cheap array expression over those terms.
"""
from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .channel import complex_normal, rician_mix, steering_matrix
from .estimation import ChannelEstimate, estimate_gain, error_variance, pilot_noise_std
from .quantization import QuantizerModel
from .scenario import FADING_STREAM, SystemConfig, UserLink, effective_power, rng_stream, user_arrays

DEFAULT_TRIALS = 10_000
BLOCK_TRIALS = 64  # trials per work unit; fixed so the partition is thread-count independent


class DegenerateChannelError(ValueError):
    """An all-zero combiner column was supplied."""


class CSI(enum.Enum):
    PERFECT = "perfect"
    IMPERFECT = "imperfect"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        return cls(str(value).lower())


@dataclass(frozen=True, eq=False)
class SEResult:
    """Per-user and sum SE (bits/s/Hz) with standard errors of the mean."""

    per_user_se: np.ndarray
    stderr: np.ndarray
    sum_se: float
    sum_stderr: float
    trials: int


@dataclass(frozen=True, eq=False)
class TrialTerms:
    """Per-trial, per-user ingredients of the MRC SINR, each shaped (T, N).

    ``norm`` is ``||a_n||^2``, ``interference`` is ``sum_{i != n} |a_n^H a_i|^2``
    and ``quad`` is ``a_n^H diag(G G^H) a_n`` with ``G`` the true channel.
    ``sigma_sum`` is ``sum_i sigma_i^2`` (0 under perfect CSI).
    """

    norm: np.ndarray
    interference: np.ndarray
    quad: np.ndarray
    csi: CSI
    sigma_sum: float = 0.0
    p_p: float | None = None

    @property
    def trials(self):
        return self.norm.shape[0]


def sinr_from_terms(norm, interference, quad, q: QuantizerModel, p_u: float, sigma_sum: float = 0.0):
    """MRC SINR given the quadratic forms.

    Perfect CSI is the ``sigma_sum = 0`` case. The noise and quantization
    terms ``kappa ||a||^2 + rho a^H diag(p_u G G^H + I) a`` are written out
    as in the imperfect-CSI expression, which reduces to ``||a||^2 + rho p_u
    a^H diag(G G^H) a`` when ``kappa + rho = 1``.
    """
    kappa, rho = q.kappa, q.rho
    signal = kappa * p_u * norm**2
    psi = (
        kappa * p_u * interference
        + kappa * p_u * norm * sigma_sum
        + kappa * norm
        + rho * (p_u * quad + norm)
    )
    return signal / psi


def _check_columns(norm):
    if np.any(norm <= 0):
        raise DegenerateChannelError("MRC combiner has an all-zero column")


def sinr_perfect(G, n: int, q: QuantizerModel, p_u: float) -> float:
    """SINR of user ``n`` with MRC on a perfectly known channel ``G`` (M x N)."""
    G = np.ascontiguousarray(np.asarray(G, dtype=np.complex128)[None])
    norm, intf, quad = kernels.mrc_terms(G, G)
    if norm[0, n] <= 0:
        raise DegenerateChannelError(f"channel column {n} is zero")
    return float(sinr_from_terms(norm[0, n], intf[0, n], quad[0, n], q, p_u))


def sinr_imperfect(est: ChannelEstimate, n: int, q: QuantizerModel, p_u: float) -> float:
    """SINR of user ``n`` with MRC on the estimate ``est.G_hat``."""
    A = np.ascontiguousarray(np.asarray(est.G_hat, dtype=np.complex128)[None])
    B = np.ascontiguousarray(np.asarray(est.G_hat - est.Xi, dtype=np.complex128)[None])
    norm, intf, quad = kernels.mrc_terms(A, B)
    if norm[0, n] <= 0:
        raise DegenerateChannelError(f"estimated channel column {n} is zero")
    return float(
        sinr_from_terms(norm[0, n], intf[0, n], quad[0, n], q, p_u, float(np.sum(est.sigma_sq)))
    )


def _block_terms(seed, drop, start, stop, M, H_bar, beta, k, csi, p_p):
    N = H_bar.shape[1]
    T = stop - start
    Hw = np.empty((T, M, N), dtype=np.complex128)
    Wp = np.empty((T, M, N), dtype=np.complex128) if csi is CSI.IMPERFECT else None
    for j, t in enumerate(range(start, stop)):
        rng = rng_stream(seed, FADING_STREAM, drop, t)
        Hw[j] = complex_normal(rng, (M, N))
        if Wp is not None:
            Wp[j] = complex_normal(rng, (M, N))
    G = rician_mix(H_bar, Hw, beta, k)
    if csi is CSI.PERFECT:
        return kernels.mrc_terms(G, G)
    mean = H_bar * np.sqrt(k * beta / (k + 1.0))
    eta = estimate_gain(beta, p_p)
    Y = G + Wp * pilot_noise_std(k, p_p)
    G_hat = np.ascontiguousarray(mean + eta * (Y - mean))
    return kernels.mrc_terms(G_hat, G)


def simulate_terms(
    config: SystemConfig,
    users: Sequence[UserLink],
    csi=CSI.PERFECT,
    trials: int = DEFAULT_TRIALS,
    M: int | None = None,
    p_u: float | None = None,
    threads: int = 1,
    drop_index: int = 0,
) -> TrialTerms:
    """Draw ``trials`` channel realizations and return their MRC quadratic forms.

    ``M`` and ``p_u`` override the config (``p_u`` only matters for the pilot
    power under imperfect CSI). ``drop_index`` keys the fading streams so that
    independent user drops see independent fading. Output is bit-identical
    for any ``threads``.
    """
    csi = CSI.parse(csi)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not users:
        raise ValueError("need at least one user")
    M = config.num_antennas if M is None else int(M)
    if p_u is None:
        p_u = effective_power(config, M)
    beta, k, theta = user_arrays(users)
    H_bar = steering_matrix(M, theta, config.d_over_lambda)
    p_p = config.pilot_length * p_u
    N = len(users)
    norm = np.empty((trials, N))
    intf = np.empty((trials, N))
    quad = np.empty((trials, N))
    blocks = [(s, min(s + BLOCK_TRIALS, trials)) for s in range(0, trials, BLOCK_TRIALS)]

    def work(block):
        s, e = block
        nb, ib, qb = _block_terms(config.rng_seed, drop_index, s, e, M, H_bar, beta, k, csi, p_p)
        norm[s:e], intf[s:e], quad[s:e] = nb, ib, qb

    if threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, blocks))
    else:
        for b in blocks:
            work(b)
    _check_columns(norm)
    if csi is CSI.PERFECT:
        return TrialTerms(norm, intf, quad, csi)
    sigma_sum = float(np.sum(error_variance(beta, k, p_p)))
    return TrialTerms(norm, intf, quad, csi, sigma_sum=sigma_sum, p_p=p_p)


def se_from_terms(terms: TrialTerms, q: QuantizerModel, p_u: float) -> SEResult:
    """Average ``log2(1 + SINR)`` over the trials in ``terms``."""
    if terms.csi is CSI.IMPERFECT and terms.p_p is None:
        raise ValueError("imperfect-CSI terms must carry their pilot power")
    rates = np.log2(1.0 + sinr_from_terms(terms.norm, terms.interference, terms.quad, q, p_u, terms.sigma_sum))
    T = rates.shape[0]
    per_user = np.mean(rates, axis=0)
    sums = np.sum(rates, axis=1)
    if T > 1:
        stderr = np.std(rates, axis=0, ddof=1) / math.sqrt(T)
        sum_stderr = float(np.std(sums, ddof=1) / math.sqrt(T))
    else:
        stderr = np.zeros_like(per_user)
        sum_stderr = 0.0
    return SEResult(
        per_user_se=per_user,
        stderr=stderr,
        sum_se=float(np.sum(per_user)),
        sum_stderr=sum_stderr,
        trials=T,
    )


def monte_carlo_se(
    config: SystemConfig,
    users: Sequence[UserLink],
    q: QuantizerModel,
    csi=CSI.PERFECT,
    trials: int = DEFAULT_TRIALS,
    threads: int = 1,
    M: int | None = None,
) -> SEResult:
    """Ergodic SE per user for MRC, averaged over ``trials`` fading draws.

    The user drop stays fixed; only small-scale fading (and, under imperfect
    CSI, pilot noise) is redrawn per trial.
    """
    if trials < 100:
        raise ValueError("monte_carlo_se needs at least 100 trials")
    M = config.num_antennas if M is None else int(M)
    p_u = effective_power(config, M)
    terms = simulate_terms(config, users, csi, trials, M=M, p_u=p_u, threads=threads)
    return se_from_terms(terms, q, p_u)
