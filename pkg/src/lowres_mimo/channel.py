"""Uniform linear array steering matrix and Rician channel draws."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .scenario import UserLink, user_arrays

PHI_EPS = 1e-9


def complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    """i.i.d. CN(0, 1) samples."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)


def steering_matrix(M: int, thetas, d_over_lambda: float = 0.5) -> np.ndarray:
    """LoS matrix with entries ``exp(-j (m-1) k sin(theta_n))``, ``k = 2 pi d / lambda``."""
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    if thetas.size == 0:
        raise ValueError("need at least one arrival angle")
    if M < 1:
        raise ValueError("M must be >= 1")
    if d_over_lambda <= 0:
        raise ValueError("d_over_lambda must be positive")
    k = 2.0 * math.pi * d_over_lambda
    m = np.arange(M)[:, None]
    return np.exp(-1j * m * k * np.sin(thetas)[None, :])


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """One draw of ``G = H D^{1/2}`` together with its LoS and scatter parts."""

    G: np.ndarray
    H_bar: np.ndarray
    H_omega: np.ndarray
    users: tuple

    @property
    def shape(self):
        return self.G.shape

    def los_part(self):
        """Deterministic mean of ``G``: ``sqrt(K beta / (K + 1)) h_bar`` per column."""
        beta, k, _ = user_arrays(self.users)
        return self.H_bar * np.sqrt(k * beta / (k + 1.0))


def rician_mix(H_bar, H_omega, beta, k):
    """Combine LoS and scatter components column-wise and apply ``sqrt(beta)``.

    ``H_omega`` may carry leading batch axes; the user axis is the last one.
    """
    los = np.sqrt(k / (k + 1.0))
    scat = np.sqrt(1.0 / (k + 1.0))
    return (H_bar * los + H_omega * scat) * np.sqrt(beta)


def draw_channel(
    users: Sequence[UserLink],
    M: int,
    d_over_lambda: float,
    rng: np.random.Generator,
    H_bar: np.ndarray | None = None,
) -> ChannelRealization:
    """Draw one Rician realization for ``users`` on an ``M``-element ULA.

    Column ``n`` of ``H`` is ``sqrt(K/(K+1)) h_bar_n + sqrt(1/(K+1)) w_n`` with
    ``w_n ~ CN(0, I_M)``; ``G`` scales it by ``sqrt(beta_n)``. A precomputed
    ``H_bar`` may be passed to skip rebuilding the steering matrix.
    """
    if not users:
        raise ValueError("need at least one user")
    beta, k, theta = user_arrays(users)
    if H_bar is None:
        H_bar = steering_matrix(M, theta, d_over_lambda)
    H_omega = complex_normal(rng, (M, len(users)))
    G = rician_mix(H_bar, H_omega, beta, k)
    return ChannelRealization(G=G, H_bar=H_bar, H_omega=H_omega, users=tuple(users))


def phi(M: int, theta_n, theta_i):
    """Dirichlet kernel ``sin(M pi x / 2) / sin(pi x / 2)``, ``x = sin(theta_n) - sin(theta_i)``.

    The zeros of the denominator (``x`` an even integer ``2k``, which includes
    the grating lobe at ``theta = +-pi/2``) are removable singularities where
    the kernel equals ``(-1)**(k (M - 1)) M``. Its magnitude is
    ``|h_bar_n^H h_bar_i|`` for half-wavelength spacing. Broadcasts over array
    arguments.
    """
    x = np.sin(np.asarray(theta_n, dtype=float)) - np.sin(np.asarray(theta_i, dtype=float))
    k = np.round(x / 2.0)
    small = np.abs(x - 2.0 * k) < PHI_EPS
    safe = np.where(small, 1.0, x)
    with np.errstate(invalid="ignore", divide="ignore"):
        val = np.sin(M * math.pi * safe / 2.0) / np.sin(math.pi * safe / 2.0)
    sign = np.where((k * (M - 1)) % 2 == 0, 1.0, -1.0)
    out = np.where(small, sign * float(M), val)
    return float(out) if out.ndim == 0 else out


def write_realization_csv(path, G) -> None:
    """Dump a complex matrix as CSV.

    The first row is ``M,N``; each of the following ``M`` rows holds the
    row-major entries as interleaved ``re,im`` pairs.
    """
    G = np.asarray(G, dtype=complex)
    M, N = G.shape
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow([M, N])
        for row in G:
            w.writerow([repr(float(v)) for z in row for v in (z.real, z.imag)])


def read_realization_csv(path) -> np.ndarray:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    M, N = (int(v) for v in rows[0])
    vals = np.array([[float(v) for v in r] for r in rows[1 : M + 1]])
    if vals.shape != (M, 2 * N):
        raise ValueError(f"expected {M}x{2 * N} values, got {vals.shape}")
    return vals[:, 0::2] + 1j * vals[:, 1::2]
