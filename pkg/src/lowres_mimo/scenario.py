"""System configuration and user drops in a single hexagonal cell.

All quantities are linear and noise-normalized. dB values are converted at the
config/CLI boundary only (see :mod:`lowres_mimo.config`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

# stream tags mixed into the seed so independent draws never share a sequence
DROP_STREAM = 0
FADING_STREAM = 1
AQNM_STREAM = 2


def rng_stream(seed: int, *keys: int) -> np.random.Generator:
    """Generator for the sub-stream identified by ``(seed, *keys)``.

    Streams are derived with :class:`numpy.random.SeedSequence`, so any
    ``(seed, key...)`` tuple reproduces the same draws regardless of the order
    in which streams are requested.
    """
    return np.random.default_rng(np.random.SeedSequence([int(seed) & (2**64 - 1), *keys]))


@dataclass(frozen=True)
class Fixed:
    """Per-user transmit power does not depend on the array size."""


@dataclass(frozen=True)
class ScaledByM:
    """Per-user transmit power ``E_u / M**alpha``."""

    alpha: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")


PowerScaling = Union[Fixed, ScaledByM]

DEFAULT_TRANSMIT_POWER = 10.0  # 10 dB
DEFAULT_REFERENCE_ENERGY = 10.0  # 10 dB


@dataclass(frozen=True)
class UserLink:
    """Large-scale gain, Rician K-factor and arrival angle of one user."""

    beta: float
    rician_k: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if not self.rician_k >= 0:
            raise ValueError(f"rician_k must be >= 0, got {self.rician_k}")
        if abs(self.theta) > math.pi / 2 + 1e-12:
            raise ValueError(f"theta must lie in [-pi/2, pi/2], got {self.theta}")


@dataclass(frozen=True)
class CellGeometry:
    """Hexagonal cell with pathloss ``(r / r_min)**-v`` and log-normal shadowing.

    ``shadow_std_db`` is the standard deviation of the shadowing in dB.
    """

    radius: float = 1000.0
    r_min: float = 100.0
    pathloss_exponent: float = 3.8
    shadow_std_db: float = 8.0

    def __post_init__(self):
        if not 0 < self.r_min < self.radius:
            raise ValueError(f"need 0 < r_min < radius, got r_min={self.r_min}, radius={self.radius}")
        if not self.pathloss_exponent > 2:
            raise ValueError(f"pathloss exponent must exceed 2, got {self.pathloss_exponent}")
        if not self.shadow_std_db >= 0:
            raise ValueError(f"shadow_std_db must be >= 0, got {self.shadow_std_db}")

    def contains(self, x, y):
        """Vectorized test for points inside the hexagon (vertices on the x axis)."""
        ax, ay = np.abs(x), np.abs(y)
        s3 = math.sqrt(3.0)
        return (ay <= s3 / 2 * self.radius) & (s3 * ax + ay <= s3 * self.radius)

    def large_scale_gain(self, r, shadowing):
        return np.asarray(shadowing) * (np.asarray(r) / self.r_min) ** (-self.pathloss_exponent)


@dataclass(frozen=True)
class SystemConfig:
    """Global simulation parameters.

    Under :class:`ScaledByM` the transmit power is derived from
    ``reference_energy`` and must not be given explicitly.
    ``coherence_interval`` is carried for completeness; no pilot-overhead
    prefactor is applied to SE.
    """

    num_antennas: int = 128
    num_users: int = 10
    transmit_power: float | None = None
    adc_bits: float = 2
    pilot_length: int = 10
    coherence_interval: int = 200
    power_scaling: PowerScaling = field(default_factory=Fixed)
    reference_energy: float = DEFAULT_REFERENCE_ENERGY
    rng_seed: int = 1
    d_over_lambda: float = 0.5

    def __post_init__(self):
        if self.num_antennas < 1:
            raise ValueError("num_antennas must be >= 1")
        if self.num_users < 1:
            raise ValueError("num_users must be >= 1")
        if self.pilot_length < self.num_users:
            raise ValueError(
                f"pilot_length ({self.pilot_length}) must be >= num_users ({self.num_users}) "
                "for orthogonal pilots"
            )
        if not (self.adc_bits == math.inf or (self.adc_bits >= 1 and float(self.adc_bits).is_integer())):
            raise ValueError(f"adc_bits must be a positive integer or inf, got {self.adc_bits}")
        if isinstance(self.power_scaling, ScaledByM):
            if self.transmit_power is not None:
                raise ValueError("transmit_power is derived under ScaledByM; set reference_energy instead")
            if not self.reference_energy > 0:
                raise ValueError("reference_energy must be positive")
        else:
            if self.transmit_power is None:
                object.__setattr__(self, "transmit_power", DEFAULT_TRANSMIT_POWER)
            if not self.transmit_power > 0:
                raise ValueError("transmit_power must be positive")
        if not self.d_over_lambda > 0:
            raise ValueError("d_over_lambda must be positive")

    @property
    def pilot_power(self):
        """Pilot energy ``tau * p_u`` at the configured array size."""
        return self.pilot_length * effective_power(self)


def effective_power(config: SystemConfig, M: int | None = None) -> float:
    """Per-user transmit power for an ``M``-antenna array."""
    if M is None:
        M = config.num_antennas
    if M < 1:
        raise ValueError("M must be >= 1")
    scaling = config.power_scaling
    if isinstance(scaling, ScaledByM):
        return config.reference_energy / M ** scaling.alpha
    return float(config.transmit_power)


def sample_hexagon(geometry: CellGeometry, count: int, rng: np.random.Generator):
    """Uniform positions in the hexagon minus the ``r_min`` disc.

    Rejection sampling from the bounding box; accepted points keep their draw
    order so the result is a deterministic function of the generator state.
    """
    R = geometry.radius
    h = math.sqrt(3.0) / 2 * R
    xs, ys = [], []
    have = 0
    while have < count:
        batch = max(64, 2 * (count - have))
        x = rng.uniform(-R, R, batch)
        y = rng.uniform(-h, h, batch)
        ok = geometry.contains(x, y) & (np.hypot(x, y) >= geometry.r_min)
        xs.append(x[ok])
        ys.append(y[ok])
        have += int(ok.sum())
    return np.concatenate(xs)[:count], np.concatenate(ys)[:count]


def drop_users(
    geometry: CellGeometry,
    N: int,
    rng_seed: int,
    rician_k: float | Sequence[float] = 0.0,
    drop_index: int = 0,
) -> list[UserLink]:
    """Drop ``N`` users uniformly in the cell.

    Parameters
    ----------
    geometry : CellGeometry
        Cell radius, exclusion radius, pathloss exponent and shadowing spread.
    N : int
        Number of users, at least one.
    rng_seed : int
        Seed of the drop stream; equal seeds give equal drops.
    rician_k : float or sequence of float
        Linear K-factor assigned to every user (or one per user).
    drop_index : int
        Selects an independent drop for the same seed.

    Returns
    -------
    list of UserLink
        ``beta = s (r / r_min)**-v`` with ``s = 10**(shadow_std_db * z / 10)``,
        ``z ~ N(0, 1)``, and ``theta ~ U[-pi/2, pi/2]``.
    """
    if N < 1:
        raise ValueError(f"need at least one user, got N={N}")
    rng = rng_stream(rng_seed, DROP_STREAM, drop_index)
    x, y = sample_hexagon(geometry, N, rng)
    r = np.hypot(x, y)
    z = rng.standard_normal(N)
    shadowing = 10.0 ** (geometry.shadow_std_db * z / 10.0)
    beta = geometry.large_scale_gain(r, shadowing)
    theta = rng.uniform(-math.pi / 2, math.pi / 2, N)
    ks = np.broadcast_to(np.asarray(rician_k, dtype=float), (N,))
    return [UserLink(float(b), float(k), float(t)) for b, k, t in zip(beta, ks, theta)]


def user_arrays(users: Sequence[UserLink]):
    """``(beta, K, theta)`` as float arrays."""
    beta = np.array([u.beta for u in users], dtype=float)
    k = np.array([u.rician_k for u in users], dtype=float)
    theta = np.array([u.theta for u in users], dtype=float)
    return beta, k, theta
