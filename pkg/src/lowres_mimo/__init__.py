"""Uplink spectral efficiency of massive MIMO with low-resolution ADCs.

Monte Carlo evaluation of the MRC SINR under the additive quantization noise
model, closed-form approximations, and the tooling to compare the two.
"""
from .analytic import (
    AnalyticInputs,
    LimitKind,
    se_imperfect_approx,
    se_limit,
    se_perfect_approx,
)
from .channel import ChannelRealization, draw_channel, phi, steering_matrix
from .estimation import ChannelEstimate, mmse_estimate, pilot_observe
from .kernels import BACKEND
from .quantization import QuantizerModel, ScalarQuantizer, design_lloyd_max, rho_for_bits
from .scenario import CellGeometry, Fixed, ScaledByM, SystemConfig, UserLink, drop_users, effective_power
from .spectral_efficiency import CSI, SEResult, monte_carlo_se, sinr_imperfect, sinr_perfect

__version__ = "0.1.0"

__all__ = [
    "AnalyticInputs",
    "BACKEND",
    "CSI",
    "CellGeometry",
    "ChannelEstimate",
    "ChannelRealization",
    "Fixed",
    "LimitKind",
    "QuantizerModel",
    "SEResult",
    "ScalarQuantizer",
    "ScaledByM",
    "SystemConfig",
    "UserLink",
    "design_lloyd_max",
    "draw_channel",
    "drop_users",
    "effective_power",
    "mmse_estimate",
    "monte_carlo_se",
    "phi",
    "pilot_observe",
    "rho_for_bits",
    "se_imperfect_approx",
    "se_limit",
    "se_perfect_approx",
    "sinr_imperfect",
    "sinr_perfect",
    "steering_matrix",
]
