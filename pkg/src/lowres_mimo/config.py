"""INI configuration file with ``[system]``, ``[geometry]``, ``[quantizer]`` and ``[experiment]``.

Powers and K-factors are given in dB here and converted to linear values on
load. See ``default.ini`` in this package for every key and its default.
"""
from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

from .scenario import CellGeometry, Fixed, ScaledByM, SystemConfig

SWEEP_VARIABLES = ("M", "bits", "K_db", "alpha")
CSI_CHOICES = ("perfect", "imperfect", "both")


class ConfigError(ValueError):
    """Invalid configuration value."""


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def parse_bits(text) -> float:
    s = str(text).strip().lower()
    if s in ("inf", "infinite", "infinity", "none"):
        return math.inf
    try:
        b = int(s)
    except ValueError:
        raise ConfigError(f"ADC resolution must be an integer or 'inf', got {text!r}") from None
    if b < 1:
        raise ConfigError(f"ADC resolution must be >= 1, got {b}")
    return b


def _floats(text) -> tuple:
    return tuple(float(v) for v in str(text).replace(",", " ").split())


def _bits_list(text) -> tuple:
    return tuple(parse_bits(v) for v in str(text).replace(",", " ").split())


@dataclass(frozen=True)
class ExperimentSpec:
    name: str = "experiment"
    sweep: str = "M"
    grid: tuple = (32.0, 64.0, 128.0, 256.0, 512.0)
    csi: str = "perfect"
    trials: int = 10_000
    output_path: str | None = None
    normalize_to_ideal: bool = False
    m_grid: tuple = (32, 64, 128, 256, 512)
    bits_grid: tuple = (1, 2, math.inf)
    k_db_grid: tuple = (-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0)
    drops: int = 1
    source: str = "analytic"  # fig2 SE source: analytic or sim

    def __post_init__(self):
        if self.sweep not in SWEEP_VARIABLES:
            raise ConfigError(f"sweep must be one of {SWEEP_VARIABLES}, got {self.sweep!r}")
        if self.csi not in CSI_CHOICES:
            raise ConfigError(f"csi must be one of {CSI_CHOICES}, got {self.csi!r}")
        for label, g in (("grid", self.grid), ("m_grid", self.m_grid), ("bits_grid", self.bits_grid),
                         ("k_db_grid", self.k_db_grid)):
            if not g:
                raise ConfigError(f"{label} must be nonempty")
            if list(g) != sorted(g):
                raise ConfigError(f"{label} must be sorted ascending")
        if self.trials < 100:
            raise ConfigError(f"trials must be >= 100, got {self.trials}")
        if self.drops < 1:
            raise ConfigError("drops must be >= 1")
        if self.source not in ("analytic", "sim"):
            raise ConfigError(f"source must be 'analytic' or 'sim', got {self.source!r}")


@dataclass(frozen=True)
class Settings:
    """Everything a CLI run needs, in linear units."""

    system: SystemConfig = field(default_factory=SystemConfig)
    geometry: CellGeometry = field(default_factory=CellGeometry)
    rician_k: float = 10.0
    rho_source: str = "model"
    empirical_samples: int = 1_000_000
    experiment: ExperimentSpec = field(default_factory=ExperimentSpec)

    def with_seed(self, seed: int) -> "Settings":
        return replace(self, system=replace(self.system, rng_seed=int(seed)))

    def with_trials(self, trials: int) -> "Settings":
        try:
            return replace(self, experiment=replace(self.experiment, trials=int(trials)))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None


def default_ini_text() -> str:
    return resources.files("lowres_mimo").joinpath("default.ini").read_text(encoding="utf-8")


def _parser(path=None) -> configparser.ConfigParser:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.read_string(default_ini_text())
    if path is not None:
        p = Path(path)
        if not p.is_file():
            raise ConfigError(f"config file not found: {p}")
        cp.read(p, encoding="utf-8")
    return cp


def load_settings(path=None) -> Settings:
    """Read a config file on top of the packaged defaults."""
    cp = _parser(path)
    try:
        s = cp["system"]
        mode = s.get("power_scaling").strip().lower()
        if mode == "fixed":
            scaling = Fixed()
            p_u = db_to_linear(s.getfloat("transmit_power_db"))
        elif mode == "scaled":
            scaling = ScaledByM(s.getfloat("alpha"))
            p_u = None
        else:
            raise ConfigError(f"power_scaling must be 'fixed' or 'scaled', got {mode!r}")
        system = SystemConfig(
            num_antennas=s.getint("num_antennas"),
            num_users=s.getint("num_users"),
            transmit_power=p_u,
            adc_bits=parse_bits(s.get("adc_bits")),
            pilot_length=s.getint("pilot_length"),
            coherence_interval=s.getint("coherence_interval"),
            power_scaling=scaling,
            reference_energy=db_to_linear(s.getfloat("reference_energy_db")),
            rng_seed=s.getint("rng_seed"),
            d_over_lambda=s.getfloat("d_over_lambda"),
        )
        g = cp["geometry"]
        geometry = CellGeometry(
            radius=g.getfloat("radius"),
            r_min=g.getfloat("r_min"),
            pathloss_exponent=g.getfloat("pathloss_exponent"),
            shadow_std_db=g.getfloat("shadow_std_db"),
        )
        q = cp["quantizer"]
        rho_source = q.get("rho_source").strip().lower()
        if rho_source not in ("model", "empirical"):
            raise ConfigError(f"rho_source must be 'model' or 'empirical', got {rho_source!r}")
        e = cp["experiment"]
        out = e.get("output", fallback="").strip() or None
        experiment = ExperimentSpec(
            name=e.get("name"),
            sweep=e.get("sweep").strip(),
            grid=_floats(e.get("grid")),
            csi=e.get("csi").strip().lower(),
            trials=e.getint("trials"),
            output_path=out,
            normalize_to_ideal=e.getboolean("normalize_to_ideal"),
            m_grid=tuple(int(v) for v in _floats(e.get("m_grid"))),
            bits_grid=_bits_list(e.get("bits_grid")),
            k_db_grid=_floats(e.get("k_db_grid")),
            drops=e.getint("drops"),
            source=e.get("source").strip().lower(),
        )
        return Settings(
            system=system,
            geometry=geometry,
            rician_k=db_to_linear(s.getfloat("rician_k_db")),
            rho_source=rho_source,
            empirical_samples=q.getint("empirical_samples"),
            experiment=experiment,
        )
    except ConfigError:
        raise
    except (ValueError, KeyError, configparser.Error) as exc:
        raise ConfigError(str(exc)) from None
