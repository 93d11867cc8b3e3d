"""Parameter sweeps behind the CLI subcommands.

Each runner returns ``(header, rows)``; :func:`write_csv` serializes them.
Floats are written with ``repr`` so output is exact and reproducible.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import replace
from pathlib import Path

import numpy as np

from .analytic import AnalyticInputs, se_imperfect_approx_all, se_perfect_approx_all
from .config import Settings, db_to_linear
from .quantization import QuantizerModel, empirical_distortion, rho_for_bits
from .scenario import AQNM_STREAM, DEFAULT_TRANSMIT_POWER, Fixed, ScaledByM, drop_users, rng_stream
from .spectral_efficiency import CSI, se_from_terms, simulate_terms

FIG1_HEADER = ("M", "b", "power_mode", "se_sim", "se_sim_stderr", "se_analytic")
FIG2_HEADER = ("K_db", "M", "b", "power_mode", "se", "se_ideal", "ratio")
SWEEP_HEADER = ("variable", "value", "csi", "se_sim", "se_sim_stderr", "se_analytic")
AQNM_HEADER = ("b", "rho_model", "rho_empirical", "abs_error")
RHO_HEADER = ("b", "rho", "kappa")

POWER_MODES = ("fixed", "scaled")


def fmt(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if math.isinf(v):
        return "inf"
    if v.is_integer() and abs(v) < 2**53:
        return str(int(v))
    return repr(v)


def bits_label(b):
    return "inf" if math.isinf(b) else str(int(b))


def write_csv(header, rows, path=None) -> str:
    """Write rows as UTF-8 CSV (to ``path`` when given) and return the text."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def plot_descriptor(csv_path, header, x, y, color=None) -> dict:
    """Minimal vega-lite line-chart descriptor pointing at a CSV file."""
    enc = {
        "x": {"field": x, "type": "quantitative"},
        "y": {"field": y, "type": "quantitative"},
    }
    if color is not None:
        enc["color"] = {"field": color, "type": "nominal"}
    return {
        "$schema": "https://vega.github.io/schema/vega-lite/v5.json",
        "data": {"url": str(csv_path), "format": {"type": "csv"}},
        "mark": {"type": "line", "point": True},
        "encoding": enc,
        "columns": list(header),
    }


def write_plot_descriptor(path, descriptor):
    Path(path).write_text(json.dumps(descriptor, indent=2) + "\n", encoding="utf-8")


def quantizer_for(settings: Settings, bits) -> QuantizerModel:
    if math.isinf(bits):
        return QuantizerModel.ideal()
    if settings.rho_source == "empirical":
        rng = rng_stream(settings.system.rng_seed, AQNM_STREAM, int(bits))
        return QuantizerModel(int(bits), empirical_distortion(int(bits), settings.empirical_samples, rng))
    return QuantizerModel.from_bits(bits)


def users_for(settings: Settings, drop: int = 0, rician_k=None):
    k = settings.rician_k if rician_k is None else rician_k
    return drop_users(settings.geometry, settings.system.num_users, settings.system.rng_seed, k, drop_index=drop)


def _power(settings: Settings, mode: str, M: int, alpha: float = 1.0) -> float:
    if mode == "fixed":
        if isinstance(settings.system.power_scaling, Fixed):
            return float(settings.system.transmit_power)
        return DEFAULT_TRANSMIT_POWER
    return settings.system.reference_energy / M**alpha


def _combine(results):
    """Average per-drop (mean, stderr) pairs."""
    means = np.array([m for m, _ in results])
    errs = np.array([e for _, e in results])
    D = len(results)
    return float(np.mean(means)), float(math.sqrt(np.sum(errs**2)) / D)


def run_fig1(settings: Settings, threads: int = 1):
    """Sum SE against M for each ADC resolution, fixed and scaled power, perfect CSI."""
    exp = settings.experiment
    qs = [quantizer_for(settings, b) for b in exp.bits_grid]
    acc = {}
    for d in range(exp.drops):
        users = users_for(settings, d)
        for M in exp.m_grid:
            terms = simulate_terms(settings.system, users, CSI.PERFECT, exp.trials, M=M, threads=threads, drop_index=d)
            for mode in POWER_MODES:
                p_u = _power(settings, mode, M)
                for q in qs:
                    sim = se_from_terms(terms, q, p_u)
                    ana = float(np.sum(se_perfect_approx_all(AnalyticInputs(users, M, q, p_u))))
                    acc.setdefault((M, q.label, mode), []).append((sim.sum_se, sim.sum_stderr, ana))
    rows = []
    for M in exp.m_grid:
        for mode in POWER_MODES:
            for q in qs:
                vals = acc[(M, q.label, mode)]
                se, err = _combine([(v[0], v[1]) for v in vals])
                ana = float(np.mean([v[2] for v in vals]))
                rows.append((M, q.label, mode, se, err, ana))
    return FIG1_HEADER, rows


def run_fig2(settings: Settings, threads: int = 1):
    """SE normalized to the ideal-ADC SE against the K-factor."""
    exp = settings.experiment
    qs = [quantizer_for(settings, b) for b in exp.bits_grid]
    ideal = QuantizerModel.ideal()
    acc = {}
    for d in range(exp.drops):
        base = users_for(settings, d)
        for k_db in exp.k_db_grid:
            users = [replace(u, rician_k=db_to_linear(k_db)) for u in base]
            for M in exp.m_grid:
                terms = None
                if exp.source == "sim":
                    terms = simulate_terms(settings.system, users, CSI.PERFECT, exp.trials, M=M,
                                           threads=threads, drop_index=d)
                for mode in POWER_MODES:
                    p_u = _power(settings, mode, M)

                    def sum_se(q):
                        if terms is not None:
                            return se_from_terms(terms, q, p_u).sum_se
                        return float(np.sum(se_perfect_approx_all(AnalyticInputs(users, M, q, p_u))))

                    se_ideal = sum_se(ideal)
                    for q in qs:
                        se = se_ideal if math.isinf(q.bits) else sum_se(q)
                        acc.setdefault((k_db, M, q.label, mode), []).append((se, se_ideal))
    rows = []
    for k_db in exp.k_db_grid:
        for M in exp.m_grid:
            for q in qs:
                for mode in POWER_MODES:
                    vals = acc[(k_db, M, q.label, mode)]
                    se = float(np.mean([v[0] for v in vals]))
                    se_ideal = float(np.mean([v[1] for v in vals]))
                    rows.append((k_db, M, q.label, mode, se, se_ideal, se / se_ideal))
    return FIG2_HEADER, rows


def sweep_point(settings: Settings, variable: str, value: float):
    """``(users_k, M, bits, p_u)`` for one grid value of the swept variable."""
    sysc = settings.system
    M, bits, k_lin = sysc.num_antennas, sysc.adc_bits, settings.rician_k
    alpha = sysc.power_scaling.alpha if isinstance(sysc.power_scaling, ScaledByM) else None
    if variable == "M":
        M = int(value)
    elif variable == "bits":
        bits = value
    elif variable == "K_db":
        k_lin = db_to_linear(value)
    elif variable == "alpha":
        alpha = float(value)
        ScaledByM(alpha)  # validates the range
    if alpha is None:
        p_u = float(sysc.transmit_power)
    else:
        p_u = sysc.reference_energy / M**alpha
    return k_lin, M, bits, p_u


def run_sweep(settings: Settings, threads: int = 1):
    """Sum SE (simulated and analytic) over one swept variable."""
    exp = settings.experiment
    csis = [CSI.PERFECT, CSI.IMPERFECT] if exp.csi == "both" else [CSI.parse(exp.csi)]
    acc = {}
    for d in range(exp.drops):
        base = users_for(settings, d)
        for value in exp.grid:
            k_lin, M, bits, p_u = sweep_point(settings, exp.sweep, value)
            users = [replace(u, rician_k=k_lin) for u in base]
            q = quantizer_for(settings, bits)
            for csi in csis:
                terms = simulate_terms(settings.system, users, csi, exp.trials, M=M, p_u=p_u,
                                       threads=threads, drop_index=d)
                sim = se_from_terms(terms, q, p_u)
                if csi is CSI.PERFECT:
                    ana = se_perfect_approx_all(AnalyticInputs(users, M, q, p_u))
                else:
                    p_p = settings.system.pilot_length * p_u
                    ana = se_imperfect_approx_all(AnalyticInputs(users, M, q, p_u, p_p))
                acc.setdefault((value, csi), []).append((sim.sum_se, sim.sum_stderr, float(np.sum(ana))))
    rows = []
    for value in exp.grid:
        for csi in csis:
            vals = acc[(value, csi)]
            se, err = _combine([(v[0], v[1]) for v in vals])
            rows.append((exp.sweep, value, csi.value, se, err, float(np.mean([v[2] for v in vals]))))
    return SWEEP_HEADER, rows


def rho_table(max_bits: int = 12):
    rows = []
    for b in range(1, max_bits + 1):
        rho = rho_for_bits(b)
        rows.append((b, rho, 1.0 - rho))
    return RHO_HEADER, rows


def run_validate_aqnm(bits=range(1, 9), samples: int = 1_000_000, seed: int = 1):
    """Distortion of the actual quantizer on Gaussian samples against the model value."""
    rows = []
    for b in bits:
        if math.isinf(b):
            continue
        b = int(b)
        if not 1 <= b <= 8:
            raise ValueError(f"validate-aqnm supports 1..8 bits, got {b}")
        model = rho_for_bits(b)
        emp = empirical_distortion(b, samples, rng_stream(seed, AQNM_STREAM, b))
        rows.append((b, model, emp, abs(emp - model)))
    return AQNM_HEADER, rows
