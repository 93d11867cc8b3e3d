"""Command-line entry point: ``lowres-mimo <subcommand> [options]``."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import experiments
from .config import ConfigError, load_settings, parse_bits


def _common(parser):
    parser.add_argument("--config", help="INI config file (defaults are packaged)")
    parser.add_argument("--seed", type=int, help="override [system] rng_seed")
    parser.add_argument("--trials", type=int, help="override [experiment] trials")
    parser.add_argument("--out", help="output CSV path (stdout if omitted)")
    parser.add_argument("--threads", type=int, default=1, help="worker threads for Monte Carlo trials")
    parser.add_argument("--json", action="store_true", help="also write a vega-lite descriptor next to --out")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lowres-mimo",
        description="Uplink SE of massive MIMO with low-resolution ADCs over Rician fading.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("fig1", "SE vs number of antennas for b = 1, 2, inf (simulated and analytic)"),
        ("fig2", "SE normalized to ideal ADCs vs Rician K-factor"),
        ("sweep", "sweep one variable from [experiment] (M, bits, K_db or alpha)"),
    ):
        _common(sub.add_parser(name, help=help_))
    p = sub.add_parser("rho-table", help="distortion factor and gain per ADC resolution")
    p.add_argument("--max-bits", type=int, default=12)
    p.add_argument("--out")
    p = sub.add_parser("validate-aqnm", help="actual Lloyd-Max quantizer distortion vs model")
    p.add_argument("--bits", default="1,2,3,4,5,6,7,8", help="comma-separated resolutions in 1..8")
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--tolerance", type=float, default=1e-3)
    p.add_argument("--out")
    sub.add_parser("selftest", help="run the built-in oracle checks")
    return parser


def _settings(args):
    settings = load_settings(args.config)
    if args.seed is not None:
        settings = settings.with_seed(args.seed)
    if args.trials is not None:
        settings = settings.with_trials(args.trials)
    return settings


def _emit(header, rows, out):
    text = experiments.write_csv(header, rows, out)
    if out is None:
        sys.stdout.write(text)


def _descriptor(args, header, x, y, color):
    if args.json and args.out:
        path = Path(args.out).with_suffix(".json")
        experiments.write_plot_descriptor(path, experiments.plot_descriptor(args.out, header, x, y, color))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command in ("fig1", "fig2", "sweep"):
            if args.threads < 1:
                raise ConfigError("--threads must be >= 1")
            settings = _settings(args)
            out = args.out or settings.experiment.output_path
            args.out = out
            if args.command == "fig1":
                header, rows = experiments.run_fig1(settings, threads=args.threads)
                _descriptor(args, header, "M", "se_sim", "b")
            elif args.command == "fig2":
                header, rows = experiments.run_fig2(settings, threads=args.threads)
                _descriptor(args, header, "K_db", "ratio", "b")
            else:
                header, rows = experiments.run_sweep(settings, threads=args.threads)
                _descriptor(args, header, "value", "se_sim", "csi")
            _emit(header, rows, out)
            return 0
        if args.command == "rho-table":
            if not 1 <= args.max_bits <= 12:
                raise ConfigError("--max-bits must lie in 1..12")
            _emit(*experiments.rho_table(args.max_bits), args.out)
            return 0
        if args.command == "validate-aqnm":
            bits = [parse_bits(b) for b in args.bits.split(",") if b.strip()]
            header, rows = experiments.run_validate_aqnm(bits, args.samples, args.seed)
            _emit(header, rows, args.out)
            bad = [r for r in rows if r[3] >= args.tolerance]
            for r in bad:
                print(f"validate-aqnm: b={r[0]} abs_error={r[3]:.3g} exceeds {args.tolerance:g}", file=sys.stderr)
            return 1 if bad else 0
        if args.command == "selftest":
            from .selftest import run_selftest

            return 0 if run_selftest() else 1
    except (ConfigError, ValueError, OSError) as exc:
        print(f"lowres-mimo: error: {exc}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
