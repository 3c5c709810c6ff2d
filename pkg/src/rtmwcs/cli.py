"""``python -m rtmwcs <command>``: single runs and the three Monte Carlo sweeps."""

from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import replace
from pathlib import Path

from .harness import (
    ExperimentConfig,
    WaveformFormatError,
    plot_summary,
    run_m_sweep,
    run_noise_sweep,
    run_sparsity_sweep,
    simulate,
    write_sweep,
)

log = logging.getLogger("rtmwcs")

# flag -> (config field, type)
_OVERRIDES = {
    "f_nyq": float,
    "L": int,
    "n_periods": int,
    "bandwidth": float,
    "K": int,
    "M": int,
    "snr": float,
    "trials": int,
    "max_bands": int,
    "residual_tol": float,
    "tau_jitter": int,
    "workers": int,
}


def _values(text: str | None, cast):
    if text is None:
        return None
    if ":" in text:
        lo, hi, *step = text.split(":")
        step = cast(step[0]) if step else cast(1)
        out, v = [], cast(lo)
        while v <= cast(hi) + 1e-9:
            out.append(v)
            v += step
        return out
    return [cast(v) for v in text.split(",") if v.strip()]


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rtmwcs", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file of configuration fields")
    common.add_argument("--profile", choices=["paper", "desk", "small"], default=None)
    common.add_argument("--seed", type=int, default=None, help="master seed")
    common.add_argument("--out-dir", default=None)
    for name, cast in _OVERRIDES.items():
        common.add_argument("--" + name.replace("_", "-"), dest=name, type=cast, default=None)
    common.add_argument("--misaligned", action="store_true", default=None,
                        help="ADC samples at the true offset instead of the quantized one")
    common.add_argument("--periodic", action="store_true", default=None,
                        help="strictly band-limited periodic test signals")
    common.add_argument("--chips", dest="chips_file", default=None, help="chip matrix file")
    common.add_argument("--plot", action="store_true", help="also write an SVG of the summary")
    common.add_argument("-v", "--verbose", action="store_true")

    s = sub.add_parser("simulate", parents=[common], help="one end-to-end run")
    s.add_argument("--signal", default=None, help="waveform file instead of a synthetic signal")
    for name, help_ in [
        ("sweep-sparsity", "output SNR vs K (default 1..15)"),
        ("sweep-noise", "output SNR vs input SNR (default 10..50 dB)"),
        ("sweep-m", "output SNR vs M (default 10..20)"),
        ("compare-mwc", "RT-MWCS vs MWC vs M on the same trials"),
    ]:
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.add_argument("--values", default=None, help="comma list or lo:hi[:step]")
    return p


def _config(args) -> ExperimentConfig:
    over = {}
    for name in list(_OVERRIDES) + ["misaligned", "periodic", "chips_file"]:
        v = getattr(args, name)
        if v is not None:
            over["input_snr_db" if name == "snr" else name] = v
    if args.seed is not None:
        over["seed"] = args.seed
    if args.command == "compare-mwc":
        # the comparison runs on noisy signals with the ADC at the true offset
        over.setdefault("misaligned", True)
        over.setdefault("input_snr_db", 20.0)
    if args.config:
        cfg = ExperimentConfig.from_file(args.config)
        if args.profile:
            log.warning("--profile ignored because --config was given")
        return replace(cfg, **over)
    return ExperimentConfig.from_profile(args.profile or "desk", **over)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = _config(args)
        out = Path(args.out_dir) if args.out_dir else None
        if args.command == "simulate":
            rep = simulate(cfg, args.signal, out or Path("rtmwcs-run"))
            print(f"support      {' '.join(map(str, rep.support))}")
            if rep.true_support is not None:
                print(f"true support {' '.join(map(str, rep.true_support))}")
            print(f"output SNR   {rep.output_snr_db:.2f} dB")
            print(f"residual     {rep.residual:.3e}")
            print(f"written to   {rep.out_dir}")
            return 0
        if args.command == "sweep-noise":
            res = run_noise_sweep(cfg, _values(args.values, float))
        elif args.command == "sweep-sparsity":
            res = run_sparsity_sweep(cfg, _values(args.values, int))
        else:
            res = run_m_sweep(cfg, _values(args.values, int), include_mwc=args.command == "compare-mwc")
        paths = write_sweep(res, out or Path("rtmwcs-" + args.command))
        for r in res.summary:
            flag = "" if r["feasible"] else "  (2K+2 > M)"
            print(f"{res.sweep}={r['value']:<6g} {r['scheme']:<4} mean SNR {r['mean_snr_db']:8.2f} dB"
                  f"  exact support {r['exact_rate']:.0%}{flag}")
        if args.plot:
            plot_summary(paths["summary"], paths["summary"].with_suffix(".svg"))
        print(f"written to {paths['summary'].parent}")
        return 0
    except (ValueError, OSError, WaveformFormatError) as exc:
        print(f"rtmwcs: error: {exc}", file=sys.stderr)
        return 2
