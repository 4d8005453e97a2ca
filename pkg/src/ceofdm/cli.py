"""Command-line experiment runner: synth, optimize, quantize, sweep.

All commands resolve an :class:`ExperimentConfig` from defaults, an optional
INI file, and command-line overrides, then write their data products into the
output directory together with a manifest echoing the resolved config. Exit
codes: 0 success, 2 config error, 3 numerical failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .expconfig import ConfigError, ExperimentConfig
from .exports import (
    read_phi_csv,
    write_acf_csv,
    write_af_csv,
    write_inst_freq_csv,
    write_phi_csv,
    write_quantization_csv,
    write_spectrogram_csv,
    write_spectrum_csv,
    write_summary,
    write_trace_csv,
    write_waveform_csv,
)
from .metrics import (
    build_weights,
    compute_acf,
    compute_af,
    compute_gisl,
    compute_pslr,
    db,
    detect_mainlobe_null,
)
from .optimizer import run_gd_gisl
from .quantize import degradation_sweep, quantize_psk
from .waveform import random_psk, synthesize

__all__ = ["main", "entry", "cmd_synth", "cmd_optimize", "cmd_quantize", "cmd_sweep"]


def _prepare(config: ExperimentConfig):
    """Initial waveform, its ACF, the detected null, and the frozen weights."""
    cfg = config.to_waveform_config()
    phi0 = random_psk(cfg.L, config.waveform.mpsk, config.run.seed)
    s0 = synthesize(phi0, cfg)
    r0 = compute_acf(s0)
    null = detect_mainlobe_null(r0)
    weights = build_weights(null, config.region_descriptor(null, cfg.M), cfg.M)
    return cfg, phi0, s0, r0, null, weights


def _default_doppler_grid(cfg) -> np.ndarray:
    return np.linspace(-cfg.L / cfg.T, cfg.L / cfg.T, 97)


def cmd_synth(config: ExperimentConfig) -> None:
    """Write the waveform, its spectrum/spectrogram, and its ACF/AF surfaces."""
    out = Path(config.run.out)
    cfg, phi0, s0, r0, null, weights = _prepare(config)
    config.write_manifest(out / "manifest.ini")
    write_phi_csv(out / "phi.csv", phi0)
    write_waveform_csv(out / "waveform.csv", s0)
    write_inst_freq_csv(out / "inst_freq.csv", phi0, cfg)
    write_spectrum_csv(out / "spectrum.csv", s0, cfg)
    if config.run.write_spectrogram:
        write_spectrogram_csv(out / "spectrogram.csv", s0, cfg)
    write_acf_csv(out / "acf.csv", r0, cfg.T)
    if config.run.write_af:
        write_af_csv(out / "af.csv", compute_af(s0, _default_doppler_grid(cfg)), cfg.T)
    write_summary(
        out / "summary.txt",
        {
            "null_index": null,
            "gisl_db": db(compute_gisl(r0, weights, config.optimizer.p)),
            "pslr_db": compute_pslr(r0, null, weights=weights),
            "M": cfg.M,
            "fs": cfg.fs,
        },
    )


def _optimize_core(config: ExperimentConfig):
    cfg, phi0, s0, r0, null, weights = _prepare(config)
    phi_final, trace = run_gd_gisl(phi0, cfg, weights, config.optimizer)
    s_final = synthesize(phi_final, cfg)
    r_final = compute_acf(s_final)
    return cfg, weights, phi0, s0, r0, null, phi_final, s_final, r_final, trace


def cmd_optimize(config: ExperimentConfig) -> None:
    """Run the descent loop and export initial/final waveform data plus the trace."""
    out = Path(config.run.out)
    started = time.perf_counter()
    (cfg, weights, phi0, s0, r0, null, phi_final, s_final, r_final, trace) = _optimize_core(config)
    runtime = time.perf_counter() - started
    p = config.optimizer.p
    gisl_initial = db(compute_gisl(r0, weights, p))
    gisl_final = db(compute_gisl(r_final, weights, p))
    null_final = detect_mainlobe_null(r_final)
    config.write_manifest(out / "manifest.ini")
    write_phi_csv(out / "phi_initial.csv", phi0)
    write_phi_csv(out / "phi_final.csv", phi_final)
    write_acf_csv(out / "acf_initial.csv", r0, cfg.T)
    write_acf_csv(out / "acf_final.csv", r_final, cfg.T)
    write_spectrum_csv(out / "spectrum_initial.csv", s0, cfg)
    write_spectrum_csv(out / "spectrum_final.csv", s_final, cfg)
    write_trace_csv(out / "trace.csv", trace)
    write_summary(
        out / "summary.txt",
        {
            "gisl_initial_db": gisl_initial,
            "gisl_final_db": gisl_final,
            "gisl_improvement_db": gisl_initial - gisl_final,
            "pslr_initial_db": compute_pslr(r0, null, weights=weights),
            "pslr_final_db": compute_pslr(r_final, null, weights=weights),
            "null_index_initial": null,
            "null_index_final": null_final,
            "iterations": len(trace.rows),
            "status": trace.status,
            "p": p,
        },
    )
    # runtime stays off the data files so reruns are byte-identical
    print(f"optimize: GISL {gisl_initial:.2f} dB -> {gisl_final:.2f} dB in {runtime:.2f} s")


def cmd_quantize(config: ExperimentConfig, input_dir: str | None = None) -> None:
    """Truncate optimized phases onto each alphabet and export the damage report.

    With ``input_dir``, reuse a finished optimize run (its manifest and phase
    vectors); otherwise optimize in place first.
    """
    out = Path(config.run.out)
    if input_dir is not None:
        base = ExperimentConfig.from_file(Path(input_dir) / "manifest.ini")
        cfg = base.to_waveform_config()
        phi0 = read_phi_csv(Path(input_dir) / "phi_initial.csv")
        phi_final = read_phi_csv(Path(input_dir) / "phi_final.csv")
        r0 = compute_acf(synthesize(phi0, cfg))
        null = detect_mainlobe_null(r0)
        weights = build_weights(null, base.region_descriptor(null, cfg.M), cfg.M)
        p = base.optimizer.p
    else:
        cfg, weights, _, _, _, _, phi_final, _, _, _ = _optimize_core(config)
        p = config.optimizer.p
    report = degradation_sweep(phi_final, cfg, weights, p, config.alphabets)
    config.write_manifest(out / "manifest.ini")
    write_quantization_csv(out / "report.csv", report)
    for mpsk in config.alphabets:
        label = "inf" if mpsk == math.inf else str(int(mpsk))
        r_q = compute_acf(synthesize(quantize_psk(phi_final, mpsk), cfg))
        write_acf_csv(out / f"acf_mpsk_{label}.csv", r_q, cfg.T)


def _sweep_worker(payload) -> dict:
    config, seed = payload
    row = {"seed": seed, "status": "ok", "detail": ""}
    try:
        run_config = config.with_seed(seed)
        (cfg, weights, _, _, r0, null, _, _, r_final, trace) = _optimize_core(run_config)
        p = config.optimizer.p
        gisl_initial = db(compute_gisl(r0, weights, p))
        gisl_final = db(compute_gisl(r_final, weights, p))
        row.update(
            null_initial=null,
            null_final=detect_mainlobe_null(r_final),
            gisl_initial_db=gisl_initial,
            gisl_final_db=gisl_final,
            improvement_db=gisl_initial - gisl_final,
            pslr_initial_db=compute_pslr(r0, null, weights=weights),
            pslr_final_db=compute_pslr(r_final, null, weights=weights),
            iterations=len(trace.rows),
            detail=trace.status,
        )
    except Exception as exc:  # per-seed failures become rows, not aborts
        row["status"] = "failed"
        row["detail"] = str(exc).replace(",", ";").replace("\n", " ")
    return row


_SWEEP_COLUMNS = (
    "seed,status,null_initial,null_final,gisl_initial_db,gisl_final_db,"
    "improvement_db,pslr_initial_db,pslr_final_db,iterations,detail"
)


def cmd_sweep(config: ExperimentConfig) -> None:
    """Run seed_count independent optimizations and aggregate their metrics."""
    out = Path(config.run.out)
    seeds = [config.run.seed + i for i in range(config.run.seed_count)]
    payloads = [(config, seed) for seed in seeds]
    if config.run.threads > 1 and len(seeds) > 1:
        with ProcessPoolExecutor(max_workers=config.run.threads) as pool:
            rows = list(pool.map(_sweep_worker, payloads))
    else:
        rows = [_sweep_worker(p) for p in payloads]

    config.write_manifest(out / "manifest.ini")
    lines = [_SWEEP_COLUMNS]
    for row in rows:
        if row["status"] == "ok":
            lines.append(
                f"{row['seed']},ok,{row['null_initial']},{row['null_final']},"
                f"{row['gisl_initial_db']:.17g},{row['gisl_final_db']:.17g},"
                f"{row['improvement_db']:.17g},{row['pslr_initial_db']:.17g},"
                f"{row['pslr_final_db']:.17g},{row['iterations']},{row['detail']}"
            )
        else:
            lines.append(f"{row['seed']},failed,,,,,,,,,{row['detail']}")
    (out / "seeds.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")

    good = [row for row in rows if row["status"] == "ok"]
    if not good:
        raise ValueError("all sweep runs failed; see seeds.csv")
    entries: dict = {"seed_count": len(seeds), "succeeded": len(good)}
    for key in (
        "gisl_initial_db",
        "gisl_final_db",
        "improvement_db",
        "pslr_initial_db",
        "pslr_final_db",
    ):
        values = np.array([row[key] for row in good])
        entries[f"median_{key}"] = float(np.median(values))
        entries[f"iqr_{key}"] = float(
            np.percentile(values, 75) - np.percentile(values, 25)
        )
    write_summary(out / "aggregate.txt", entries)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ceofdm",
        description="Constant-envelope OFDM waveform synthesis and GISL sidelobe shaping.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    specs = {
        "synth": "generate a waveform and export its time/frequency/correlation data",
        "optimize": "minimize the GISL over a delay region and export the results",
        "quantize": "truncate optimized phases to M-ary alphabets and report the damage",
        "sweep": "run many seeded optimizations and aggregate the statistics",
    }
    for name, help_text in specs.items():
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", default=None, help="INI config file")
        sp.add_argument("--out", default=None, help="output directory")
        sp.add_argument("--seed", type=int, default=None, help="base RNG seed")
        sp.add_argument("--threads", type=int, default=None, help="parallel workers (sweep)")
        sp.add_argument(
            "--set",
            dest="overrides",
            action="append",
            default=[],
            metavar="SECTION.KEY=VALUE",
            help="override any config key, repeatable",
        )
        if name == "quantize":
            sp.add_argument("--input", default=None, help="finished optimize output directory")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = ExperimentConfig.from_sources(
            path=args.config,
            overrides=args.overrides,
            seed=args.seed,
            out=args.out,
            threads=args.threads,
        )
        out = Path(config.run.out)
        out.mkdir(parents=True, exist_ok=True)
        if args.command == "synth":
            cmd_synth(config)
        elif args.command == "optimize":
            cmd_optimize(config)
        elif args.command == "quantize":
            cmd_quantize(config, input_dir=getattr(args, "input", None))
        elif args.command == "sweep":
            cmd_sweep(config)
        print(f"wrote {out}")
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4
    except (ValueError, ArithmeticError, AssertionError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
