"""Command-line driver.

    gstatinv linefit|psi|sweep|plot [--config FILE] [--seed N] [--out DIR]
                                    [--family F] [--index V] [--contamination C]

Exit codes: 0 success, 2 configuration error, 3 runtime failure.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__, kernels
from .config import Config, ConfigError, load_config

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3
FAMILIES = ("gaussian", "renyi", "tsallis", "kaniadakis")

log = logging.getLogger("gstatinv")


def _u64(s: str) -> int:
    v = int(s)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML configuration file")
    common.add_argument("--seed", type=_u64, help="base random seed (overrides config)")
    common.add_argument("--out", help="output directory (overrides config)")
    common.add_argument("--family", choices=FAMILIES, help="restrict to one statistic family")
    common.add_argument("--index", type=float, help="single entropic index value")
    common.add_argument("--contamination", type=float, help="spiked-sample fraction")
    common.add_argument("--workers", type=int, help="worker processes for sweeps")
    common.add_argument("--no-plots", action="store_true", help="skip image output")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="gstatinv", description=__doc__.splitlines()[0] if __doc__ else None)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("linefit", parents=[common], help="line-fit index sweep with outliers")
    sub.add_parser("psi", parents=[common], help="single post-stack impedance inversion")
    sub.add_parser("sweep", parents=[common], help="index x contamination heatmap sweep")
    sub.add_parser("plot", parents=[common], help="render figures from CSVs in --out")
    return p


def effective_config(args) -> Config:
    cfg = load_config(args.config)
    top = {}
    if args.seed is not None:
        top["seed"] = args.seed
    if args.out is not None:
        top["out"] = args.out
    if args.workers is not None:
        top["workers"] = args.workers
    lf, psi, sw = {}, {}, {}
    if args.family is not None:
        lf["families"] = (args.family,)
        sw["families"] = (args.family,)
        psi["family"] = args.family
    if args.index is not None:
        lf["index_values"] = (args.index,)
        sw["index_values"] = (args.index,)
        psi["index"] = args.index
    if args.contamination is not None:
        sw["contamination"] = (args.contamination,)
        psi["contamination"] = args.contamination
    cfg = dataclasses.replace(
        cfg, **top,
        linefit=dataclasses.replace(cfg.linefit, **lf),
        psi=dataclasses.replace(cfg.psi, **psi),
        sweep=dataclasses.replace(cfg.sweep, **sw),
    )
    return cfg.validate()


def _write_manifest(out: Path, command: str, cfg: Config, files) -> Path:
    path = out / "manifest.json"
    doc = {
        "command": command,
        "backend": kernels.BACKEND,
        "config": cfg.to_dict(),
        "files": sorted(Path(f).name for f in files),
    }
    path.write_text(json.dumps(doc, indent=2) + "\n")
    return path


def cmd_linefit(cfg: Config, out: Path, plots: bool):
    from .experiments import line_spec, run_linefit
    from .synthdata import derive_seed, generate_line_dataset

    result = run_linefit(cfg)
    csv_path = out / "linefit.csv"
    result.write_csv(csv_path)
    files = [csv_path]
    for fam, (v, m) in result.best().items():
        print(f"{fam:>11s}: best index {v:.6g}  mean MAE {m:.4f}")
    if plots:
        from .plots import emit_plots
        data = generate_line_dataset(line_spec(cfg.linefit), derive_seed(cfg.seed, cfg.linefit.seeds[0]))
        files += emit_plots(result, out, data=tuple(data))
    return files


def cmd_psi(cfg: Config, out: Path, plots: bool):
    from .experiments import invert_psi

    p = cfg.psi
    run = invert_psi(p, cfg.solver, p.family, p.index, p.contamination, p.replicate, cfg.seed)
    s = run.setup
    model_csv = out / "psi_model.csv"
    with open(model_csv, "w") as fh:
        fh.write("sample,z_true,z_initial,z_recovered\n")
        for i, (a, b, c) in enumerate(zip(s.z_true, np.exp(s.m_initial), run.z_recovered)):
            fh.write(f"{i},{a!r},{b!r},{c!r}\n")
    data_csv = out / "psi_data.csv"
    with open(data_csv, "w") as fh:
        fh.write("sample,d_clean,d_obs\n")
        for i, (a, b) in enumerate(zip(s.d_clean, run.observed)):
            fh.write(f"{i},{a!r},{b!r}\n")
    est, m = run.estimate, run.metrics
    metrics_json = out / "psi_metrics.json"
    metrics_json.write_text(json.dumps({
        "pearson_r": m.pearson_r, "mae": m.mae, **m.extras,
        "iterations": est.iterations_used, "stop_reason": est.stop_reason.value,
        "objective_trace": [float(v) for v in est.objective_trace],
    }, indent=2) + "\n")
    print(f"{p.family} index={p.index:g} contamination={p.contamination:g}: "
          f"R={m.pearson_r:.4f} MAE={m.mae:.2f} iterations={est.iterations_used} ({est.stop_reason.value})")
    files = [model_csv, data_csv, metrics_json]
    if plots:
        from .plots import plot_psi
        files += plot_psi(s.z_true, np.exp(s.m_initial), run.z_recovered, run.observed, s.d_clean,
                          out, title=f"{p.family} {p.index:g}, {100 * p.contamination:g}% spikes")
    return files


def cmd_sweep(cfg: Config, out: Path, plots: bool):
    from .experiments import run_heatmap_sweep, sweep_grids

    result = run_heatmap_sweep(sweep_grids(cfg), cfg)
    csv_path = out / "sweep.csv"
    result.write_csv(csv_path)
    failed = sum(r.stop_reason.startswith("error") for r in result.rows)
    print(f"{len(result)} cells written to {csv_path} ({failed} failed)")
    files = [csv_path]
    if plots:
        from .plots import emit_plots
        files += emit_plots(result, out)
    return files


def cmd_plot(cfg: Config, out: Path, plots: bool):
    from .experiments import LineFitResult, SweepResult
    from .plots import emit_plots

    files = []
    found = False
    if (out / "sweep.csv").exists():
        found = True
        files += emit_plots(SweepResult.read_csv(out / "sweep.csv"), out)
    if (out / "linefit.csv").exists():
        found = True
        files += emit_plots(LineFitResult.read_csv(out / "linefit.csv"), out)
    if not found:
        raise FileNotFoundError(f"no sweep.csv or linefit.csv in {out}")
    return files


COMMANDS = {"linefit": cmd_linefit, "psi": cmd_psi, "sweep": cmd_sweep, "plot": cmd_plot}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = effective_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(cfg.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        files = COMMANDS[args.command](cfg, out, plots=not args.no_plots)
        if args.command != "plot":
            _write_manifest(out, args.command, cfg, files)
    except Exception as exc:
        log.debug("failure", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
