"""Static figures for experiment results. Images are presentation only; the
CSV files are the stable record."""
from __future__ import annotations

import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .experiments import LineFitResult, SweepResult  # noqa: E402

SYMBOL = {"renyi": "alpha", "tsallis": "q", "kaniadakis": "kappa", "gaussian": "-"}


def plot_heatmaps(result: SweepResult, out_dir) -> list:
    out_dir = Path(out_dir)
    paths = []
    for fam in result.families():
        idx, con, mat = result.median_matrix(fam)
        fig, ax = plt.subplots(figsize=(6, 4.5))
        x = 100 * con
        y = idx if not np.all(np.isnan(idx)) else np.zeros(1)
        extent = None
        if len(x) > 1 and len(y) > 1:
            # cell centres sit on the grid values so the contour lines up
            hx, hy = 0.5 * (x[-1] - x[0]) / (len(x) - 1), 0.5 * (y[-1] - y[0]) / (len(y) - 1)
            extent = [x[0] - hx, x[-1] + hx, y[0] - hy, y[-1] + hy]
        im = ax.imshow(mat, origin="lower", aspect="auto", cmap="RdYlBu_r",
                       vmin=-1.0, vmax=1.0, extent=extent)
        if extent is not None and np.nanmax(mat) >= 0.9 > np.nanmin(mat):
            ax.contour(x, y, mat, levels=[0.9], colors="white", linewidths=1.5)
        ax.set_xlabel("spiked samples (%)")
        ax.set_ylabel(SYMBOL.get(fam, "index"))
        ax.set_title(f"{fam}: median Pearson R")
        fig.colorbar(im, ax=ax, label="R")
        path = out_dir / f"heatmap_{fam}.png"
        fig.savefig(path, dpi=120, bbox_inches="tight")
        plt.close(fig)
        paths.append(path)
    return paths


def plot_linefit(result: LineFitResult, out_dir, data=None) -> list:
    """Delta-m versus index per family, plus the best fits over ``data``
    (an ``(x, d_obs, d_true, outliers)`` tuple) when given."""
    out_dir = Path(out_dir)
    paths = []
    fams = list(dict.fromkeys(r.family for r in result.rows))
    fig, axes = plt.subplots(1, 2, figsize=(10, 4))
    for fam in fams:
        rows = [r for r in result.rows if r.family == fam]
        idx = sorted({r.index for r in rows})
        for ax, key in zip(axes, ("dm1", "dm2")):
            mean = [np.mean([getattr(r, key) for r in rows if r.index == v]) for v in idx]
            ax.plot(idx, mean, label=fam)
    for ax, key in zip(axes, ("dm1", "dm2")):
        ax.axhline(0.0, color="k", ls="--", lw=0.8)
        ax.set_xlabel("entropic index")
        ax.set_ylabel(key)
        ax.legend()
    path = out_dir / "linefit_dm.png"
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    paths.append(path)

    if data is not None:
        x, d_obs, d_true, outliers = data
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.scatter(x[~outliers], d_obs[~outliers], s=12, c="k")
        ax.scatter(x[outliers], d_obs[outliers], s=12, c="r", label="outliers")
        ax.plot(x, d_true, "k--", label="ideal")
        seed0 = result.rows[0].seed
        for fam, (v, _) in result.best().items():
            r = next(r for r in result.rows if r.family == fam and r.index == v and r.seed == seed0)
            ax.plot(x, r.m1 * x + r.m2, label=f"{fam} {SYMBOL.get(fam)}={v:.4g}")
        ax.set_ylim(np.min(d_true) - 3, np.max(d_true) + 3)
        ax.legend(fontsize=8)
        path = out_dir / "linefit_fits.png"
        fig.savefig(path, dpi=120, bbox_inches="tight")
        plt.close(fig)
        paths.append(path)
    return paths


def plot_psi(z_true, z_initial, z_rec, d_obs, d_clean, out_dir, title="") -> list:
    out_dir = Path(out_dir)
    fig, axes = plt.subplots(1, 2, figsize=(8, 6), sharey=False)
    t = np.arange(len(z_true))
    axes[0].plot(z_true, t, "k", label="true")
    axes[0].plot(z_initial, t, "b--", label="initial")
    axes[0].plot(z_rec, t, "r", label="recovered")
    axes[0].invert_yaxis()
    axes[0].set_xlabel("impedance")
    axes[0].set_ylabel("sample")
    axes[0].legend(fontsize=8)
    td = np.arange(len(d_obs))
    axes[1].plot(d_obs, td, color="0.6", lw=0.6, label="observed")
    axes[1].plot(d_clean, td, "k", lw=0.8, label="clean")
    axes[1].invert_yaxis()
    axes[1].set_xlabel("amplitude")
    axes[1].legend(fontsize=8)
    fig.suptitle(title)
    path = out_dir / "psi_traces.png"
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return [path]


def emit_plots(result, out_dir, **extra) -> list:
    """Render the figures for ``result`` into ``out_dir`` and write a manifest.

    Returns the list of files written, manifest included.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if isinstance(result, SweepResult):
        if not len(result):
            raise ValueError("empty sweep result")
        paths = plot_heatmaps(result, out_dir)
    elif isinstance(result, LineFitResult):
        if not len(result):
            raise ValueError("empty line-fit result")
        paths = plot_linefit(result, out_dir, extra.get("data"))
    else:
        raise TypeError(f"cannot plot {type(result).__name__}")
    manifest = out_dir / "plots_manifest.json"
    manifest.write_text(json.dumps({"images": sorted(p.name for p in paths)}, indent=2) + "\n")
    return paths + [manifest]
