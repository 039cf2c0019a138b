"""Experiment drivers: line-fit index sweep, single PSI inversion, and the
index x contamination heatmap sweep."""
from __future__ import annotations

import csv
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import astuple, dataclass, fields
from functools import lru_cache
from typing import List, Sequence

import numpy as np
from scipy.ndimage import uniform_filter1d

from .config import Config, ConfigError, LineFitConfig, PsiConfig, SolverConfig, index_grid
from .gstat import EntropicIndex, Family, IndexRangeError
from .metrics import MetricReport, mae, pearson_r
from .operators import line_design_matrix, psi_operator, ricker
from .solver import InversionProblem, ModelEstimate, minimize
from .synthdata import (
    LineDatasetSpec,
    SeismicNoiseSpec,
    contaminate_seismic,
    default_layered_model,
    derive_seed,
    generate_line_dataset,
    load_impedance_model,
)

log = logging.getLogger(__name__)

LINEFIT_COLUMNS = ("family", "index", "seed", "m1", "m2", "dm1", "dm2", "mae")
SWEEP_COLUMNS = ("family", "index", "contamination", "seed", "pearson_r", "mae",
                 "iterations", "stop_reason")


def _fmt(v) -> str:
    if isinstance(v, float):
        return "" if math.isnan(v) else repr(v)
    return str(v)


def _parse_float(s: str) -> float:
    return float("nan") if s == "" else float(s)


def make_index(family, value) -> EntropicIndex:
    fam = Family.coerce(family)
    if fam is Family.GAUSSIAN:
        return EntropicIndex.gaussian()
    return EntropicIndex(fam, value)


class _Table:
    columns: tuple = ()
    row_type = None

    def __init__(self, rows=None):
        self.rows = list(rows or [])

    def __len__(self):
        return len(self.rows)

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([_fmt(v) for v in astuple(r)])
        return buf.getvalue()

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv_text())

    @classmethod
    def read_csv(cls, path):
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = tuple(next(reader))
            if header != cls.columns:
                raise ValueError(f"{path}: unexpected columns {header}")
            conv = [f.type for f in fields(cls.row_type)]
            rows = []
            for rec in reader:
                vals = []
                for t, s in zip(conv, rec):
                    if t in ("float", float):
                        vals.append(_parse_float(s))
                    elif t in ("int", int):
                        vals.append(int(s))
                    else:
                        vals.append(s)
                rows.append(cls.row_type(*vals))
        return cls(rows)


# ---------------------------------------------------------------------------
# Line fit
# ---------------------------------------------------------------------------


@dataclass
class LineFitRow:
    family: str
    index: float
    seed: int
    m1: float
    m2: float
    dm1: float
    dm2: float
    mae: float


class LineFitResult(_Table):
    columns = LINEFIT_COLUMNS
    row_type = LineFitRow

    def mean_mae(self) -> dict:
        """{(family, index): MAE averaged over seeds}."""
        acc = {}
        for r in self.rows:
            acc.setdefault((r.family, r.index), []).append(r.mae)
        return {k: float(np.mean(v)) for k, v in acc.items()}

    def best(self) -> dict:
        """{family: (index, mean MAE)} at the index with the lowest mean MAE."""
        out = {}
        for (fam, idx), m in self.mean_mae().items():
            if fam not in out or m < out[fam][1]:
                out[fam] = (idx, m)
        return out


def line_spec(cfg: LineFitConfig) -> LineDatasetSpec:
    return LineDatasetSpec(
        n=cfg.n, x_range=(cfg.x_min, cfg.x_max), true_m=(cfg.m1, cfg.m2),
        sigma=cfg.sigma, sigma_is_variance=cfg.sigma_is_variance,
        outlier_region=(cfg.outlier_lo, cfg.outlier_hi), outlier_scale=cfg.outlier_scale,
    )


def fit_line(x, d_obs, index: EntropicIndex, settings) -> ModelEstimate:
    G = line_design_matrix(x)
    return minimize(InversionProblem(d_obs, G, index, np.zeros(2), settings))


def run_linefit(cfg: Config) -> LineFitResult:
    """Fit ``m1 x + m2`` to contaminated data for every family, index and seed."""
    lf = cfg.linefit
    spec = line_spec(lf)
    settings = cfg.solver.settings(max_iterations=lf.max_iterations, tolerance=lf.tolerance)
    datasets = [(s, generate_line_dataset(spec, derive_seed(cfg.seed, s))) for s in lf.seeds]
    rows = []
    for fam in lf.families:
        for v in index_grid(fam, lf.n_indices, lf.index_values):
            idx = make_index(fam, v)
            for s, data in datasets:
                est = fit_line(data.x, data.d_obs, idx, settings)
                m1, m2 = (float(c) for c in est.model)
                fitted = m1 * data.x + m2
                rows.append(LineFitRow(fam, v, s, m1, m2, m1 - lf.m1, m2 - lf.m2,
                                       mae(fitted, data.d_true)))
    return LineFitResult(rows)


# ---------------------------------------------------------------------------
# Post-stack inversion
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PsiSetup:
    z_true: np.ndarray
    m_true: np.ndarray
    m_initial: np.ndarray
    operator: object
    d_clean: np.ndarray


@lru_cache(maxsize=8)
def psi_setup(cfg: PsiConfig) -> PsiSetup:
    """Model, operator, smooth initial model and clean data (cached per config)."""
    if cfg.model_file:
        model = load_impedance_model(cfg.model_file, dt=cfg.dt)
    else:
        model = default_layered_model(cfg.n_samples, cfg.dt)
    m_true = model.log_z
    window = max(1, int(round(cfg.smoothing_fraction * m_true.size)))
    m0 = uniform_filter1d(m_true, window, mode="nearest")
    G = psi_operator(ricker(cfg.peak_frequency, model.dt), m_true.size)
    return PsiSetup(model.z, m_true, m0, G, G.forward(m_true))


def psi_observed(cfg: PsiConfig, setup: PsiSetup, contamination: float, replicate: int,
                 base_seed: int) -> np.ndarray:
    """Contaminated data for one noise scenario; shared by every family/index."""
    spec = SeismicNoiseSpec(snr_db=cfg.snr_db, spike_fraction=contamination,
                            spike_scale_range=(cfg.spike_scale_min, cfg.spike_scale_max))
    seed = derive_seed(base_seed, replicate, int(round(contamination * 1e6)))
    return contaminate_seismic(setup.d_clean, spec, seed)


@dataclass
class PsiRun:
    estimate: ModelEstimate
    metrics: MetricReport
    setup: PsiSetup
    observed: np.ndarray

    @property
    def z_recovered(self) -> np.ndarray:
        return np.exp(self.estimate.model)


def invert_psi(cfg: PsiConfig, solver: SolverConfig, family, index, contamination: float,
               replicate: int, base_seed: int) -> PsiRun:
    setup = psi_setup(cfg)
    d_obs = psi_observed(cfg, setup, contamination, replicate, base_seed)
    problem = InversionProblem(d_obs, setup.operator, make_index(family, index),
                               setup.m_initial, solver.settings())
    est = minimize(problem)
    z_rec = np.exp(est.model)
    report = MetricReport(
        mae=mae(setup.z_true, z_rec),
        pearson_r=pearson_r(setup.z_true, z_rec),
        extras={"initial_pearson_r": pearson_r(setup.z_true, np.exp(setup.m_initial)),
                "final_objective": float(est.objective_trace[-1])},
    )
    return PsiRun(est, report, setup, d_obs)


def run_psi(cfg: Config):
    """Single inversion as configured in ``cfg.psi``; returns (estimate, metrics)."""
    p = cfg.psi
    run = invert_psi(p, cfg.solver, p.family, p.index, p.contamination, p.replicate, cfg.seed)
    return run.estimate, run.metrics


# ---------------------------------------------------------------------------
# Heatmap sweep
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentGrid:
    family: str
    index_values: tuple
    contamination_fractions: tuple
    seeds: tuple

    def __post_init__(self):
        fam = Family.coerce(self.family)
        object.__setattr__(self, "family", fam.value)
        for v in self.index_values:
            try:
                make_index(fam, v).check_objective_range()
            except IndexRangeError as exc:
                raise ConfigError(str(exc)) from exc
        for c in self.contamination_fractions:
            if not 0.0 <= c <= 0.8:
                raise ConfigError(f"contamination {c} outside [0, 0.8]")
        if not (self.index_values and self.contamination_fractions and self.seeds):
            raise ConfigError("grid axes must be non-empty")

    def cells(self):
        for v in self.index_values:
            for c in self.contamination_fractions:
                for s in self.seeds:
                    yield (self.family, v, c, s)


@dataclass
class SweepRow:
    family: str
    index: float
    contamination: float
    seed: int
    pearson_r: float
    mae: float
    iterations: int
    stop_reason: str


class SweepResult(_Table):
    columns = SWEEP_COLUMNS
    row_type = SweepRow

    def families(self) -> list:
        return list(dict.fromkeys(r.family for r in self.rows))

    def median_matrix(self, family):
        """(index values, contamination levels, median-R matrix [index, contamination])."""
        rows = [r for r in self.rows if r.family == family]
        idx = sorted({r.index for r in rows}, key=lambda v: (math.isnan(v), v))
        con = sorted({r.contamination for r in rows})
        mat = np.full((len(idx), len(con)), np.nan)
        for i, v in enumerate(idx):
            for j, c in enumerate(con):
                vals = [r.pearson_r for r in rows
                        if (r.index == v or (math.isnan(v) and math.isnan(r.index)))
                        and r.contamination == c]
                if vals:
                    mat[i, j] = float(np.nanmedian(vals)) if not all(map(math.isnan, vals)) else np.nan
        return np.array(idx), np.array(con), mat


def _sweep_cell(args) -> SweepRow:
    psi_cfg, solver_cfg, base_seed, (family, v, c, s) = args
    try:
        run = invert_psi(psi_cfg, solver_cfg, family, v, c, s, base_seed)
    except Exception as exc:  # recorded, never aborts the sweep
        log.warning("cell %s/%s/%s/%s failed: %s", family, v, c, s, exc)
        return SweepRow(family, v, c, s, float("nan"), float("nan"), 0,
                        f"error:{type(exc).__name__}")
    est = run.estimate
    return SweepRow(family, v, c, s, run.metrics.pearson_r, run.metrics.mae,
                    est.iterations_used, est.stop_reason.value)


def run_heatmap_sweep(grids: Sequence[ExperimentGrid] | ExperimentGrid, cfg: Config,
                      workers: int | None = None) -> SweepResult:
    """Invert every (index, contamination, seed) cell; rows come back in grid order
    whatever the number of workers."""
    if isinstance(grids, ExperimentGrid):
        grids = [grids]
    workers = cfg.workers if workers is None else workers
    tasks = [(cfg.psi, cfg.solver, cfg.seed, cell) for g in grids for cell in g.cells()]
    if workers <= 1:
        rows = [_sweep_cell(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunk = max(1, len(tasks) // (4 * workers))
            rows = list(pool.map(_sweep_cell, tasks, chunksize=chunk))
    return SweepResult(rows)


def sweep_grids(cfg: Config) -> List[ExperimentGrid]:
    s = cfg.sweep
    return [
        ExperimentGrid(fam, tuple(index_grid(fam, s.n_indices, s.index_values)),
                       tuple(float(c) for c in s.contamination), tuple(s.seeds))
        for fam in s.families
    ]
