"""Reproducible synthetic datasets: outlier-contaminated lines, layered
impedance traces and spike-contaminated seismic data."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np


def derive_seed(seed: int, *keys: int) -> int:
    """Deterministic 64-bit child seed of ``seed`` for the integer path ``keys``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _rng(seed) -> np.random.Generator:
    if seed < 0 or seed >= 2**64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return np.random.default_rng(int(seed))


# ---------------------------------------------------------------------------
# Line experiment
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LineDatasetSpec:
    n: int = 50
    x_range: tuple = (-1.0, 1.0)
    true_m: tuple = (1.0, 2.0)
    sigma: float = 0.2
    sigma_is_variance: bool = False   # read sigma as the variance instead of the SD
    outlier_region: tuple = (0.4, 0.9)  # half-open [lo, hi)
    outlier_scale: float = 10.0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be >= 2")
        if not self.x_range[0] < self.x_range[1]:
            raise ValueError("x_range must be ordered")
        if self.sigma < 0:
            raise ValueError("sigma must be non-negative")

    @property
    def noise_sd(self) -> float:
        return math.sqrt(self.sigma) if self.sigma_is_variance else float(self.sigma)


class LineDataset(NamedTuple):
    x: np.ndarray
    d_obs: np.ndarray
    d_true: np.ndarray
    outliers: np.ndarray  # boolean mask of replaced samples


def generate_line_dataset(spec: LineDatasetSpec, seed: int) -> LineDataset:
    """Noisy samples of ``m1 x + m2`` whose points in the outlier region are
    replaced by ``outlier_scale * f`` with ``f`` standard normal."""
    rng = _rng(seed)
    x = np.linspace(spec.x_range[0], spec.x_range[1], spec.n)
    m1, m2 = spec.true_m
    d_true = m1 * x + m2
    d_obs = d_true + rng.normal(0.0, spec.noise_sd, spec.n) if spec.noise_sd > 0 else d_true.copy()
    lo, hi = spec.outlier_region
    mask = (x >= lo) & (x < hi)
    d_obs[mask] = spec.outlier_scale * rng.standard_normal(int(mask.sum()))
    return LineDataset(x, d_obs, d_true, mask)


# ---------------------------------------------------------------------------
# Impedance models
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ImpedanceModel:
    z: np.ndarray
    dt: float = 1e-3

    def __post_init__(self):
        z = np.asarray(self.z, dtype=float)
        if z.ndim != 1 or z.size < 2:
            raise ValueError("impedance model needs a 1-D trace of at least 2 samples")
        if not np.all(np.isfinite(z)) or np.any(z <= 0):
            raise ValueError("impedance values must be finite and strictly positive")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        object.__setattr__(self, "z", z)

    @property
    def log_z(self) -> np.ndarray:
        return np.log(self.z)

    def __len__(self):
        return self.z.size


def layered_impedance_model(n: int, layers: Sequence[tuple], dt: float = 1e-3) -> ImpedanceModel:
    """Piecewise-constant trace from ``(thickness, impedance)`` pairs."""
    if not layers:
        raise ValueError("at least one layer is required")
    total = sum(int(t) for t, _ in layers)
    if total != n:
        raise ValueError(f"layer thicknesses sum to {total}, expected n={n}")
    for t, z in layers:
        if int(t) < 1:
            raise ValueError(f"layer thickness must be >= 1, got {t}")
        if not z > 0:
            raise ValueError(f"impedance must be positive, got {z}")
    z = np.concatenate([np.full(int(t), float(v)) for t, v in layers])
    return ImpedanceModel(z, dt)


# Reference layering for 512 samples; impedances in (m/s)(g/cm^3).
DEFAULT_LAYERS = (
    (40, 4500.0), (60, 5200.0), (30, 4800.0), (80, 6100.0), (25, 5600.0),
    (55, 7000.0), (70, 6400.0), (35, 7800.0), (50, 7200.0), (67, 8600.0),
)


def default_layered_model(n: int = 512, dt: float = 1e-3) -> ImpedanceModel:
    """The benchmark layered model, thicknesses rescaled to ``n`` samples."""
    base = np.array([t for t, _ in DEFAULT_LAYERS], dtype=float)
    if n == int(base.sum()):
        return layered_impedance_model(n, DEFAULT_LAYERS, dt)
    if n < len(DEFAULT_LAYERS):
        raise ValueError(f"n must be >= {len(DEFAULT_LAYERS)}")
    raw = base * n / base.sum()
    thick = np.maximum(np.floor(raw).astype(int), 1)
    # largest-remainder fill so the thicknesses sum to n
    for i in np.argsort(-(raw - np.floor(raw)), kind="stable"):
        if thick.sum() >= n:
            break
        thick[i] += 1
    while thick.sum() > n:
        thick[np.argmax(thick)] -= 1
    layers = [(int(t), z) for t, (_, z) in zip(thick, DEFAULT_LAYERS)]
    return layered_impedance_model(n, layers, dt)


def load_impedance_model(path, dt: float = 1e-3) -> ImpedanceModel:
    """Read an impedance trace.

    Plain-text format: first line ``n dt``, then ``n`` impedance values, one
    per line. CSV format (``.csv`` suffix or a comma on the first line):
    rows ``index,z`` with an optional header; ``dt`` comes from the argument.
    """
    path = Path(path)
    text = path.read_text().strip().splitlines()
    lines = [ln.strip() for ln in text if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ValueError(f"{path}: empty impedance file")
    try:
        if path.suffix.lower() == ".csv" or "," in lines[0]:
            rows = list(csv.reader(lines))
            if rows and not _is_number(rows[0][0]):
                rows = rows[1:]
            pairs = sorted((int(float(r[0])), float(r[1])) for r in rows)
            idx = [i for i, _ in pairs]
            if idx != list(range(idx[0], idx[0] + len(idx))):
                raise ValueError("CSV indices must be consecutive")
            z = np.array([v for _, v in pairs])
            file_dt = dt
        else:
            head = lines[0].split()
            if len(head) != 2:
                raise ValueError("header must be 'n dt'")
            n, file_dt = int(head[0]), float(head[1])
            z = np.array([float(v) for v in lines[1:]])
            if z.size != n:
                raise ValueError(f"header says {n} samples, found {z.size}")
    except (ValueError, IndexError) as exc:
        raise ValueError(f"{path}: cannot parse impedance model: {exc}") from exc
    return ImpedanceModel(z, file_dt)


def save_impedance_model(model: ImpedanceModel, path) -> None:
    """Write ``model`` in the plain-text ``n dt`` format."""
    with open(path, "w") as fh:
        fh.write(f"{model.z.size} {float(model.dt)!r}\n")
        for v in model.z:
            fh.write(f"{float(v)!r}\n")


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


# ---------------------------------------------------------------------------
# Seismic contamination
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SeismicNoiseSpec:
    snr_db: float = 80.0              # math.inf disables the white noise
    spike_fraction: float = 0.0
    spike_scale_range: tuple = (5.0, 15.0)

    def __post_init__(self):
        if not 0.0 <= self.spike_fraction <= 1.0:
            raise ValueError(f"spike_fraction must lie in [0, 1], got {self.spike_fraction}")
        lo, hi = self.spike_scale_range
        if not 0 < lo <= hi:
            raise ValueError("spike_scale_range must be positive and ordered")
        if math.isnan(self.snr_db):
            raise ValueError("snr_db must not be NaN")


def contaminate_seismic(d_clean, spec: SeismicNoiseSpec, seed: int, return_positions: bool = False):
    """White noise at ``snr_db`` plus spikes on ``floor(fraction * N)`` samples.

    A spike adds ``s * f * a_ref`` with ``s ~ U[lo, hi]``, ``f ~ N(0, 1)`` and
    ``a_ref = |d_i|``, or the trace's peak amplitude where ``|d_i|`` is below
    1% of that peak.
    """
    d = np.asarray(d_clean, dtype=float)
    rng = _rng(seed)
    out = d.copy()
    if math.isfinite(spec.snr_db):
        p_signal = float(np.mean(d * d))
        sd = math.sqrt(p_signal / 10.0 ** (spec.snr_db / 10.0))
        out += rng.normal(0.0, sd, d.size)
    k = int(math.floor(spec.spike_fraction * d.size + 1e-9))
    pos = np.sort(rng.choice(d.size, size=k, replace=False)) if k else np.empty(0, dtype=int)
    if k:
        peak = float(np.max(np.abs(d)))
        a = np.abs(d[pos])
        a_ref = np.where(a > 0.01 * peak, a, peak)
        s = rng.uniform(*spec.spike_scale_range, size=k)
        f = rng.standard_normal(k)
        out[pos] += s * f * a_ref
    return (out, pos) if return_positions else out
