"""Experiment configuration: TOML in, dataclasses inside, dicts out."""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from .gstat import SWEEP_RANGE, EntropicIndex, Family, IndexRangeError
from .solver import LineSearchSettings, SolverSettings


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    max_iterations: int = 10
    tolerance: float = 1e-12
    initial_step: float = 1.0
    shrink: float = 0.5
    sufficient_decrease: float = 1e-4
    growth: float = 2.0
    restart_period: int = 0  # 0: number of model parameters

    def settings(self, **overrides) -> SolverSettings:
        vals = dataclasses.asdict(self)
        vals.update(overrides)
        ls = LineSearchSettings(
            initial_step=vals["initial_step"],
            shrink=vals["shrink"],
            sufficient_decrease=vals["sufficient_decrease"],
            growth=vals["growth"],
        )
        return SolverSettings(
            max_iterations=vals["max_iterations"],
            tolerance=vals["tolerance"],
            line_search=ls,
            restart_period=vals["restart_period"] or None,
        )


@dataclass(frozen=True)
class LineFitConfig:
    families: tuple = ("renyi", "tsallis", "kaniadakis")
    n_indices: int = 200
    index_values: tuple = ()          # explicit list overrides n_indices
    seeds: tuple = tuple(range(10))
    n: int = 50
    x_min: float = -1.0
    x_max: float = 1.0
    m1: float = 1.0
    m2: float = 2.0
    sigma: float = 0.2
    sigma_is_variance: bool = False
    outlier_lo: float = 0.4
    outlier_hi: float = 0.9
    outlier_scale: float = 10.0
    max_iterations: int = 200
    tolerance: float = 1e-10


@dataclass(frozen=True)
class PsiConfig:
    family: str = "kaniadakis"
    index: float = 0.6666
    contamination: float = 0.4
    replicate: int = 0
    n_samples: int = 512
    dt: float = 1e-3
    peak_frequency: float = 55.0
    model_file: str = ""
    smoothing_fraction: float = 0.1
    snr_db: float = 80.0
    spike_scale_min: float = 5.0
    spike_scale_max: float = 15.0


@dataclass(frozen=True)
class SweepConfig:
    families: tuple = ("renyi", "tsallis", "kaniadakis")
    n_indices: int = 20
    index_values: tuple = ()
    contamination: tuple = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8)
    seeds: tuple = (0, 1, 2)


@dataclass(frozen=True)
class Config:
    seed: int = 0
    out: str = "results"
    workers: int = 1
    solver: SolverConfig = field(default_factory=SolverConfig)
    linefit: LineFitConfig = field(default_factory=LineFitConfig)
    psi: PsiConfig = field(default_factory=PsiConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)

    def to_dict(self) -> dict:
        return _to_plain(dataclasses.asdict(self))

    @classmethod
    def from_mapping(cls, data: dict) -> "Config":
        return _build(cls, data, "")

    def validate(self) -> "Config":
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        try:
            self.solver.settings()
            self.solver.settings(max_iterations=self.linefit.max_iterations,
                                 tolerance=self.linefit.tolerance)
        except ValueError as exc:
            raise ConfigError(f"solver: {exc}") from exc
        lf = self.linefit
        for fam in lf.families:
            _family(fam)
        if lf.n < 2 or not lf.x_min < lf.x_max or lf.sigma < 0:
            raise ConfigError("linefit: need n >= 2, x_min < x_max, sigma >= 0")
        if lf.n_indices < 1 or not lf.seeds:
            raise ConfigError("linefit: need n_indices >= 1 and at least one seed")
        p = self.psi
        _check_index(p.family, p.index)
        if not 0 <= p.contamination <= 1:
            raise ConfigError("psi.contamination must lie in [0, 1]")
        if p.n_samples < 2 or not p.dt > 0 or not p.peak_frequency > 0:
            raise ConfigError("psi: need n_samples >= 2, dt > 0, peak_frequency > 0")
        if not 0 < p.smoothing_fraction <= 1:
            raise ConfigError("psi.smoothing_fraction must lie in (0, 1]")
        if not 0 < p.spike_scale_min <= p.spike_scale_max:
            raise ConfigError("psi: spike scales must be positive and ordered")
        s = self.sweep
        for fam in s.families:
            _family(fam)
        if s.n_indices < 1 or not s.seeds or not s.contamination:
            raise ConfigError("sweep: need n_indices >= 1, seeds and contamination levels")
        for c in s.contamination:
            if not 0 <= c <= 0.8:
                raise ConfigError(f"sweep contamination {c} outside [0, 0.8]")
        for fam in s.families:
            for v in index_grid(fam, s.n_indices, s.index_values):
                _check_index(fam, v)
        return self


def _family(name) -> Family:
    try:
        return Family.coerce(name)
    except ValueError:
        raise ConfigError(f"unknown family {name!r}") from None


def _check_index(family, value) -> EntropicIndex:
    fam = _family(family)
    try:
        idx = EntropicIndex.parse(fam, None if fam is Family.GAUSSIAN else value)
        idx.check_objective_range()
    except IndexRangeError as exc:
        raise ConfigError(str(exc)) from exc
    return idx


def index_grid(family, n: int, explicit=()) -> list:
    """Index values for a sweep: ``explicit`` if given, else ``n`` uniform
    values across the family's sweep range, conventional end first."""
    fam = _family(family)
    if explicit:
        return [float(v) for v in explicit]
    if fam is Family.GAUSSIAN:
        return [float("nan")]
    lo, hi = SWEEP_RANGE[fam]
    if n == 1:
        return [float(hi)]
    return [float(v) for v in np.linspace(lo, hi, n)]


def _to_plain(obj):
    if isinstance(obj, dict):
        return {k: _to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_plain(v) for v in obj]
    return obj


def _build(cls, data, where):
    if not isinstance(data, dict):
        raise ConfigError(f"{where or 'config'}: expected a table")
    known = {f.name: f for f in fields(cls)}
    unknown = sorted(set(data) - set(known))
    if unknown:
        raise ConfigError(f"unknown key(s) in {where or 'config'}: {', '.join(unknown)}")
    kwargs = {}
    for name, value in data.items():
        f = known[name]
        default = f.default if f.default is not dataclasses.MISSING else f.default_factory()
        key = f"{where}.{name}" if where else name
        if dataclasses.is_dataclass(default):
            kwargs[name] = _build(type(default), value, key)
        else:
            kwargs[name] = _coerce(value, default, key)
    return cls(**kwargs)


def _coerce(value, default, key):
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"{key}: expected a boolean")
        return value
    if isinstance(default, int):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{key}: expected an integer")
        return value
    if isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{key}: expected a number")
        if math.isnan(float(value)):
            raise ConfigError(f"{key}: NaN not allowed")
        return float(value)
    if isinstance(default, str):
        if not isinstance(value, str):
            raise ConfigError(f"{key}: expected a string")
        return value
    if isinstance(default, tuple):
        if not isinstance(value, (list, tuple)):
            raise ConfigError(f"{key}: expected a list")
        return tuple(value)
    raise ConfigError(f"{key}: unsupported value")  # pragma: no cover


def load_config(path=None) -> Config:
    """Parse a TOML config file (or return the defaults when ``path`` is None)."""
    if path is None:
        return Config().validate()
    try:
        with open(Path(path), "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML in {path}: {exc}") from exc
    try:
        return Config.from_mapping(data).validate()
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc


def dump_toml(cfg: Config) -> str:
    """Serialize ``cfg`` as TOML that :func:`load_config` reads back."""
    d = cfg.to_dict()
    lines = []
    for k, v in d.items():
        if not isinstance(v, dict):
            lines.append(f"{k} = {_toml_value(v)}")
    for k, v in d.items():
        if isinstance(v, dict):
            lines.append(f"\n[{k}]")
            lines.extend(f"{kk} = {_toml_value(vv)}" for kk, vv in v.items())
    return "\n".join(lines) + "\n"


def _toml_value(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    if isinstance(v, int):
        return str(v)
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, list):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    raise TypeError(type(v))  # pragma: no cover
