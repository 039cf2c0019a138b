"""Comparison metrics between estimates and truth."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class DegenerateInputError(ValueError):
    """Correlation is undefined because an input has zero variance."""


@dataclass
class MetricReport:
    mae: float
    pearson_r: float
    extras: dict = field(default_factory=dict)


def _pair(a, b, min_len):
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.size != b.size:
        raise ValueError(f"length mismatch: {a.size} vs {b.size}")
    if a.size < min_len:
        raise ValueError(f"need at least {min_len} samples, got {a.size}")
    return a, b


def mae(a, b) -> float:
    """Mean absolute difference."""
    a, b = _pair(a, b, 1)
    return float(np.mean(np.abs(a - b)))


def pearson_r(z_true, z_rec) -> float:
    """Centered cosine similarity of two traces.

    Raises DegenerateInputError when either trace is constant.
    """
    a, b = _pair(z_true, z_rec, 2)
    da, db = a - a.mean(), b - b.mean()
    na, nb = math.sqrt(float(da @ da)), math.sqrt(float(db @ db))
    scale_a = max(float(np.max(np.abs(a))), 1e-300)
    scale_b = max(float(np.max(np.abs(b))), 1e-300)
    if na <= 1e-14 * scale_a * math.sqrt(a.size) or nb <= 1e-14 * scale_b * math.sqrt(b.size):
        raise DegenerateInputError("correlation undefined for a constant input")
    r = float(da @ db) / (na * nb)
    return min(1.0, max(-1.0, r))


def snr_db(clean, noisy) -> float:
    """``10 log10(P_clean / P_(noisy - clean))``."""
    c, n = _pair(clean, noisy, 1)
    p_noise = float(np.mean((n - c) ** 2))
    p_sig = float(np.mean(c * c))
    if p_noise == 0:
        return math.inf
    return 10.0 * math.log10(p_sig / p_noise)
