"""Deformed-Gaussian error laws and their maximum-likelihood misfits.

Four families share one interface: the standard Gaussian and the Renyi
(alpha), Tsallis (q) and Kaniadakis (kappa) generalizations. For each family
this module provides the density, its normalizing constant, the misfit
(negative log-likelihood up to constants) and the per-sample influence kernel
d(misfit)/d(residual).

All gamma-function ratios are evaluated as exponentials of log-gamma
differences so indices close to the Gaussian limit, where the gamma arguments
grow without bound, stay finite.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from . import kernels

LIMIT_TOL = 1e-8
KAPPA_MAX = 2.0 / 3.0
_SQRT_2PI = math.sqrt(2.0 * math.pi)


class IndexRangeError(ValueError):
    """An entropic index lies outside the range allowed for the requested use."""


class PoleError(IndexRangeError):
    """A normalizing constant hits a pole of the gamma function."""


class Family(str, enum.Enum):
    GAUSSIAN = "gaussian"
    RENYI = "renyi"
    TSALLIS = "tsallis"
    KANIADAKIS = "kaniadakis"

    @classmethod
    def coerce(cls, family) -> "Family":
        if isinstance(family, cls):
            return family
        return cls(str(family).strip().lower())


# Conventional (Gaussian) value of each index.
CONVENTIONAL = {Family.RENYI: 1.0, Family.TSALLIS: 1.0, Family.KANIADAKIS: 0.0}

# Index ranges swept by the experiments, conventional end first.
SWEEP_RANGE = {
    Family.RENYI: (1.0, 0.3334),
    Family.TSALLIS: (1.0, 2.9999),
    Family.KANIADAKIS: (0.0, 0.6666),
}


@dataclass(frozen=True)
class EntropicIndex:
    """A statistic family plus its index value (alpha, q or kappa).

    Construction checks the widest range in which the family's density is
    defined. Misfit and influence evaluation additionally require the
    narrower objective range, see :meth:`check_objective_range`.
    """

    family: Family
    value: Optional[float] = None

    def __post_init__(self):
        fam = Family.coerce(self.family)
        object.__setattr__(self, "family", fam)
        if fam is Family.GAUSSIAN:
            if self.value is not None:
                raise IndexRangeError("the Gaussian family takes no index value")
            return
        if self.value is None:
            raise IndexRangeError(f"{fam.value} requires an index value")
        v = float(self.value)
        object.__setattr__(self, "value", v)
        if not math.isfinite(v):
            raise IndexRangeError(f"{fam.value} index must be finite, got {v}")
        if fam is Family.RENYI and not v > 1.0 / 3.0:
            raise IndexRangeError(f"Renyi alpha must exceed 1/3, got {v}")
        if fam is Family.TSALLIS and not v < 3.0:
            raise IndexRangeError(f"Tsallis q must be below 3, got {v}")
        if fam is Family.KANIADAKIS and not 0.0 <= v < KAPPA_MAX:
            raise IndexRangeError(f"Kaniadakis kappa must lie in [0, 2/3), got {v}")

    @classmethod
    def gaussian(cls) -> "EntropicIndex":
        return cls(Family.GAUSSIAN)

    @classmethod
    def renyi(cls, alpha: float) -> "EntropicIndex":
        return cls(Family.RENYI, alpha)

    @classmethod
    def tsallis(cls, q: float) -> "EntropicIndex":
        return cls(Family.TSALLIS, q)

    @classmethod
    def kaniadakis(cls, kappa: float) -> "EntropicIndex":
        return cls(Family.KANIADAKIS, kappa)

    @classmethod
    def parse(cls, family, value=None) -> "EntropicIndex":
        fam = Family.coerce(family)
        if fam is Family.GAUSSIAN:
            return cls(fam)
        return cls(fam, value)

    @property
    def is_conventional(self) -> bool:
        """True when the index sits within ``LIMIT_TOL`` of the Gaussian limit."""
        if self.family is Family.GAUSSIAN:
            return True
        return abs(self.value - CONVENTIONAL[self.family]) <= LIMIT_TOL

    def check_objective_range(self) -> None:
        v = self.value
        if self.family is Family.RENYI and not (1.0 / 3.0 < v <= 1.0 + LIMIT_TOL):
            raise IndexRangeError(f"Renyi misfit needs alpha in (1/3, 1], got {v}")
        if self.family is Family.TSALLIS and not (1.0 - LIMIT_TOL <= v < 3.0):
            raise IndexRangeError(f"Tsallis misfit needs q in [1, 3), got {v}")

    def __str__(self):
        if self.family is Family.GAUSSIAN:
            return "gaussian"
        return f"{self.family.value}({self.value:g})"


def _as_index(idx) -> EntropicIndex:
    if isinstance(idx, EntropicIndex):
        return idx
    raise TypeError(f"expected EntropicIndex, got {type(idx).__name__}")


# ---------------------------------------------------------------------------
# Normalizing constants
# ---------------------------------------------------------------------------


def renyi_normalizer(alpha: float) -> float:
    """A_alpha, the normalizing constant of the alpha-Gaussian."""
    a = float(alpha)
    if not a > 1.0 / 3.0 or a == 1.0:
        raise IndexRangeError(f"alpha must lie in (1/3, 1) or (1, inf), got {a}")
    if a < 1.0:
        pre = math.sqrt((1.0 - a) / ((3.0 * a - 1.0) * math.pi))
        lg = math.lgamma(1.0 / (1.0 - a)) - math.lgamma((1.0 + a) / (2.0 * (1.0 - a)))
    else:
        pre = math.sqrt((a - 1.0) / ((3.0 * a - 1.0) * math.pi))
        lg = math.lgamma((3.0 * a - 1.0) / (2.0 * (a - 1.0))) - math.lgamma(a / (a - 1.0))
    return pre * math.exp(lg)


def tsallis_normalizer(q: float) -> float:
    """A_q, the normalizing constant of the q-Gaussian."""
    q = float(q)
    if not q < 3.0 or q == 1.0:
        raise IndexRangeError(f"q must lie in (-inf, 1) or (1, 3), got {q}")
    if q < 1.0:
        pre = math.sqrt((1.0 - q) / ((3.0 - q) * math.pi))
        lg = math.lgamma((5.0 - 3.0 * q) / (2.0 * (1.0 - q))) - math.lgamma((2.0 - q) / (1.0 - q))
    else:
        pre = math.sqrt((q - 1.0) / ((3.0 - q) * math.pi))
        lg = math.lgamma(1.0 / (q - 1.0)) - math.lgamma((3.0 - q) / (2.0 * (q - 1.0)))
    return pre * math.exp(lg)


@dataclass(frozen=True)
class KaniadakisConstants:
    beta: float
    a: float


@lru_cache(maxsize=4096)
def _kaniadakis_constants(kappa: float, convention: str) -> KaniadakisConstants:
    k = abs(kappa)
    n = 1.0 / (2.0 * k)
    if n - 0.75 <= 0.0:
        raise PoleError(f"beta_kappa has a gamma pole at kappa={kappa} (needs kappa < 2/3)")
    pre = (1.0 + k / 2.0) / (2.0 * k * (2.0 + 3.0 * k))
    if convention == "swapped_gamma":
        lg = (math.lgamma(n - 0.75) - math.lgamma(n + 0.25)
              + math.lgamma(n + 0.75) - math.lgamma(n - 0.25))
    else:
        # second moment of exp_kappa(-y^2) over its mass; gives unit variance
        lg = (math.lgamma(n - 0.75) - math.lgamma(n + 0.75)
              + math.lgamma(n + 0.25) - math.lgamma(n - 0.25))
    beta = pre * math.exp(lg)
    a = ((1.0 + k / 2.0) * math.sqrt(2.0 * k * beta / math.pi)
         * math.exp(math.lgamma(n + 0.25) - math.lgamma(n - 0.25)))
    return KaniadakisConstants(beta=beta, a=a)


def kaniadakis_constants(kappa: float, convention: str = "unit_variance") -> KaniadakisConstants:
    """beta_kappa and A_kappa for ``0 < kappa < 2/3``, memoized per kappa.

    ``convention="unit_variance"`` (default) returns the beta that gives the
    density unit variance and tends to 1/2 as kappa -> 0.
    ``convention="swapped_gamma"`` exchanges the +1/4 and +3/4 gamma
    arguments; that variant diverges like 1/(4 kappa) near the Gaussian limit
    and does not give unit variance. ``a`` always multiplies the density.
    """
    if convention not in ("unit_variance", "swapped_gamma"):
        raise ValueError(f"unknown convention {convention!r}")
    k = float(kappa)
    if not math.isfinite(k) or k <= 0.0:
        raise IndexRangeError(f"kappa must be positive, got {k}")
    if k >= KAPPA_MAX:
        raise PoleError(f"beta_kappa has a gamma pole at kappa={k} (needs kappa < 2/3)")
    return _kaniadakis_constants(k, convention)


# ---------------------------------------------------------------------------
# Densities
# ---------------------------------------------------------------------------


def gaussian_pdf(x):
    x = np.asarray(x, dtype=float)
    return np.exp(-0.5 * x * x) / _SQRT_2PI


def renyi_pdf(x, alpha: EntropicIndex):
    idx = _as_index(alpha)
    if idx.family is not Family.RENYI:
        raise IndexRangeError(f"renyi_pdf needs a Renyi index, got {idx}")
    if idx.is_conventional:
        return gaussian_pdf(x)
    a = idx.value
    x = np.asarray(x, dtype=float)
    bracket = 1.0 - (a - 1.0) / (3.0 * a - 1.0) * x * x
    pos = bracket > 0.0
    out = np.zeros_like(bracket)
    out[pos] = renyi_normalizer(a) * bracket[pos] ** (1.0 / (a - 1.0))
    return out if out.ndim else out[()]


def tsallis_pdf(x, q: EntropicIndex):
    idx = _as_index(q)
    if idx.family is not Family.TSALLIS:
        raise IndexRangeError(f"tsallis_pdf needs a Tsallis index, got {idx}")
    if idx.is_conventional:
        return gaussian_pdf(x)
    qv = idx.value
    x = np.asarray(x, dtype=float)
    bracket = 1.0 + (qv - 1.0) / (3.0 - qv) * x * x
    pos = bracket > 0.0
    out = np.zeros_like(bracket)
    out[pos] = tsallis_normalizer(qv) * bracket[pos] ** (1.0 / (1.0 - qv))
    return out if out.ndim else out[()]


def kaniadakis_pdf(x, kappa: EntropicIndex, convention: str = "unit_variance"):
    idx = _as_index(kappa)
    if idx.family is not Family.KANIADAKIS:
        raise IndexRangeError(f"kaniadakis_pdf needs a Kaniadakis index, got {idx}")
    if idx.is_conventional:
        return gaussian_pdf(x)
    k = idx.value
    c = kaniadakis_constants(k, convention)
    x = np.asarray(x, dtype=float)
    # exp_kappa(-u) = exp(-asinh(kappa*u)/kappa); no cancellation for large u
    u = c.beta * x * x
    return c.a * np.exp(-np.arcsinh(k * u) / k)


def pdf(x, idx: EntropicIndex):
    """Density of any family, dispatching on ``idx.family``."""
    idx = _as_index(idx)
    if idx.family is Family.GAUSSIAN:
        return gaussian_pdf(x)
    return {
        Family.RENYI: renyi_pdf,
        Family.TSALLIS: tsallis_pdf,
        Family.KANIADAKIS: kaniadakis_pdf,
    }[idx.family](x, idx)


def support(idx: EntropicIndex) -> float:
    """Half-width of the density's support (``inf`` for unbounded support)."""
    idx = _as_index(idx)
    if idx.is_conventional or idx.family is Family.KANIADAKIS:
        return math.inf
    v = idx.value
    if idx.family is Family.RENYI and v > 1.0:
        return math.sqrt((3.0 * v - 1.0) / (v - 1.0))
    if idx.family is Family.TSALLIS and v < 1.0:
        return math.sqrt((3.0 - v) / (1.0 - v))
    return math.inf


# ---------------------------------------------------------------------------
# Misfits and influence kernels
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Misfit:
    """Precomputed misfit for one index: ``value(x)`` and ``influence(x)``.

    Inputs are assumed finite float64 1-D arrays; the solver calls these in its
    inner loop, so no validation happens here.
    """

    index: EntropicIndex
    value: Callable[[np.ndarray], float]
    influence: Callable[[np.ndarray], np.ndarray]


@lru_cache(maxsize=4096)
def misfit(idx: EntropicIndex) -> Misfit:
    """Build the misfit/influence pair for ``idx`` (cached per index)."""
    idx = _as_index(idx)
    idx.check_objective_range()
    if idx.is_conventional:
        return Misfit(idx, kernels.half_sumsq, lambda x: x.copy())

    v = idx.value
    if idx.family in (Family.RENYI, Family.TSALLIS):
        if idx.family is Family.RENYI:
            c, scale = (1.0 - v) / (3.0 * v - 1.0), 1.0 / (1.0 - v)
        else:
            c, scale = (v - 1.0) / (3.0 - v), 1.0 / (v - 1.0)
        # objective ranges keep the log argument 1 + c x^2 >= 1
        assert c > 0.0 and scale > 0.0, (idx, c, scale)
        return Misfit(
            idx,
            lambda x: kernels.log_objective(x, c, scale),
            lambda x: kernels.log_influence(x, c, scale),
        )

    const = kaniadakis_constants(v)
    kb, inv_k, two_beta = v * const.beta, 1.0 / v, 2.0 * const.beta
    return Misfit(
        idx,
        lambda x: kernels.asinh_objective(x, kb, inv_k),
        lambda x: kernels.asinh_influence(x, kb, two_beta),
    )


def _residual_array(x) -> np.ndarray:
    arr = np.ascontiguousarray(np.atleast_1d(np.asarray(x, dtype=float)))
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("residual must be a non-empty 1-D array")
    if not np.all(np.isfinite(arr)):
        raise ValueError("residual contains non-finite values")
    return arr


def objective(x, idx: EntropicIndex) -> float:
    """Misfit of the residual vector ``x`` under the error law ``idx``.

    Gaussian: ``0.5 * sum(x**2)``. Renyi, Tsallis: scaled sums of
    ``log(1 + c x**2)``. Kaniadakis: ``-(1/kappa) * sum(log(sqrt(1 + (kappa
    beta x^2)^2) - kappa beta x^2))``. Indices within ``LIMIT_TOL`` of the
    Gaussian limit use the Gaussian form.
    """
    return float(misfit(_as_index(idx)).value(_residual_array(x)))


def influence_kernel(x, idx: EntropicIndex):
    """Per-sample derivative of the misfit with respect to the residual."""
    scalar = np.ndim(x) == 0
    out = misfit(_as_index(idx)).influence(_residual_array(x))
    return float(out[0]) if scalar else out


def objective_gradient(residual, operator, idx: EntropicIndex) -> np.ndarray:
    """Gradient of the misfit with respect to the model, for ``x = d - G m``.

    Equals ``-G^T influence_kernel(x)``; for the Gaussian family ``-G^T x``.
    """
    x = _residual_array(residual)
    if x.size != operator.rows:
        raise ValueError(f"residual length {x.size} != operator rows {operator.rows}")
    return -operator.adjoint(misfit(_as_index(idx)).influence(x))
