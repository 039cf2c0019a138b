"""Linear forward operators with exact adjoints.

The post-stack seismic operator is ``G = W D``: ``D`` takes half the first
difference of log-impedance (reflectivity) and ``W`` convolves it with the
source wavelet.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels


def _vec(v, n: int, what: str) -> np.ndarray:
    arr = np.ascontiguousarray(v, dtype=float)
    if arr.ndim != 1 or arr.shape[0] != n:
        raise ValueError(f"{what} must have shape ({n},), got {arr.shape}")
    return arr


class LinearOperator:
    """Base class: subclasses set ``rows``/``cols`` and implement the two
    private application methods on validated float64 vectors."""

    rows: int
    cols: int

    @property
    def shape(self):
        return (self.rows, self.cols)

    def forward(self, m) -> np.ndarray:
        return self._forward(_vec(m, self.cols, "model"))

    def adjoint(self, d) -> np.ndarray:
        return self._adjoint(_vec(d, self.rows, "data"))

    def _forward(self, m):
        raise NotImplementedError

    def _adjoint(self, d):
        raise NotImplementedError

    def to_dense(self) -> np.ndarray:
        eye = np.eye(self.cols)
        return np.column_stack([self._forward(eye[:, j].copy()) for j in range(self.cols)])

    def __matmul__(self, other):
        if isinstance(other, LinearOperator):
            return ComposedOperator(self, other)
        return self.forward(other)

    def __repr__(self):
        return f"{type(self).__name__}(rows={self.rows}, cols={self.cols})"


class MatrixOperator(LinearOperator):
    def __init__(self, matrix):
        a = np.array(matrix, dtype=float)
        if a.ndim != 2 or 0 in a.shape:
            raise ValueError(f"matrix must be 2-D and non-empty, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("matrix contains non-finite entries")
        a.setflags(write=False)
        self.matrix = a
        self.rows, self.cols = a.shape

    def _forward(self, m):
        return self.matrix @ m

    def _adjoint(self, d):
        return self.matrix.T @ d

    def to_dense(self):
        return self.matrix.copy()


class IdentityOperator(LinearOperator):
    def __init__(self, n: int):
        self.rows = self.cols = int(n)

    def _forward(self, m):
        return m.copy()

    def _adjoint(self, d):
        return d.copy()


class DerivativeOperator(LinearOperator):
    """(n-1) x n operator, row i = (m[i+1] - m[i]) / 2."""

    def __init__(self, n: int):
        if n < 2:
            raise ValueError(f"derivative operator needs n >= 2, got {n}")
        self.cols = int(n)
        self.rows = self.cols - 1

    def _forward(self, m):
        return 0.5 * (m[1:] - m[:-1])

    def _adjoint(self, d):
        out = np.zeros(self.cols)
        out[:-1] -= 0.5 * d
        out[1:] += 0.5 * d
        return out


class ConvolutionOperator(LinearOperator):
    """Banded Toeplitz operator: full linear convolution with a wavelet.

    Maps n samples to ``n + len(w) - 1``; the adjoint is the valid-mode
    cross-correlation with the same wavelet.
    """

    def __init__(self, wavelet, n: int):
        if n < 1:
            raise ValueError(f"convolution operator needs n >= 1, got {n}")
        w = wavelet.samples if isinstance(wavelet, Wavelet) else wavelet
        w = np.ascontiguousarray(w, dtype=float)
        if w.ndim != 1 or w.size == 0 or not np.all(np.isfinite(w)):
            raise ValueError("wavelet samples must be a finite, non-empty 1-D array")
        w.setflags(write=False)
        self.w = w
        self.cols = int(n)
        self.rows = self.cols + w.size - 1

    def _forward(self, m):
        return kernels.convolve_full(m, self.w)

    def _adjoint(self, d):
        return kernels.correlate_valid(d, self.w)

    def toeplitz(self) -> np.ndarray:
        """Materialize the dense Toeplitz matrix explicitly from the wavelet."""
        out = np.zeros(self.shape)
        for j in range(self.cols):
            out[j:j + self.w.size, j] = self.w
        return out


class ComposedOperator(LinearOperator):
    """``outer @ inner``: forward = outer(inner(m)), adjoint = inner^T(outer^T(d))."""

    def __init__(self, outer: LinearOperator, inner: LinearOperator):
        if outer.cols != inner.rows:
            raise ValueError(f"cannot compose {outer.shape} with {inner.shape}")
        self.outer, self.inner = outer, inner
        self.rows, self.cols = outer.rows, inner.cols

    def _forward(self, m):
        return self.outer._forward(np.ascontiguousarray(self.inner._forward(m)))

    def _adjoint(self, d):
        return self.inner._adjoint(np.ascontiguousarray(self.outer._adjoint(d)))


@dataclass(frozen=True)
class Wavelet:
    samples: np.ndarray
    dt: float
    peak_frequency: float

    @property
    def times(self) -> np.ndarray:
        half = (self.samples.size - 1) // 2
        return (np.arange(self.samples.size) - half) * self.dt


def ricker_amplitude(t, peak_frequency: float):
    """(1 - 2 (pi f t)^2) exp(-(pi f t)^2), the Ricker pulse at times ``t``."""
    u = (math.pi * peak_frequency * np.asarray(t, dtype=float)) ** 2
    return (1.0 - 2.0 * u) * np.exp(-u)


def default_half_width(peak_frequency: float, dt: float, decay: float = 1e-4) -> float:
    """Smallest grid half-width >= 3/(pi f sqrt 2) where |w| has decayed below
    ``decay`` of the peak."""
    k = math.ceil(3.0 / (math.pi * peak_frequency * math.sqrt(2.0)) / dt - 1e-9)
    while abs(float(ricker_amplitude(k * dt, peak_frequency))) >= decay:
        k += 1
    return k * dt


def ricker(peak_frequency: float = 55.0, dt: float = 1e-3, half_width: float | None = None) -> Wavelet:
    """Zero-phase Ricker wavelet sampled on ``[-half_width, half_width]``."""
    if not peak_frequency > 0:
        raise ValueError(f"peak frequency must be positive, got {peak_frequency}")
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if half_width is None:
        half_width = default_half_width(peak_frequency, dt)
    if half_width < 0:
        raise ValueError(f"half_width must be non-negative, got {half_width}")
    k = int(math.floor(half_width / dt + 1e-9))
    t = np.arange(-k, k + 1) * dt
    samples = ricker_amplitude(t, peak_frequency)
    samples.setflags(write=False)
    return Wavelet(samples=samples, dt=float(dt), peak_frequency=float(peak_frequency))


def line_design_matrix(x) -> MatrixOperator:
    """N x 2 operator with rows ``[x_i, 1]`` so that ``G @ [m1, m2] = m1 x + m2``."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("x must be a non-empty 1-D array")
    if not np.all(np.isfinite(x)):
        raise ValueError("x contains non-finite values")
    return MatrixOperator(np.column_stack([x, np.ones_like(x)]))


def derivative_operator(n: int) -> DerivativeOperator:
    return DerivativeOperator(n)


def convolution_operator(w, n: int) -> ConvolutionOperator:
    return ConvolutionOperator(w, n)


def psi_operator(w, n_model: int) -> ComposedOperator:
    """Post-stack operator ``W D`` acting on an ``n_model`` log-impedance trace."""
    if n_model < 2:
        raise ValueError(f"n_model must be >= 2, got {n_model}")
    return ComposedOperator(ConvolutionOperator(w, n_model - 1), DerivativeOperator(n_model))
