"""Hot numeric kernels: misfit sums, influence kernels, 1-D convolution.

Each kernel has a loop form compiled with numba and a vectorized numpy form.
``BACKEND`` names the one the public names are bound to.
"""
import math

import numpy as np

from ._accel import USE_NUMBA, njit

# --- log family: scale * sum(log1p(c x^2)); covers Renyi and Tsallis ---------


@njit
def _nb_log_objective(x, c, scale):
    s = 0.0
    for i in range(x.shape[0]):
        s += math.log1p(c * x[i] * x[i])
    return scale * s


@njit
def _nb_log_influence(x, c, scale):
    out = np.empty_like(x)
    g = 2.0 * c * scale
    for i in range(x.shape[0]):
        out[i] = g * x[i] / (1.0 + c * x[i] * x[i])
    return out


def _np_log_objective(x, c, scale):
    return scale * float(np.sum(np.log1p(c * x * x)))


def _np_log_influence(x, c, scale):
    return 2.0 * c * scale * x / (1.0 + c * x * x)


# --- asinh family: (1/kappa) * sum(asinh(kappa*beta*x^2)); Kaniadakis -------


@njit
def _nb_asinh_objective(x, kb, inv_k):
    s = 0.0
    for i in range(x.shape[0]):
        s += math.asinh(kb * x[i] * x[i])
    return inv_k * s


@njit
def _nb_asinh_influence(x, kb, two_beta):
    out = np.empty_like(x)
    for i in range(x.shape[0]):
        x2 = x[i] * x[i]
        out[i] = two_beta * x[i] / math.sqrt(1.0 + kb * kb * x2 * x2)
    return out


def _np_asinh_objective(x, kb, inv_k):
    return inv_k * float(np.sum(np.arcsinh(kb * x * x)))


def _np_asinh_influence(x, kb, two_beta):
    x2 = x * x
    return two_beta * x / np.sqrt(1.0 + kb * kb * x2 * x2)


# --- quadratic --------------------------------------------------------------


@njit
def _nb_half_sumsq(x):
    s = 0.0
    for i in range(x.shape[0]):
        s += x[i] * x[i]
    return 0.5 * s


def _np_half_sumsq(x):
    return 0.5 * float(np.dot(x, x))


# --- full convolution and its adjoint (valid correlation) -------------------


@njit
def _nb_convolve_full(r, w):
    n, nw = r.shape[0], w.shape[0]
    out = np.zeros(n + nw - 1)
    for i in range(n):
        ri = r[i]
        for j in range(nw):
            out[i + j] += ri * w[j]
    return out


@njit
def _nb_correlate_valid(d, w):
    nw = w.shape[0]
    n = d.shape[0] - nw + 1
    out = np.zeros(n)
    for k in range(n):
        s = 0.0
        for j in range(nw):
            s += w[j] * d[k + j]
        out[k] = s
    return out


def _np_convolve_full(r, w):
    return np.convolve(r, w)


def _np_correlate_valid(d, w):
    return np.correlate(d, w, mode="valid")


if USE_NUMBA:
    BACKEND = "numba"
    log_objective = _nb_log_objective
    log_influence = _nb_log_influence
    asinh_objective = _nb_asinh_objective
    asinh_influence = _nb_asinh_influence
    half_sumsq = _nb_half_sumsq
    convolve_full = _nb_convolve_full
    correlate_valid = _nb_correlate_valid
else:
    BACKEND = "numpy"
    log_objective = _np_log_objective
    log_influence = _np_log_influence
    asinh_objective = _np_asinh_objective
    asinh_influence = _np_asinh_influence
    half_sumsq = _np_half_sumsq
    convolve_full = _np_convolve_full
    correlate_valid = _np_correlate_valid

PAIRS = {
    "log_objective": (_nb_log_objective, _np_log_objective),
    "log_influence": (_nb_log_influence, _np_log_influence),
    "asinh_objective": (_nb_asinh_objective, _np_asinh_objective),
    "asinh_influence": (_nb_asinh_influence, _np_asinh_influence),
    "half_sumsq": (_nb_half_sumsq, _np_half_sumsq),
    "convolve_full": (_nb_convolve_full, _np_convolve_full),
    "correlate_valid": (_nb_correlate_valid, _np_correlate_valid),
}
