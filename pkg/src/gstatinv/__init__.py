"""Robust linear inversion with misfits built from the Renyi, Tsallis and
Kaniadakis generalized-Gaussian error laws."""

__version__ = "0.1.0"

from .gstat import (
    EntropicIndex,
    Family,
    IndexRangeError,
    KaniadakisConstants,
    PoleError,
    gaussian_pdf,
    influence_kernel,
    kaniadakis_constants,
    kaniadakis_pdf,
    objective,
    objective_gradient,
    pdf,
    renyi_pdf,
    tsallis_pdf,
)
from .metrics import MetricReport, mae, pearson_r
from .operators import (
    LinearOperator,
    MatrixOperator,
    Wavelet,
    convolution_operator,
    derivative_operator,
    line_design_matrix,
    psi_operator,
    ricker,
)
from .solver import InversionProblem, ModelEstimate, SolverSettings, StopReason, minimize, residual

__all__ = [
    "EntropicIndex", "Family", "IndexRangeError", "KaniadakisConstants", "PoleError",
    "gaussian_pdf", "renyi_pdf", "tsallis_pdf", "kaniadakis_pdf", "kaniadakis_constants",
    "pdf", "objective", "influence_kernel", "objective_gradient",
    "LinearOperator", "MatrixOperator", "Wavelet", "ricker", "line_design_matrix",
    "derivative_operator", "convolution_operator", "psi_operator",
    "InversionProblem", "ModelEstimate", "SolverSettings", "StopReason", "minimize", "residual",
    "MetricReport", "mae", "pearson_r",
]
