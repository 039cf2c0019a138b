"""Nonlinear conjugate-gradient minimization of a misfit over model space.

Polak-Ribiere with the non-negativity reset (PR+), periodic restarts, and a
backtracking Armijo line search seeded by one quadratic-interpolation trial.
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .gstat import EntropicIndex, misfit
from .operators import LinearOperator

log = logging.getLogger(__name__)


class StopReason(str, enum.Enum):
    TOLERANCE = "tolerance"
    MAX_ITERATIONS = "max_iterations"
    LINE_SEARCH_FAILURE = "line_search_failure"


class NonFiniteError(FloatingPointError):
    """Objective or gradient became non-finite; ``iterate`` holds the model."""

    def __init__(self, message, iterate):
        super().__init__(message)
        self.iterate = iterate


@dataclass(frozen=True)
class LineSearchSettings:
    initial_step: float = 1.0       # length of the first trial move in model space
    shrink: float = 0.5
    sufficient_decrease: float = 1e-4
    growth: float = 2.0             # next trial step = growth * last accepted step
    max_backtracks: int = 60

    def __post_init__(self):
        if not self.initial_step > 0:
            raise ValueError("initial_step must be positive")
        if not 0 < self.shrink < 1:
            raise ValueError("shrink must lie in (0, 1)")
        if not 0 < self.sufficient_decrease < 1:
            raise ValueError("sufficient_decrease must lie in (0, 1)")
        if not self.growth >= 1:
            raise ValueError("growth must be >= 1")
        if self.max_backtracks < 1:
            raise ValueError("max_backtracks must be >= 1")


@dataclass(frozen=True)
class SolverSettings:
    max_iterations: int = 10
    tolerance: float = 1e-12
    line_search: LineSearchSettings = field(default_factory=LineSearchSettings)
    restart_period: Optional[int] = None  # None: number of model parameters

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.restart_period is not None and self.restart_period < 1:
            raise ValueError("restart_period must be >= 1")


@dataclass
class InversionProblem:
    observed: np.ndarray
    operator: LinearOperator
    index: EntropicIndex
    initial_model: np.ndarray
    settings: SolverSettings = field(default_factory=SolverSettings)

    def __post_init__(self):
        self.observed = np.ascontiguousarray(self.observed, dtype=float)
        self.initial_model = np.ascontiguousarray(self.initial_model, dtype=float)
        if self.observed.shape != (self.operator.rows,):
            raise ValueError(
                f"observed length {self.observed.shape} != operator rows {self.operator.rows}")
        if self.initial_model.shape != (self.operator.cols,):
            raise ValueError(
                f"initial model length {self.initial_model.shape} != operator cols {self.operator.cols}")
        if not np.all(np.isfinite(self.observed)):
            raise ValueError("observed data contains non-finite values")
        if not np.all(np.isfinite(self.initial_model)):
            raise ValueError("initial model contains non-finite values")


@dataclass
class ModelEstimate:
    model: np.ndarray
    objective_trace: np.ndarray   # objective at m0, then after every iteration
    iterations_used: int
    converged: bool
    stop_reason: StopReason


def residual(model, problem: InversionProblem) -> np.ndarray:
    """``observed - G(model)``."""
    return problem.observed - problem.operator.forward(model)


def _line_search(fun, m, f0, g0p, p, step, ls: LineSearchSettings):
    """Return (step, m_new, f_new) satisfying Armijo, or None."""
    c1 = ls.sufficient_decrease
    a = step
    for _ in range(ls.max_backtracks):
        m_a = m + a * p
        f_a = fun(m_a)
        if math.isfinite(f_a):
            # one quadratic fit through f(0), f'(0) and f(a)
            curv = f_a - f0 - a * g0p
            if curv > 0:
                a_q = -g0p * a * a / (2.0 * curv)
                if a_q > 0 and a_q != a:
                    m_q = m + a_q * p
                    f_q = fun(m_q)
                    if math.isfinite(f_q) and f_q < f_a and f_q <= f0 + c1 * a_q * g0p:
                        a, m_a, f_a = a_q, m_q, f_q
            if f_a <= f0 + c1 * a * g0p:
                return a, m_a, f_a
        a *= ls.shrink
    return None


def ncg(fun: Callable, grad: Callable, x0, settings: SolverSettings = SolverSettings()) -> ModelEstimate:
    """Minimize ``fun`` from ``x0`` given its gradient ``grad``.

    Stops when ``|grad| <= tolerance * (1 + |f|)`` or after ``max_iterations``
    outer iterations. A failed line search returns the last accepted iterate
    with ``stop_reason=LINE_SEARCH_FAILURE``.
    """
    ls = settings.line_search
    m = np.array(x0, dtype=float)
    restart = settings.restart_period or m.size

    f = fun(m)
    g = grad(m)
    if not math.isfinite(f) or not np.all(np.isfinite(g)):
        raise NonFiniteError("non-finite objective or gradient at the initial model", m)
    trace = [f]

    def done(f, g):
        return float(np.linalg.norm(g)) <= settings.tolerance * (1.0 + abs(f))

    if done(f, g):
        return ModelEstimate(m, np.array(trace), 0, True, StopReason.TOLERANCE)

    p = -g
    step = None
    it = 0
    reason = StopReason.MAX_ITERATIONS
    while it < settings.max_iterations:
        gp = float(g @ p)
        if gp >= 0:
            p, gp = -g, -float(g @ g)
        trial = step * ls.growth if step else ls.initial_step / float(np.linalg.norm(p))
        found = _line_search(fun, m, f, gp, p, trial, ls)
        if found is None and not np.array_equal(p, -g):
            # retry along steepest descent before giving up
            p, gp = -g, -float(g @ g)
            found = _line_search(fun, m, f, gp, p, ls.initial_step / float(np.linalg.norm(p)), ls)
        if found is None:
            reason = StopReason.LINE_SEARCH_FAILURE
            log.debug("line search failed at iteration %d (f=%g)", it, f)
            break

        step, m, f = found
        g_new = grad(m)
        if not np.all(np.isfinite(g_new)):
            raise NonFiniteError(f"non-finite gradient at iteration {it + 1}", m)
        it += 1
        trace.append(f)
        if done(f, g_new):
            reason = StopReason.TOLERANCE
            g = g_new
            break
        if it % restart == 0:
            beta = 0.0
        else:
            beta = max(float(g_new @ (g_new - g)) / float(g @ g), 0.0)
        p = -g_new + beta * p
        g = g_new

    return ModelEstimate(
        model=m,
        objective_trace=np.array(trace),
        iterations_used=it,
        converged=reason is StopReason.TOLERANCE,
        stop_reason=reason,
    )


def minimize(problem: InversionProblem) -> ModelEstimate:
    """Minimize the problem's misfit of ``observed - G m`` over ``m``."""
    mf = misfit(problem.index)
    G, d = problem.operator, problem.observed

    def fun(m):
        return mf.value(d - G.forward(m))

    def grad(m):
        return -G.adjoint(mf.influence(d - G.forward(m)))

    return ncg(fun, grad, problem.initial_model, problem.settings)
