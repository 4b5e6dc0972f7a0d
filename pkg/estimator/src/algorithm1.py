"""
Alternating minimization for the l0 outlier objective.

Start from the coordinate-wise median, then repeat: solve the relaxed h-update
at the current center (Step 1), threshold it, and replace the center by the
mean of the retained samples (Step 2). The loop stops the first time the
thresholded l0 count fails to strictly decrease.
"""

# standard libs
import logging
from dataclasses import dataclass
from typing import Optional

# 3rd party
import numpy as np

# local
import solvers
import spectral
from baselines import coordinate_median
from data_loader import DTYPE, as_matrix
from indicator import DEFAULT_TAU, MomentBound, OutlierIndicator, threshold_support  # noqa: F401
from solvers import IrlsConfig, Tolerances

logger = logging.getLogger(__name__)

# constants
METHODS = ["l1", "lp"]
TERMINATIONS = ["l0-non-decreasing", "iteration-cap", "degenerate-empty-inliers"]
PRACTICAL_ITERATION_CAP = 50


class EstimationError(RuntimeError):
    """A Step-1 solver failed; l0_trace holds the iterations completed so far."""

    def __init__(self, message, l0_trace, center):
        super().__init__(message)
        self.l0_trace = tuple(l0_trace)
        self.center = center


@dataclass(frozen=True)
class EstimateResult:
    mean: np.ndarray
    indicator: OutlierIndicator
    l0_trace: tuple
    outer_iterations: int
    termination: str
    method: str
    # binary indicator and mean meet the moment constraint within feas_tol
    feasible: bool
    reports: tuple = ()


def update_mean(data, inliers):
    values = as_matrix(data)
    inliers = np.asarray(inliers, dtype=int).reshape(-1)
    if inliers.size == 0:
        raise ValueError("update_mean needs at least one inlier")
    return values[inliers].mean(axis=0)


def binary_feasible(data, center, bound, support, feas_tol=solvers.DEFAULT_FEAS_TOL):
    values = as_matrix(data)
    weights = np.ones(values.shape[0], dtype=DTYPE)
    weights[np.asarray(support, dtype=int)] = 0.0
    scatter = spectral.weighted_scatter(values, center, weights)
    try:
        top = spectral.lambda_max(scatter).value
    except spectral.SpectralConvergenceError as e:
        top = e.pair.value
    return top <= bound.rho() * (1.0 + feas_tol)


def restore_feasible_rounding(data, center, bound, indicator, feas_tol=solvers.DEFAULT_FEAS_TOL):
    """Lower tau until the rounded indicator is feasible at `center`.

    Candidate thresholds are the distinct h values below tau; the largest
    feasible one is found by bisection since growing the support only shrinks
    the scatter. Returns (indicator, feasible); the input comes back unchanged
    when no candidate is feasible.
    """
    if binary_feasible(data, center, bound, indicator.support, feas_tol):
        return indicator, True

    candidates = np.unique(indicator.h[indicator.h < indicator.tau])[::-1]
    lo, hi = 0, len(candidates)
    while lo < hi:
        mid = (lo + hi) // 2
        if binary_feasible(data, center, bound, threshold_support(indicator.h, candidates[mid]), feas_tol):
            hi = mid
        else:
            lo = mid + 1

    if lo == len(candidates):
        logger.warning("no threshold below %.3g gives a feasible rounding", indicator.tau)
        return indicator, False

    logger.info("threshold lowered from %.3g to %.6g to keep the rounding feasible", indicator.tau, candidates[lo])
    return indicator.rethreshold(float(candidates[lo])), True


def _step_one(values, center, bound, method, cfg, tols, tau):
    if method == "l1":
        return solvers.solve_l1(values, center, bound, tols, tau)
    elif method == "lp":
        return solvers.solve_lp(values, center, bound, cfg, tols, tau)
    else:
        raise ValueError(f"method {method!r} unknown, expected one of {METHODS}")


def robust_mean(
    data,
    bound: MomentBound,
    method: str = "l1",
    cfg: Optional[IrlsConfig] = None,
    tau: float = DEFAULT_TAU,
    tols: Tolerances = Tolerances(),
    max_outer: int = PRACTICAL_ITERATION_CAP,
    restore_feasibility: bool = True,
):
    values = as_matrix(data)
    n = values.shape[0]
    if n < 2:
        raise ValueError(f"robust_mean needs n >= 2, got {n}")
    if method not in METHODS:
        raise ValueError(f"method {method!r} unknown, expected one of {METHODS}")
    if bound.n != n:
        raise ValueError(f"bound was built for n={bound.n}, data has {n} rows")
    if not 0.0 <= tau < 1.0:
        raise ValueError(f"tau must lie in [0, 1), got {tau}")
    if cfg is None:
        cfg = IrlsConfig()

    cap = min(n, max_outer)
    x = coordinate_median(values)
    prev_l0 = n + 1
    trace, reports = [], []
    indicator = None
    termination = "iteration-cap"

    for t in range(cap):
        try:
            step, report = _step_one(values, x, bound, method, cfg, tols, tau)
        except (RuntimeError, ValueError, FloatingPointError, np.linalg.LinAlgError) as e:
            raise EstimationError(f"step 1 failed at iteration {t}: {e}", trace, x) from e
        if restore_feasibility:
            step, _ = restore_feasible_rounding(values, x, bound, step, tols.feas_tol)

        trace.append(step.l0)
        reports.append(report)
        indicator = step
        logger.info("iteration %d: l0=%d tau=%.3g", t, step.l0, step.tau)

        if step.l0 >= prev_l0:
            termination = "l0-non-decreasing"
            break

        inliers = step.inliers()
        if inliers.size == 0:
            logger.warning("every sample was flagged at iteration %d, keeping the previous center", t)
            termination = "degenerate-empty-inliers"
            break

        x = update_mean(values, inliers)
        prev_l0 = step.l0

    feasible = termination != "degenerate-empty-inliers" and binary_feasible(values, x, bound, indicator.support, tols.feas_tol)
    return EstimateResult(
        mean=x,
        indicator=indicator,
        l0_trace=tuple(trace),
        outer_iterations=len(trace),
        termination=termination,
        method=method,
        feasible=feasible,
        reports=tuple(reports),
    )
