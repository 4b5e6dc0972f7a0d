"""Named estimators the harness can run side by side."""

# standard libs
from dataclasses import dataclass, field

# 3rd party
import numpy as np

# local
import algorithm1
import baselines
from indicator import DEFAULT_TAU, MIN_C1_SQUARED, MomentBound
from solvers import DEFAULT_FEAS_TOL, DEFAULT_OPT_TOL, DEFAULT_OUTER_REWEIGHTS, DEFAULT_P, IrlsConfig, Tolerances, VARIANTS

# constants
METHOD_LIST = ["mean", "cmedian", "gmedian", "filter", "l1", "lp"]
L0_METHODS = ["l1", "lp"]


@dataclass(frozen=True)
class MethodParams:
    sigma: float = 1.0
    c1_squared: float = MIN_C1_SQUARED
    p: float = DEFAULT_P
    tau: float = DEFAULT_TAU
    outer_reweights: int = DEFAULT_OUTER_REWEIGHTS
    variant: str = VARIANTS[0]
    opt_tol: float = DEFAULT_OPT_TOL
    feas_tol: float = DEFAULT_FEAS_TOL
    filter: baselines.FilterConfig = field(default_factory=baselines.FilterConfig)

    def irls(self):
        return IrlsConfig(p=self.p, outer_reweights=self.outer_reweights, inner_tol=self.opt_tol, variant=self.variant)

    def tolerances(self):
        return Tolerances(self.opt_tol, self.feas_tol)


@dataclass(frozen=True)
class MethodOutcome:
    mean: np.ndarray
    # filter rounds for the filter, alternation count for l1/lp, 0 otherwise
    outer_iterations: int = 0
    l0_trace: tuple = ()
    result: object = None


def _mean(values, params):
    return MethodOutcome(baselines.sample_mean(values))


def _cmedian(values, params):
    return MethodOutcome(baselines.coordinate_median(values))


def _gmedian(values, params):
    point, _ = baselines.geometric_median(values)
    return MethodOutcome(point)


def _filter(values, params):
    result = baselines.iterative_filter(values, params.sigma, params.filter)
    return MethodOutcome(result.mean, result.rounds, result=result)


def _l0(method):
    def run(values, params):
        bound = MomentBound(params.sigma, values.shape[0], params.c1_squared)
        result = algorithm1.robust_mean(
            values, bound, method=method, cfg=params.irls(), tau=params.tau, tols=params.tolerances()
        )
        return MethodOutcome(result.mean, result.outer_iterations, result.l0_trace, result)

    return run


def get_method(descriptor):
    if descriptor == "mean":
        return _mean
    elif descriptor == "cmedian":
        return _cmedian
    elif descriptor == "gmedian":
        return _gmedian
    elif descriptor == "filter":
        return _filter
    elif descriptor == "l1":
        return _l0("l1")
    elif descriptor == "lp":
        return _l0("lp")
    else:
        raise ValueError(f"method descriptor {descriptor!r} unknown! Choose one of {METHOD_LIST}")
