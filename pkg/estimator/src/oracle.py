"""
Exhaustive reference answers for tiny instances and a sigma helper.

brute_force_l0 enumerates binary indicators by increasing support size, so the
first feasible one is a minimum-cardinality witness (ties broken by the
lexicographic order of the support).
"""

# standard libs
import itertools
import logging
import math
from dataclasses import dataclass

# 3rd party
import numpy as np

# local
from data_loader import DTYPE, as_matrix
from spectral import SizeLimitError

logger = logging.getLogger(__name__)

# constants
MAX_ORACLE_POINTS = 14
FEASIBILITY_SLACK = 1e-9
CALIBRATION_LABEL = "heuristic: sqrt(lambda_max) of a known-clean subset's covariance"


@dataclass(frozen=True)
class OracleResult:
    min_l0: int
    support: tuple
    mean: np.ndarray
    checked: int


@dataclass(frozen=True)
class Calibration:
    sigma: float
    warnings: tuple
    label: str = CALIBRATION_LABEL


def brute_force_l0(data, bound, tau=0.5):
    """Minimum-support binary h meeting the moment constraint with x the mean
    of the retained samples. `tau` is accepted for symmetry with the relaxed
    solvers; binary indicators do not depend on it."""
    values = as_matrix(data)
    n = values.shape[0]
    if n > MAX_ORACLE_POINTS:
        raise SizeLimitError(f"brute_force_l0 enumerates 2^n supports; n={n} exceeds {MAX_ORACLE_POINTS}")
    if not 0.0 <= tau < 1.0:
        raise ValueError(f"tau must lie in [0, 1), got {tau}")

    limit = bound.rho() * (1.0 + FEASIBILITY_SLACK)
    checked = 0
    # at least one sample must stay to define x
    for size in range(n):
        for support in itertools.combinations(range(n), size):
            checked += 1
            keep = np.ones(n, dtype=bool)
            keep[list(support)] = False
            x = values[keep].mean(axis=0)
            deviations = values[keep] - x
            top = np.linalg.eigvalsh(deviations.T @ deviations)[-1]
            if top <= limit:
                logger.debug("oracle: feasible support %s after %d candidates", support, checked)
                return OracleResult(size, support, x, checked)

    raise RuntimeError("no feasible support found; a single retained sample is always feasible")


def calibrate_sigma(clean_subset):
    """sqrt of the top eigenvalue of the 1/m sample covariance of a clean subset."""
    values = as_matrix(clean_subset)
    m, d = values.shape
    warnings = []
    if m < math.ceil(d / 4.0):
        warnings.append(f"subset of {m} rows is smaller than d/4 = {d / 4.0:g}; the estimate is unreliable")

    deviations = values - values.mean(axis=0)
    covariance = (deviations.T @ deviations) / m
    top = float(np.linalg.eigvalsh(covariance.astype(DTYPE))[-1])
    sigma = math.sqrt(max(top, 0.0))
    if sigma == 0.0:
        warnings.append("all rows are identical; sigma is 0 and cannot be used as a bound")

    for message in warnings:
        logger.warning(message)
    return Calibration(sigma, tuple(warnings))
