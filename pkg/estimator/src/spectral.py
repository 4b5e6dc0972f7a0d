"""
Dense symmetric-matrix primitives: weighted scatter matrices, the largest
eigenpair by power iteration, and the exhaustive resilience check.
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

logger = logging.getLogger(__name__)

# constants
DEFAULT_TOL = 1e-8
START_PERTURBATION = 1e-6
UNIT_NORM_SLACK = 1e-9
MAX_RESILIENCE_POINTS = 20


class SpectralConvergenceError(RuntimeError):
    def __init__(self, residual, pair):
        super().__init__(f"power iteration did not converge, last residual {residual:.3e}")
        self.residual = residual
        self.pair = pair


class SizeLimitError(ValueError):
    pass


@dataclass(frozen=True)
class SymMatrix:
    entries: np.ndarray

    def __post_init__(self):
        entries = np.array(self.entries, dtype=DTYPE)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1] or entries.shape[0] < 1:
            raise ValueError(f"expected a non-empty square matrix, got shape {entries.shape}")
        # exact symmetry by construction
        entries = 0.5 * (entries + entries.T)
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def dim(self):
        return self.entries.shape[0]

    def trace(self):
        return float(np.trace(self.entries))


@dataclass(frozen=True)
class EigPair:
    value: float
    vector: np.ndarray
    residual: float


def _entries(m):
    return m.entries if isinstance(m, SymMatrix) else SymMatrix(m).entries


def deviation_scatter(deviations, weights):
    """sum_i weights_i * dev_i dev_i^T for an n x d deviation matrix."""
    return deviations.T @ (deviations * weights[:, np.newaxis])


def weighted_scatter(data, center, weights):
    values = as_matrix(data)
    n, d = values.shape
    center = np.asarray(center, dtype=DTYPE).reshape(-1)
    weights = np.asarray(weights, dtype=DTYPE).reshape(-1)

    if center.shape[0] != d:
        raise ValueError(f"center has dimension {center.shape[0]}, data has dimension {d}")
    if weights.shape[0] != n:
        raise ValueError(f"weights has length {weights.shape[0]}, data has {n} rows")

    return SymMatrix(deviation_scatter(values - center, weights))


def start_vector(dim):
    v = np.ones(dim, dtype=DTYPE) / math.sqrt(dim)
    v[0] += START_PERTURBATION
    return v / np.linalg.norm(v)


def _power_iterate(a, v, tol, max_iter):
    """Returns (pair, converged) for the eigenvalue of largest magnitude."""
    pair = None
    for _ in range(max_iter):
        y = a @ v
        value = float(v @ y)
        residual = float(np.linalg.norm(y - value * v))
        pair = EigPair(value, v, residual)
        if residual <= tol * max(1.0, abs(value)):
            return pair, True

        y_norm = np.linalg.norm(y)
        if y_norm == 0.0:
            return pair, False
        v = y / y_norm

    return pair, False


def lambda_max(m, tol=DEFAULT_TOL, max_iter=None, v0=None):
    """Largest eigenvalue of a symmetric matrix and its unit eigenvector.

    Power iteration from the deterministic start vector, or from `v0` mixed
    with it for warm starts. When the dominant-magnitude eigenvalue is negative the iteration
    is repeated on the shifted matrix m - value * I, whose spectrum is
    nonnegative with the same top eigenvector.
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")

    a = _entries(m)
    dim = a.shape[0]
    if max_iter is None:
        max_iter = 10 * dim + 1000

    v = start_vector(dim)
    if v0 is not None and np.any(v0):
        # a warm start alone may be an eigenvector of a lower eigenvalue
        warm = np.asarray(v0, dtype=DTYPE).reshape(-1)
        mixed = warm / np.linalg.norm(warm) + v
        mixed_norm = np.linalg.norm(mixed)
        if mixed_norm > UNIT_NORM_SLACK:
            v = mixed / mixed_norm

    pair, converged = _power_iterate(a, v, tol, max_iter)
    if converged and pair.value >= 0.0:
        return pair

    if converged:
        shift = -pair.value
    elif pair.value >= 0.5 * np.linalg.norm(a @ pair.vector):
        # slow but one-signed: a shift cannot speed this up
        raise SpectralConvergenceError(pair.residual, pair)
    else:
        # +/- eigenvalues of comparable magnitude keep the iterate rotating
        shift = float(np.max(np.sum(np.abs(a), axis=1)))
    logger.debug("shifting by %.6g for the largest algebraic eigenvalue", shift)

    shifted = a + shift * np.eye(dim, dtype=DTYPE)
    shifted_pair, converged = _power_iterate(shifted, start_vector(dim), tol, max_iter)

    v = shifted_pair.vector
    y = a @ v
    value = float(v @ y)
    pair = EigPair(value, v, float(np.linalg.norm(y - value * v)))
    if not converged and pair.residual > tol * max(1.0, abs(value)):
        raise SpectralConvergenceError(pair.residual, pair)
    return pair


def _min_subset_size(m, beta):
    # guard against (1 - beta) * m landing a hair above an integer
    return max(1, math.ceil((1.0 - beta) * m - 1e-12))


def resilience_check(points, center, sigma_bound, beta):
    """True iff every subset holding at least (1 - beta) of the points has
    its mean within 2 * sigma_bound * sqrt(beta) of center.

    Exhaustive over subsets, so only usable on tiny point sets.
    """
    values = as_matrix(points)
    m, d = values.shape
    if m > MAX_RESILIENCE_POINTS:
        raise SizeLimitError(f"resilience_check enumerates subsets; m={m} exceeds {MAX_RESILIENCE_POINTS}")
    if not 0.0 < beta < 0.5:
        raise ValueError(f"beta must lie in (0, 0.5), got {beta}")

    center = np.asarray(center, dtype=DTYPE).reshape(-1)
    if center.shape[0] != d:
        raise ValueError(f"center has dimension {center.shape[0]}, points have dimension {d}")

    bound = 2.0 * sigma_bound * math.sqrt(beta)
    slack = 1e-12 * max(1.0, bound)
    deviations = values - center

    for size in range(_min_subset_size(m, beta), m + 1):
        for subset in itertools.combinations(range(m), size):
            shift = deviations[list(subset)].sum(axis=0) / size
            if np.linalg.norm(shift) > bound + slack:
                return False
    return True
