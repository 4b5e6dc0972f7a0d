# standard libs
import logging
import math
from dataclasses import dataclass

# 3rd party
import numpy as np

# local
import spectral
from data_loader import as_matrix

logger = logging.getLogger(__name__)

# constants
DISTANCE_FLOOR = 1e-12
GEOMETRIC_MEDIAN_TOL = 1e-10
GEOMETRIC_MEDIAN_MAX_ITER = 1000


@dataclass(frozen=True)
class FilterConfig:
    spectral_threshold: float = 2.0
    removal_fraction: float = 0.02
    max_rounds: int = 200

    def __post_init__(self):
        if not 0.0 < self.removal_fraction < 0.5:
            raise ValueError(f"removal_fraction must lie in (0, 0.5), got {self.removal_fraction}")
        if self.spectral_threshold < 1.0:
            raise ValueError(f"spectral_threshold must be >= 1, got {self.spectral_threshold}")
        if self.max_rounds < 1:
            raise ValueError(f"max_rounds must be >= 1, got {self.max_rounds}")


@dataclass(frozen=True)
class FilterResult:
    mean: np.ndarray
    survivors: np.ndarray
    rounds: int
    degenerate: bool
    # removal cap floor(removal_fraction * n) is 0, so nothing could be removed
    stalled: bool = False


def sample_mean(data):
    return as_matrix(data).mean(axis=0)


def coordinate_median(data):
    # even counts average the two middle order statistics
    return np.median(as_matrix(data), axis=0)


def _sum_of_distances(values, x):
    return float(np.linalg.norm(values - x, axis=1).sum())


def _is_optimal_sample(values, k):
    """Optimality of data point y_k for the sum of distances."""
    deviations = values - values[k]
    distances = np.linalg.norm(deviations, axis=1)
    others = distances > DISTANCE_FLOOR
    pull = (deviations[others] / distances[others, np.newaxis]).sum(axis=0)
    return np.linalg.norm(pull) <= np.count_nonzero(~others)


def geometric_median(data, tol=GEOMETRIC_MEDIAN_TOL, max_iter=GEOMETRIC_MEDIAN_MAX_ITER):
    """Weiszfeld iterations started at the coordinate-wise median.

    Returns (point, converged). A data point is returned as-is when it is the
    minimizer; the distance floor only protects the division.
    """
    values = as_matrix(data)
    n = values.shape[0]
    x = coordinate_median(values)

    for _ in range(max_iter):
        deviations = values - x
        distances = np.linalg.norm(deviations, axis=1)

        at_point = np.flatnonzero(distances <= DISTANCE_FLOOR)
        if at_point.size and _is_optimal_sample(values, at_point[0]):
            return values[at_point[0]].copy(), True

        inv = 1.0 / np.maximum(distances, DISTANCE_FLOOR)
        gradient = -(deviations * inv[:, np.newaxis]).sum(axis=0)
        if np.linalg.norm(gradient) <= tol * n:
            return x, True

        x_next = (values * inv[:, np.newaxis]).sum(axis=0) / inv.sum()
        if np.linalg.norm(x_next - x) <= tol * max(1.0, np.linalg.norm(x)):
            return x_next, True
        x = x_next

    logger.warning("Weiszfeld stopped after %d iterations without reaching tol=%g", max_iter, tol)
    return x, False


def iterative_filter(data, sigma, cfg=FilterConfig()):
    """Spectral filtering: drop the points with the largest squared projections
    on the top eigenvector of the sample covariance until its top eigenvalue
    is at most spectral_threshold * sigma^2."""
    values = as_matrix(data)
    n = values.shape[0]
    if n < 2:
        raise ValueError(f"iterative_filter needs n >= 2, got {n}")

    per_round_cap = math.floor(cfg.removal_fraction * n)
    survivors = np.ones(n, dtype=bool)
    mean = values.mean(axis=0)
    pair = None

    for rounds in range(1, cfg.max_rounds + 1):
        active = np.flatnonzero(survivors)
        points = values[active]
        m = points.shape[0]
        mean = points.mean(axis=0)
        deviations = points - mean

        covariance = spectral.SymMatrix(spectral.deviation_scatter(deviations, np.full(m, 1.0 / m)))
        try:
            pair = spectral.lambda_max(covariance, v0=None if pair is None else pair.vector)
        except spectral.SpectralConvergenceError as e:
            pair = e.pair
        logger.debug("filter round %d: m=%d top eigenvalue %.4g", rounds, m, pair.value)

        if pair.value <= cfg.spectral_threshold * sigma ** 2:
            return FilterResult(mean, survivors, rounds, False)

        k = min(max(1, math.floor(cfg.removal_fraction * m)), per_round_cap)
        if k == 0:
            logger.warning(
                "filter cannot remove points: removal cap floor(%g * %d) is 0 with top eigenvalue %.4g above %.4g",
                cfg.removal_fraction,
                n,
                pair.value,
                cfg.spectral_threshold * sigma ** 2,
            )
            return FilterResult(mean, survivors, rounds, False, stalled=True)
        if m - k < 2:
            logger.warning("filter would leave fewer than 2 points, returning the last mean")
            return FilterResult(mean, survivors, rounds, True)

        scores = (deviations @ pair.vector) ** 2
        # stable order: ties go to the lower index first
        order = np.argsort(-scores, kind="stable")
        survivors[active[order[:k]]] = False

    active = np.flatnonzero(survivors)
    return FilterResult(values[active].mean(axis=0), survivors, cfg.max_rounds, False)
