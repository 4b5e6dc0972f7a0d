"""
Step-1 solvers for the outlier indicator h.

The l1 relaxation is the packing problem

    max u^T w   s.t.  0 <= w <= caps,  lambda_max(sum_i w_i s_i a_i a_i^T) <= rho

with a_i = y_i - x and h = 1 - w. The spectral constraint is the same as the
family of linear constraints sum_i w_i s_i (v^T a_i)^2 <= rho over unit
vectors v, so both solvers here run a cutting-plane loop: every round adds
the top eigenvectors of the current weighted scatter as cuts and re-solves the
master problem over the cuts through its smooth dual with L-BFGS-B. The
linear objective carries a separable quadratic regularizer, making the master
solution unique and symmetric in identical samples; it is tightened until its
bias is below opt_tol / 2.

The lp path majorizes the smoothed lp penalty and solves a sequence of
weighted subproblems (least squares for reweighted-l2, weighted l1 otherwise).
"""

# standard libs
import logging
from dataclasses import dataclass

# 3rd party
import numpy as np
from scipy import linalg, optimize

# local
import spectral
from data_loader import DTYPE, as_matrix
from indicator import DEFAULT_TAU, OutlierIndicator

logger = logging.getLogger(__name__)

# constants
DEFAULT_OPT_TOL = 1e-3
DEFAULT_FEAS_TOL = 1e-3
DEFAULT_MAX_ITER = 5000
DEFAULT_P = 0.5
DEFAULT_OUTER_REWEIGHTS = 3
DEFAULT_WEIGHT_FLOOR = 1e-6
VARIANTS = ["reweighted-l2", "reweighted-l1"]

CUTS_PER_ROUND = 4
# share of min(opt_tol, feas_tol) the cut loop may leave as spectral violation
CUT_TOL_FRACTION = 0.1
MASTER_MAX_ITER = 5000
REGULARIZATION_START = 0.05
REGULARIZATION_DECAY = 0.1
STALL_TOL = 1e-12
MM_SLACK = 1e-9


@dataclass(frozen=True)
class Tolerances:
    opt_tol: float = DEFAULT_OPT_TOL
    feas_tol: float = DEFAULT_FEAS_TOL
    max_iter: int = DEFAULT_MAX_ITER

    def __post_init__(self):
        if self.opt_tol <= 0 or self.feas_tol <= 0:
            raise ValueError(f"tolerances must be positive, got opt_tol={self.opt_tol}, feas_tol={self.feas_tol}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")


@dataclass(frozen=True)
class IrlsConfig:
    p: float = DEFAULT_P
    outer_reweights: int = DEFAULT_OUTER_REWEIGHTS
    weight_floor: float = DEFAULT_WEIGHT_FLOOR
    inner_tol: float = DEFAULT_OPT_TOL
    variant: str = VARIANTS[0]

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"p must lie in (0, 1), got {self.p}")
        if self.outer_reweights < 1:
            raise ValueError(f"outer_reweights must be >= 1, got {self.outer_reweights}")
        if self.weight_floor <= 0:
            raise ValueError(f"weight_floor must be positive, got {self.weight_floor}")
        if self.inner_tol <= 0:
            raise ValueError(f"inner_tol must be positive, got {self.inner_tol}")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant {self.variant!r} unknown, expected one of {VARIANTS}")


@dataclass(frozen=True)
class SolverReport:
    objective: float
    feasibility_gap: float
    iterations: int
    converged: bool


@dataclass(frozen=True)
class IrlsReport(SolverReport):
    # surrogate value and h per accepted round; round 0 is the l1 solution
    surrogate_trace: tuple = ()
    rounds: tuple = ()
    inner_reports: tuple = ()


def _vector(values, name):
    v = np.array(values, dtype=DTYPE).reshape(-1)
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} must be finite")
    return v


@dataclass(frozen=True)
class PackingInstance:
    """Factors B_i = scales_i * a_i a_i^T with a_i the i-th row of directions."""

    u: np.ndarray
    directions: np.ndarray
    scales: np.ndarray
    box_caps: np.ndarray
    spectral_cap: float

    def __post_init__(self):
        u = _vector(self.u, "u")
        scales = _vector(self.scales, "scales")
        caps = _vector(self.box_caps, "box_caps")
        directions = np.array(self.directions, dtype=DTYPE)
        if directions.ndim == 1:
            directions = directions[:, np.newaxis]

        n = u.shape[0]
        if directions.ndim != 2 or directions.shape[0] != n or scales.shape[0] != n or caps.shape[0] != n:
            raise ValueError(
                f"factor count mismatch: u={n}, directions={directions.shape}, "
                f"scales={scales.shape[0]}, box_caps={caps.shape[0]}"
            )
        if not np.all(np.isfinite(directions)):
            raise ValueError("directions must be finite")
        if np.any(u <= 0) or np.any(caps <= 0) or np.any(scales <= 0):
            raise ValueError("u, scales and box_caps must be strictly positive")
        if not self.spectral_cap > 0:
            raise ValueError(f"spectral_cap must be positive, got {self.spectral_cap}")

        for name, value in (("u", u), ("scales", scales), ("box_caps", caps), ("directions", directions)):
            value.setflags(write=False)
            object.__setattr__(self, name, value)
        object.__setattr__(self, "spectral_cap", float(self.spectral_cap))

    @property
    def n(self):
        return self.u.shape[0]

    @property
    def d(self):
        return self.directions.shape[1]

    def scatter(self, w):
        return spectral.deviation_scatter(self.directions, self.scales * w)

    def cuts(self, vectors):
        """One row s_i (v^T a_i)^2 / rho per column v of `vectors`."""
        projections = (self.directions @ vectors).T
        return self.scales[np.newaxis, :] * projections ** 2 / self.spectral_cap


def packing_instance(data, center, bound, u=None, scales=None, box_caps=None):
    values = as_matrix(data)
    n, d = values.shape
    center = np.asarray(center, dtype=DTYPE).reshape(-1)
    if center.shape[0] != d:
        raise ValueError(f"center has dimension {center.shape[0]}, data has dimension {d}")
    if bound.n != n:
        raise ValueError(f"bound was built for n={bound.n}, data has {n} rows")

    ones = np.ones(n, dtype=DTYPE)
    return PackingInstance(
        u=ones if u is None else u,
        directions=values - center,
        scales=ones if scales is None else scales,
        box_caps=ones if box_caps is None else box_caps,
        spectral_cap=bound.rho(),
    )


def least_squares_instance(data, center, bound, u):
    """Targets u with z_i in [0, u_i] and factor scales 1 / u_i, so h = 1 - z / u."""
    u = _vector(u, "u")
    if np.any(u <= 0):
        raise ValueError("least-squares targets must be strictly positive")
    return packing_instance(data, center, bound, u=u, scales=1.0 / u, box_caps=u)


class _LinearObjective:
    """u^T z - (gamma / 2) sum_i z_i^2 / cap_i over the box."""

    def __init__(self, u, caps, opt_tol):
        self.u = u
        self.caps = caps
        self.opt_tol = opt_tol
        self.gamma = REGULARIZATION_START * float(np.mean(u))

    def respond(self, price):
        z = np.clip(self.caps * (self.u - price) / self.gamma, 0.0, self.caps)
        value = float((self.u - price) @ z - 0.5 * self.gamma * np.sum(z * z / self.caps))
        return z, value

    def value(self, z):
        return float(self.u @ z)

    def better(self, a, b):
        return a > b

    def tighten(self, z):
        # regularizer bias is at most (gamma / 2) * sum(caps)
        target = self.opt_tol * self.value(z) / float(np.sum(self.caps))
        if target <= 0 or self.gamma <= target:
            return False
        self.gamma = max(self.gamma * REGULARIZATION_DECAY, target)
        logger.debug("regularizer tightened to gamma=%.3g", self.gamma)
        return True


class _LeastSquaresObjective:
    """-||t - z||^2 over the box; reported as the distance itself."""

    def __init__(self, targets, caps):
        self.t = targets
        self.caps = caps

    def respond(self, price):
        z = np.clip(self.t - 0.5 * price, 0.0, self.caps)
        value = float(-np.sum((self.t - z) ** 2) - price @ z)
        return z, value

    def value(self, z):
        return float(np.sum((self.t - z) ** 2))

    def better(self, a, b):
        return a < b

    def tighten(self, z):
        return False


def top_eigenpairs(matrix, k):
    """The k largest eigenvalues (descending) and their eigenvectors as columns.

    Dense block solve, so clustered or tied top eigenvalues cost the same as
    well separated ones.
    """
    entries = np.asarray(matrix.entries if isinstance(matrix, spectral.SymMatrix) else matrix, dtype=DTYPE)
    dim = entries.shape[0]
    k = max(1, min(int(k), dim))
    values, vectors = linalg.eigh(entries, subset_by_index=[dim - k, dim - 1])
    return values[::-1], vectors[:, ::-1]


def feasibility_gap(inst, w):
    """Relative spectral violation of w plus its box violation."""
    top = top_eigenpairs(inst.scatter(w), 1)[0][0]
    spectral_gap = max(0.0, float(top) - inst.spectral_cap) / inst.spectral_cap
    box_gap = max(0.0, float(np.max(w - inst.box_caps)), float(np.max(-w)))
    return spectral_gap + box_gap


def _solve_master(cuts, objective, y0):
    """Minimize the dual sum(y) + max_z [f(z) - (cuts^T y)^T z] over y >= 0."""

    def dual(y):
        z, value = objective.respond(cuts.T @ y)
        return float(np.sum(y)) + value, 1.0 - cuts @ z

    result = optimize.minimize(
        dual,
        y0,
        jac=True,
        method="L-BFGS-B",
        bounds=[(0.0, None)] * y0.shape[0],
        options={"maxiter": MASTER_MAX_ITER, "ftol": 1e-15, "gtol": 1e-10},
    )
    y = np.maximum(result.x, 0.0)
    z, _ = objective.respond(cuts.T @ y)
    return y, z


def _cutting_plane(inst, objective, tols):
    n = inst.n
    rho = inst.spectral_cap
    limit = rho * (1.0 + CUT_TOL_FRACTION * min(tols.opt_tol, tols.feas_tol))

    cuts = np.zeros((0, n), dtype=DTYPE)
    y = np.zeros(0, dtype=DTYPE)
    z, _ = objective.respond(np.zeros(n, dtype=DTYPE))
    best, best_value = None, None
    converged = False
    rounds = 0

    for rounds in range(1, tols.max_iter + 1):
        values, vectors = top_eigenpairs(inst.scatter(z), CUTS_PER_ROUND)
        top = max(float(values[0]), 0.0)

        # scaling by rho / lambda_max restores feasibility of any iterate
        scale = 1.0 if top <= rho else rho / top
        candidate = z * scale
        value = objective.value(candidate)
        if best is None or objective.better(value, best_value):
            best, best_value = candidate, value
        logger.debug("round %d: lambda_max / rho = %.6f, %d cuts, objective %.6g", rounds, top / rho, cuts.shape[0], value)

        if top <= limit:
            if not objective.tighten(z):
                converged = True
                break
        else:
            vectors = vectors[:, values > limit]
            cuts = np.vstack([cuts, inst.cuts(vectors)])
            y = np.concatenate([y, np.zeros(vectors.shape[1], dtype=DTYPE)])

        if cuts.shape[0]:
            y, z_next = _solve_master(cuts, objective, y)
        else:
            z_next, _ = objective.respond(np.zeros(n, dtype=DTYPE))

        if top > limit and np.max(np.abs(z_next - z)) <= STALL_TOL * max(1.0, float(np.max(inst.box_caps))):
            logger.warning("cutting planes stalled at lambda_max / rho = %.6f after %d rounds", top / rho, rounds)
            break
        z = z_next

    if not converged:
        logger.warning("packing solver stopped after %d rounds without converging", rounds)

    gap = feasibility_gap(inst, best)
    if gap > tols.feas_tol:
        logger.warning("returned iterate violates the constraints by %.3g (feas_tol %.3g)", gap, tols.feas_tol)
    return best, SolverReport(best_value, gap, rounds, converged and gap <= tols.feas_tol)


def packing_sdp_maximize(inst, opt_tol=DEFAULT_OPT_TOL, feas_tol=DEFAULT_FEAS_TOL, max_iter=DEFAULT_MAX_ITER):
    """Returns (w, report) with 0 <= w <= box_caps and the spectral constraint
    met; report.objective is u^T w."""
    tols = Tolerances(opt_tol, feas_tol, max_iter)
    return _cutting_plane(inst, _LinearObjective(inst.u, inst.box_caps, tols.opt_tol), tols)


def sdp_constrained_least_squares(inst, opt_tol=DEFAULT_OPT_TOL, feas_tol=DEFAULT_FEAS_TOL, max_iter=DEFAULT_MAX_ITER):
    """min ||u - z||^2 over the same feasible set; report.objective is the
    squared distance."""
    tols = Tolerances(opt_tol, feas_tol, max_iter)
    return _cutting_plane(inst, _LeastSquaresObjective(inst.u, inst.box_caps), tols)


def solve_weighted_l1(data, center, bound, u, tols=Tolerances(), tau=DEFAULT_TAU):
    u = _vector(u, "u")
    if np.any(u <= 0):
        raise ValueError("weighted l1 needs strictly positive weights u")

    inst = packing_instance(data, center, bound, u=u)
    w, report = packing_sdp_maximize(inst, tols.opt_tol, tols.feas_tol, tols.max_iter)
    return OutlierIndicator(1.0 - w, tau), report


def solve_l1(data, center, bound, tols=Tolerances(), tau=DEFAULT_TAU):
    n = as_matrix(data).shape[0]
    return solve_weighted_l1(data, center, bound, np.ones(n, dtype=DTYPE), tols, tau)


def irls_weights(h_prev, p, delta, variant=VARIANTS[0]):
    """Majorizer weights of the smoothed lp penalty at h_prev.

    reweighted-l2 returns the squared weights (h^2 + delta)^(p/2 - 1);
    reweighted-l1 returns p (h + delta)^(p - 1).
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    if delta < 0:
        raise ValueError(f"delta must be nonnegative, got {delta}")

    h = np.clip(np.asarray(h_prev, dtype=DTYPE).reshape(-1), 0.0, 1.0)
    if variant == "reweighted-l2":
        return (h * h + delta) ** (p / 2.0 - 1.0)
    elif variant == "reweighted-l1":
        return p * (h + delta) ** (p - 1.0)
    else:
        raise ValueError(f"variant {variant!r} unknown, expected one of {VARIANTS}")


def surrogate(h, p, delta, variant=VARIANTS[0]):
    h = np.asarray(h, dtype=DTYPE)
    if variant == "reweighted-l2":
        return float(np.sum((h * h + delta) ** (p / 2.0)))
    return float(np.sum((h + delta) ** p))


def solve_lp(data, center, bound, cfg=IrlsConfig(), tols=Tolerances(), tau=DEFAULT_TAU):
    """Round 0 solves the l1 relaxation; each later round minimizes the
    majorizer of the smoothed lp penalty at the previous h. A round that
    raises the surrogate is discarded and the reweighting stops."""
    indicator, first = solve_l1(data, center, bound, tols, tau)
    inner = Tolerances(cfg.inner_tol, tols.feas_tol, tols.max_iter)

    h = indicator.h
    current = surrogate(h, cfg.p, cfg.weight_floor, cfg.variant)
    trace, rounds, reports = [current], [h], [first]
    iterations = first.iterations

    for k in range(1, cfg.outer_reweights + 1):
        weights = irls_weights(h, cfg.p, cfg.weight_floor, cfg.variant)
        if cfg.variant == "reweighted-l2":
            targets = np.sqrt(weights)
            inst = least_squares_instance(data, center, bound, targets)
            z, report = sdp_constrained_least_squares(inst, inner.opt_tol, inner.feas_tol, inner.max_iter)
            h_next = np.clip(1.0 - z / targets, 0.0, 1.0)
        else:
            step, report = solve_weighted_l1(data, center, bound, weights, inner, tau)
            h_next = step.h
        iterations += report.iterations

        value = surrogate(h_next, cfg.p, cfg.weight_floor, cfg.variant)
        if value > current + MM_SLACK:
            logger.info("reweighting round %d raised the surrogate to %.9g from %.9g, keeping round %d", k, value, current, k - 1)
            break

        logger.debug("reweighting round %d: surrogate %.9g", k, value)
        h, current = h_next, value
        trace.append(value)
        rounds.append(h)
        reports.append(report)

    report = IrlsReport(
        objective=current,
        feasibility_gap=reports[-1].feasibility_gap,
        iterations=iterations,
        converged=all(r.converged for r in reports),
        surrogate_trace=tuple(trace),
        rounds=tuple(rounds),
        inner_reports=tuple(reports),
    )
    return OutlierIndicator(h, tau), report
