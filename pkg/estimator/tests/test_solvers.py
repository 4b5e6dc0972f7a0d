import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import datagen
import solvers
from indicator import MomentBound
from oracle import calibrate_sigma
from solvers import (
    IrlsConfig,
    PackingInstance,
    Tolerances,
    irls_weights,
    packing_sdp_maximize,
    sdp_constrained_least_squares,
    solve_l1,
    solve_lp,
    solve_weighted_l1,
)
from spectral import weighted_scatter

PLANTED = np.array([-0.1, -0.05, 0.05, 0.1, 10.0, -10.0])[:, np.newaxis]
PLANTED_OUTLIERS = [4, 5]
# sigma = 1, c1^2 = 1.5, n = 6 -> rho = 9
PLANTED_BOUND = MomentBound(1.0, 6, 1.5)


def axis_instance(seed, max_n=10, max_d=5):
    """Rank-1 factors along coordinate axes: the spectral constraint splits
    into one linear packing constraint per axis."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, max_n + 1))
    d = int(rng.integers(1, max_d + 1))
    axes = rng.integers(0, d, size=n)
    directions = np.zeros((n, d))
    directions[np.arange(n), axes] = rng.uniform(0.2, 3.0, size=n)
    return PackingInstance(
        u=rng.uniform(0.5, 2.0, size=n),
        directions=directions,
        scales=rng.uniform(0.5, 2.0, size=n),
        box_caps=rng.uniform(0.5, 1.5, size=n),
        spectral_cap=float(rng.uniform(0.5, 6.0)),
    ), axes


def axis_costs(inst):
    return inst.scales * np.sum(inst.directions ** 2, axis=1)


def lp_vertex_oracle(inst, axes):
    """Exhaustive vertex enumeration, one knapsack polytope per axis."""
    costs = axis_costs(inst)
    total = 0.0
    for axis in np.unique(axes):
        group = np.flatnonzero(axes == axis)
        c, u, cap = costs[group], inst.u[group], inst.box_caps[group]
        best = 0.0
        for corner in itertools.product((0.0, 1.0), repeat=len(group)):
            w = np.array(corner) * cap
            if c @ w <= inst.spectral_cap * (1 + 1e-12):
                best = max(best, u @ w)
            # vertices with one fractional coordinate on the constraint face
            for k in range(len(group)):
                rest = c @ w - c[k] * w[k]
                wk = (inst.spectral_cap - rest) / c[k]
                if 0.0 < wk < cap[k]:
                    candidate = w.copy()
                    candidate[k] = wk
                    best = max(best, u @ candidate)
        total += best
    return total


def qp_active_set_oracle(inst, axes):
    """min ||u - z||^2 by enumerating lower/upper/free states and the
    constraint state for every axis group."""
    costs = axis_costs(inst)
    t, caps, rho = inst.u, inst.box_caps, inst.spectral_cap
    total = 0.0
    for axis in np.unique(axes):
        group = np.flatnonzero(axes == axis)
        c, tg, cap = costs[group], t[group], caps[group]
        best = np.inf
        for states in itertools.product((0, 1, 2), repeat=len(group)):
            states = np.array(states)
            fixed = np.where(states == 0, 0.0, cap)
            free = states == 2
            for active in (False, True):
                z = fixed.copy()
                if active:
                    denom = np.sum(c[free] ** 2)
                    if denom == 0.0:
                        continue
                    mu = 2.0 * (np.sum(c[free] * tg[free]) + np.sum(c[~free] * fixed[~free]) - rho) / denom
                    z[free] = tg[free] - 0.5 * mu * c[free]
                else:
                    z[free] = tg[free]
                feasible = np.all(z >= -1e-12) and np.all(z <= cap + 1e-12) and c @ z <= rho * (1 + 1e-12)
                if feasible:
                    best = min(best, float(np.sum((tg - z) ** 2)))
        total += best
    return total


def spectral_gap(data, center, bound, h):
    top = np.linalg.eigvalsh(weighted_scatter(data, center, 1.0 - h).entries)[-1]
    return max(0.0, top - bound.rho()) / bound.rho()


def test_tolerances_validation():
    with pytest.raises(ValueError):
        Tolerances(opt_tol=0.0)
    with pytest.raises(ValueError):
        Tolerances(max_iter=0)


@pytest.mark.parametrize(
    "kwargs",
    [{"p": 1.0}, {"p": 0.0}, {"outer_reweights": 0}, {"weight_floor": 0.0}, {"variant": "reweighted-l3"}],
)
def test_irls_config_validation(kwargs):
    with pytest.raises(ValueError):
        IrlsConfig(**kwargs)


@pytest.mark.parametrize(
    "field, value",
    [("spectral_cap", 0.0), ("spectral_cap", -1.0), ("u", [1.0, 0.0]), ("box_caps", [1.0, -1.0]), ("scales", [0.0, 1.0])],
)
def test_packing_instance_validation(field, value):
    kwargs = dict(u=[1.0, 1.0], directions=np.ones((2, 2)), scales=[1.0, 1.0], box_caps=[1.0, 1.0], spectral_cap=1.0)
    kwargs[field] = value
    with pytest.raises(ValueError):
        PackingInstance(**kwargs)


def test_packing_instance_count_mismatch():
    with pytest.raises(ValueError):
        PackingInstance(u=[1.0, 1.0], directions=np.ones((3, 2)), scales=[1.0, 1.0], box_caps=[1.0, 1.0], spectral_cap=1.0)


def test_zero_directions_fill_caps():
    caps = np.array([0.5, 1.0, 2.0])
    inst = PackingInstance(u=np.ones(3), directions=np.zeros((3, 4)), scales=np.ones(3), box_caps=caps, spectral_cap=1.0)
    w, report = packing_sdp_maximize(inst)
    np.testing.assert_allclose(w, caps)
    assert report.converged
    assert report.objective == pytest.approx(3.5)


def test_single_active_factor():
    rho = 1.0
    directions = np.array([[np.sqrt(2.0 * rho)], [0.0], [0.0]])
    inst = PackingInstance(u=np.ones(3), directions=directions, scales=np.ones(3), box_caps=np.ones(3), spectral_cap=rho)
    w, report = packing_sdp_maximize(inst)

    assert report.converged
    assert w[0] <= 0.5 * (1 + 1e-3) + 1e-12
    assert w[0] >= 0.5 * (1 - 2e-3)
    np.testing.assert_allclose(w[1:], [1.0, 1.0])


@pytest.mark.parametrize("seed", range(100))
def test_packing_matches_lp_vertex_oracle(seed):
    inst, axes = axis_instance(seed)
    w, report = packing_sdp_maximize(inst, opt_tol=1e-3, feas_tol=1e-3)

    optimum = lp_vertex_oracle(inst, axes)
    assert inst.u @ w >= (1 - 1e-3) * optimum
    assert inst.u @ w <= optimum * (1 + 1e-3) + 1e-12
    assert report.feasibility_gap <= 1e-3
    assert np.all(w >= 0.0) and np.all(w <= inst.box_caps)
    assert np.linalg.eigvalsh(inst.scatter(w))[-1] <= inst.spectral_cap * (1 + 1e-3)


def test_packing_is_deterministic():
    inst, _ = axis_instance(5)
    first, _ = packing_sdp_maximize(inst)
    second, _ = packing_sdp_maximize(inst)
    assert first.tobytes() == second.tobytes()


def test_least_squares_inactive_constraint():
    u = np.array([1.0, 2.0, 0.5])
    inst = PackingInstance(u=u, directions=np.full((3, 2), 1e-3), scales=1.0 / u, box_caps=u, spectral_cap=5.0)
    z, report = sdp_constrained_least_squares(inst)
    np.testing.assert_allclose(z, u)
    assert report.objective == pytest.approx(0.0, abs=1e-20)


def test_least_squares_single_variable_closed_form():
    # one factor of cost c = a^2 / u per unit z: z* = min(u, rho / c)
    u, a, rho = 2.0, 3.0, 1.5
    inst = PackingInstance(u=[u], directions=[[a]], scales=[1.0 / u], box_caps=[u], spectral_cap=rho)
    z, report = sdp_constrained_least_squares(inst)
    expected = rho * u / a ** 2
    assert z[0] == pytest.approx(expected, rel=1e-3)
    assert z[0] <= expected * (1 + 1e-3)
    assert report.objective == pytest.approx((u - expected) ** 2, rel=1e-3)


@pytest.mark.parametrize("seed", range(40))
def test_least_squares_matches_active_set_oracle(seed):
    inst, axes = axis_instance(1000 + seed, max_n=6, max_d=3)
    # targets double as caps as in the lp subproblem
    inst = PackingInstance(u=inst.u, directions=inst.directions, scales=1.0 / inst.u, box_caps=inst.u, spectral_cap=inst.spectral_cap)
    z, report = sdp_constrained_least_squares(inst)

    optimum = qp_active_set_oracle(inst, axes)
    assert report.objective == pytest.approx(np.sum((inst.u - z) ** 2))
    assert abs(report.objective - optimum) <= 1e-3 * max(1.0, optimum)
    assert report.feasibility_gap <= 1e-3


def test_solve_l1_all_samples_at_center():
    data = np.ones((5, 3))
    h, report = solve_l1(data, np.ones(3), MomentBound(1.0, 5))
    np.testing.assert_array_equal(h.h, np.zeros(5))
    assert h.l0 == 0
    assert report.converged


def test_solve_l1_planted_instance():
    h, report = solve_l1(PLANTED, np.zeros(1), PLANTED_BOUND)
    assert list(h.support) == PLANTED_OUTLIERS
    assert np.all(h.h[:4] < 1e-3)
    assert spectral_gap(PLANTED, np.zeros(1), PLANTED_BOUND, h.h) <= 1e-3


def test_solve_l1_rejects_bound_for_other_n():
    with pytest.raises(ValueError):
        solve_l1(PLANTED, np.zeros(1), MomentBound(1.0, 7))


def test_weighted_l1_with_unit_weights_is_l1():
    l1, _ = solve_l1(PLANTED, np.zeros(1), PLANTED_BOUND)
    weighted, _ = solve_weighted_l1(PLANTED, np.zeros(1), PLANTED_BOUND, np.ones(6))
    assert l1.h.tobytes() == weighted.h.tobytes()


def test_weighted_l1_rejects_nonpositive_weights():
    with pytest.raises(ValueError):
        solve_weighted_l1(PLANTED, np.zeros(1), PLANTED_BOUND, [1, 1, 1, 1, 0, 1])


def test_weighted_l1_keeps_expensive_sample():
    # rho = 120 leaves room for one outlier plus a fifth of the other
    bound = MomentBound(np.sqrt(120.0 / 9.0), 6, 1.5)
    keep_first = np.array([1.0, 1.0, 1.0, 1.0, 10.0, 1.0])
    h, _ = solve_weighted_l1(PLANTED, np.zeros(1), bound, keep_first)
    assert list(h.support) == [5]

    keep_second = np.array([1.0, 1.0, 1.0, 1.0, 1.0, 10.0])
    h, _ = solve_weighted_l1(PLANTED, np.zeros(1), bound, keep_second)
    assert list(h.support) == [4]


def test_weighted_l1_permutation_equivariant():
    rng = np.random.default_rng(3)
    data = np.vstack([rng.standard_normal((10, 2)) * 0.3, [[6.0, 0.0], [0.0, -7.0]]])
    u = rng.uniform(0.5, 2.0, size=12)
    bound = MomentBound(1.0, 12)
    center = np.zeros(2)
    perm = rng.permutation(12)

    h, _ = solve_weighted_l1(data, center, bound, u)
    permuted, _ = solve_weighted_l1(data[perm], center, bound, u[perm])
    np.testing.assert_allclose(permuted.h, h.h[perm], atol=5e-3)
    np.testing.assert_array_equal(np.sort(perm[permuted.support]), h.support)


def test_irls_weights_floor():
    w = irls_weights(np.zeros(4), 0.5, 1e-6)
    np.testing.assert_allclose(w, np.full(4, 1e-6 ** -0.75))
    assert np.all(np.isfinite(w))

    w1 = irls_weights(np.zeros(4), 0.5, 1e-6, "reweighted-l1")
    np.testing.assert_allclose(w1, np.full(4, 0.5 * 1e-6 ** -0.5))


def test_irls_weights_at_one():
    assert irls_weights(np.ones(1), 0.5, 0.0, "reweighted-l1")[0] == pytest.approx(0.5)


@pytest.mark.parametrize("variant", solvers.VARIANTS)
@given(p=st.floats(min_value=0.05, max_value=0.95))
def test_irls_weights_nonincreasing(variant, p):
    grid = np.linspace(1e-3, 1.0, 200)
    w = irls_weights(grid, p, 1e-6, variant)
    assert np.all(np.diff(w) <= 0.0)
    assert np.all(w > 0.0)


def test_irls_weights_rejects_bad_arguments():
    with pytest.raises(ValueError):
        irls_weights(np.zeros(2), 1.5, 1e-6)
    with pytest.raises(ValueError):
        irls_weights(np.zeros(2), 0.5, 1e-6, "reweighted-l0")


@pytest.mark.parametrize("variant", solvers.VARIANTS)
def test_solve_lp_planted_instance(variant):
    cfg = IrlsConfig(variant=variant)
    h, report = solve_lp(PLANTED, np.zeros(1), PLANTED_BOUND, cfg)
    assert list(h.support) == PLANTED_OUTLIERS
    assert spectral_gap(PLANTED, np.zeros(1), PLANTED_BOUND, h.h) <= 1e-3

    trace = report.surrogate_trace
    assert all(b <= a + 1e-9 for a, b in zip(trace, trace[1:]))
    assert len(report.rounds) == len(trace)


def test_solve_lp_first_round_is_l1():
    l1, _ = solve_l1(PLANTED, np.zeros(1), PLANTED_BOUND)
    _, report = solve_lp(PLANTED, np.zeros(1), PLANTED_BOUND)
    assert report.rounds[0].tobytes() == l1.h.tobytes()


@pytest.mark.parametrize("seed", range(5))
def test_solve_lp_feasible_and_descending_on_random_data(seed):
    rng = np.random.default_rng(seed)
    data = np.vstack([rng.standard_normal((40, 3)), rng.standard_normal((6, 3)) + 6.0])
    center = np.median(data, axis=0)
    bound = MomentBound(1.0, 46)
    h, report = solve_lp(data, center, bound)

    assert np.all((h.h >= 0.0) & (h.h <= 1.0))
    assert spectral_gap(data, center, bound, h.h) <= 1e-3
    trace = report.surrogate_trace
    assert all(b <= a + 1e-9 for a, b in zip(trace, trace[1:]))


def test_top_eigenpairs_with_tied_values():
    q, _ = np.linalg.qr(np.random.default_rng(8).standard_normal((6, 6)))
    m = q @ np.diag([3.0, 3.0, 3.0, 3.0, 1.0, 0.5]) @ q.T
    values, vectors = solvers.top_eigenpairs(m, 4)

    np.testing.assert_allclose(values, [3.0, 3.0, 3.0, 3.0], rtol=1e-12)
    np.testing.assert_allclose(vectors.T @ vectors, np.eye(4), atol=1e-12)
    np.testing.assert_allclose(m @ vectors, 3.0 * vectors, atol=1e-12)


def test_top_eigenpairs_are_descending_and_capped_at_dim():
    values, vectors = solvers.top_eigenpairs(np.diag([1.0, 4.0, 2.0]), 10)
    np.testing.assert_allclose(values, [4.0, 2.0, 1.0])
    assert vectors.shape == (3, 3)
    assert abs(vectors[1, 0]) == pytest.approx(1.0)


def test_feasibility_gap_measures_violations():
    inst = PackingInstance(u=np.ones(2), directions=[[2.0], [0.0]], scales=np.ones(2), box_caps=np.ones(2), spectral_cap=2.0)
    assert solvers.feasibility_gap(inst, np.array([0.5, 1.0])) == 0.0
    # scatter 4 * w_0 = 4 against rho = 2
    assert solvers.feasibility_gap(inst, np.array([1.0, 1.0])) == pytest.approx(1.0)
    assert solvers.feasibility_gap(inst, np.array([0.5, 1.25])) == pytest.approx(0.25)


@pytest.mark.parametrize("seed", range(10))
def test_report_gap_is_measured_on_the_returned_iterate(seed):
    inst, _ = axis_instance(500 + seed)
    w, report = packing_sdp_maximize(inst)

    top = np.linalg.eigvalsh(inst.scatter(w))[-1]
    expected = max(0.0, top - inst.spectral_cap) / inst.spectral_cap
    assert report.feasibility_gap == pytest.approx(expected, abs=1e-12)
    if report.converged:
        assert report.feasibility_gap <= 1e-3


def test_packing_with_many_tied_eigenvalues():
    # three unit samples per axis in d=6 and rho=2: every axis saturates at once
    d = 6
    directions = np.tile(np.eye(d), (3, 1))
    n = directions.shape[0]
    inst = PackingInstance(u=np.ones(n), directions=directions, scales=np.ones(n), box_caps=np.ones(n), spectral_cap=2.0)
    w, report = packing_sdp_maximize(inst)

    assert report.converged
    assert report.objective == pytest.approx(2.0 * d, rel=2e-3)
    assert report.objective <= 2.0 * d * (1 + 1e-3)
    assert report.feasibility_gap <= 1e-3


def permuted_instance():
    rng = np.random.default_rng(3)
    data = np.vstack([rng.standard_normal((10, 2)) * 0.3, [[8.0, 0.0], [0.0, -9.0]]])
    return data, MomentBound(1.0, 12), rng.permutation(12)


def test_l1_permutation_equivariant():
    data, bound, perm = permuted_instance()
    h, _ = solve_l1(data, np.zeros(2), bound)
    permuted, _ = solve_l1(data[perm], np.zeros(2), bound)
    np.testing.assert_allclose(permuted.h, h.h[perm], atol=5e-3)
    np.testing.assert_array_equal(np.sort(perm[permuted.support]), h.support)


@pytest.mark.parametrize("variant", solvers.VARIANTS)
def test_lp_permutation_equivariant(variant):
    data, bound, perm = permuted_instance()
    cfg = IrlsConfig(variant=variant)
    h, _ = solve_lp(data, np.zeros(2), bound, cfg)
    permuted, _ = solve_lp(data[perm], np.zeros(2), bound, cfg)
    np.testing.assert_array_equal(np.sort(perm[permuted.support]), h.support)
    np.testing.assert_array_equal(h.support, [10, 11])


@pytest.mark.slow
def test_two_cluster_example_gives_sparse_indicators():
    # d=100, n=200, 10% outliers at (sqrt(d/2), +/-sqrt(d/2), 0, ...), centered at the median
    ds = datagen.gen_setting_b(d=100, n=200, alpha=0.1, seed=0)
    sigma = calibrate_sigma(ds.values[ds.inlier_mask]).sigma
    bound = MomentBound(sigma, ds.n)
    center = np.median(ds.values, axis=0)
    outliers = set(np.flatnonzero(~ds.inlier_mask))

    h1, _ = solve_l1(ds.values, center, bound)
    hp, _ = solve_lp(ds.values, center, bound)
    for h in (h1, hp):
        largest = set(np.argsort(-h.h, kind="stable")[: len(outliers)])
        assert len(largest & outliers) >= 0.9 * len(outliers)
        assert h.h[~ds.inlier_mask].min() > h.h[ds.inlier_mask].max()

    assert np.count_nonzero(hp.h > 0.05) <= np.count_nonzero(h1.h > 0.05)
