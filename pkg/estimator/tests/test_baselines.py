import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import algorithm1
import datagen
from baselines import FilterConfig, coordinate_median, geometric_median, iterative_filter, sample_mean
from indicator import MomentBound


def test_sample_mean():
    np.testing.assert_array_equal(sample_mean([[0.0, 0.0], [2.0, 4.0]]), [1.0, 2.0])


def test_coordinate_median_even_count_averages_middle():
    data = np.array([[1.0, 10.0], [2.0, 30.0], [4.0, 20.0], [100.0, 0.0]])
    np.testing.assert_array_equal(coordinate_median(data), [3.0, 15.0])


def test_geometric_median_of_square_is_center():
    square = np.array([[0.0, 0.0], [2.0, 0.0], [0.0, 2.0], [2.0, 2.0]])
    point, converged = geometric_median(square)
    assert converged
    np.testing.assert_allclose(point, [1.0, 1.0], atol=1e-8)


def test_geometric_median_returns_dominant_data_point():
    data = np.array([[1.0, 1.0]] * 3 + [[5.0, 1.0], [1.0, 9.0]])
    point, converged = geometric_median(data)
    assert converged
    np.testing.assert_array_equal(point, [1.0, 1.0])


def test_geometric_median_collinear_odd():
    data = np.array([[0.0], [1.0], [7.0]])
    point, converged = geometric_median(data)
    assert converged
    np.testing.assert_allclose(point, [1.0], atol=1e-9)


def test_geometric_median_beats_perturbations():
    rng = np.random.default_rng(0)
    data = rng.standard_normal((40, 3))
    data[:5] += 20.0
    point, converged = geometric_median(data)
    assert converged

    def cost(x):
        return np.linalg.norm(data - x, axis=1).sum()

    for step in rng.standard_normal((20, 3)) * 1e-3:
        assert cost(point) <= cost(point + step) + 1e-9


@given(st.integers(min_value=0, max_value=2 ** 32 - 1), st.floats(min_value=-50, max_value=50))
def test_geometric_median_translation_equivariant(seed, shift):
    rng = np.random.default_rng(seed)
    data = rng.standard_normal((15, 2))
    point, _ = geometric_median(data)
    moved, _ = geometric_median(data + shift)
    np.testing.assert_allclose(moved, point + shift, atol=1e-6)


def test_filter_config_validation():
    with pytest.raises(ValueError):
        FilterConfig(removal_fraction=0.0)
    with pytest.raises(ValueError):
        FilterConfig(spectral_threshold=0.5)
    with pytest.raises(ValueError):
        FilterConfig(max_rounds=0)


def test_filter_accepts_clean_data_in_one_round():
    rng = np.random.default_rng(1)
    data = rng.standard_normal((500, 5))
    result = iterative_filter(data, sigma=1.0)
    assert result.rounds == 1
    assert result.survivors.all()
    np.testing.assert_allclose(result.mean, data.mean(axis=0))


def test_filter_removes_far_cluster():
    rng = np.random.default_rng(2)
    inliers = rng.standard_normal((360, 10))
    outliers = np.zeros((40, 10))
    outliers[:, 0] = 20.0
    data = np.vstack([inliers, outliers])

    result = iterative_filter(data, sigma=1.0)
    assert not result.degenerate
    assert not result.survivors[360:].any()
    assert np.linalg.norm(result.mean - inliers.mean(axis=0)) < 0.5


def test_filter_needs_two_points():
    with pytest.raises(ValueError):
        iterative_filter(np.zeros((1, 2)), sigma=1.0)


def test_filter_round_cap():
    rng = np.random.default_rng(3)
    data = np.vstack([rng.standard_normal((300, 4)), np.full((100, 4), 8.0)])
    result = iterative_filter(data, sigma=1.0, cfg=FilterConfig(max_rounds=2))
    assert result.rounds == 2
    # two rounds of floor(0.02 * m) removals
    assert np.count_nonzero(~result.survivors) == 8 + 7


def test_filter_removes_single_far_outlier_in_first_round():
    rng = np.random.default_rng(4)
    d = 4
    data = rng.standard_normal((60, d))
    data[17] = 0.0
    data[17, 0] = 10.0 * np.sqrt(d)

    result = iterative_filter(data, sigma=1.0, cfg=FilterConfig(max_rounds=1))
    assert result.rounds == 1
    assert not result.survivors[17]
    assert np.count_nonzero(~result.survivors) == 1
    assert not result.stalled


def test_filter_flags_a_zero_removal_cap(caplog):
    rng = np.random.default_rng(4)
    d = 4
    data = rng.standard_normal((30, d))
    data[0] = 0.0
    data[0, 0] = 10.0 * np.sqrt(d)

    with caplog.at_level("WARNING", logger="baselines"):
        result = iterative_filter(data, sigma=1.0)
    assert result.stalled
    assert not result.degenerate
    assert result.survivors.all()
    assert "cannot remove points" in caplog.text


def test_filter_per_round_removals_stay_under_cap():
    rng = np.random.default_rng(6)
    data = np.vstack([rng.standard_normal((150, 3)), np.full((50, 3), 6.0)])
    cap = int(np.floor(0.02 * 200))
    removed = 0
    for rounds in range(1, 6):
        result = iterative_filter(data, sigma=1.0, cfg=FilterConfig(max_rounds=rounds))
        now = np.count_nonzero(~result.survivors)
        assert now - removed <= cap
        removed = now


def test_geometric_median_of_equilateral_triangle_is_centroid():
    angles = np.deg2rad([90.0, 210.0, 330.0])
    triangle = np.column_stack([np.cos(angles), np.sin(angles)])
    point, converged = geometric_median(triangle)

    assert converged
    np.testing.assert_allclose(point, triangle.mean(axis=0), atol=1e-6)
    deviations = point - triangle
    gradient = (deviations / np.linalg.norm(deviations, axis=1, keepdims=True)).sum(axis=0)
    assert np.linalg.norm(gradient) <= 1e-6


@pytest.mark.parametrize("n", [5, 8, 21])
def test_geometric_median_in_one_dimension_matches_median_objective(n):
    data = np.random.default_rng(n).standard_normal((n, 1)) * 3.0
    point, converged = geometric_median(data)

    def cost(x):
        return np.abs(data - x).sum()

    assert converged
    assert cost(point) == pytest.approx(cost(coordinate_median(data)), abs=1e-9)


@pytest.mark.slow
def test_filter_is_worse_than_l1_on_two_clusters():
    filter_errors, l1_errors = [], []
    for seed in range(3):
        ds = datagen.gen_setting_b(d=20, n=500, alpha=0.2, seed=seed)
        filtered = iterative_filter(ds.values, sigma=1.0)
        estimate = algorithm1.robust_mean(ds.values, MomentBound(1.0, ds.n), method="l1")
        filter_errors.append(datagen.recovery_error(filtered.mean, ds))
        l1_errors.append(datagen.recovery_error(estimate.mean, ds))
    assert np.mean(l1_errors) < np.mean(filter_errors)
