import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_dataset
from seldonian_ml import Dataset, gen_illustrative, true_disc_stat
from seldonian_ml.baselines import least_squares, sample_disc_stat, sclr, sclr_objective
from seldonian_ml.regression import paired_error_diffs


def test_least_squares_exact_line():
    x = np.linspace(-2, 2, 9)
    D = Dataset.from_features(x, 2 * x + 1, np.arange(9) % 2)
    np.testing.assert_allclose(least_squares(D), [2.0, 1.0], atol=1e-12)


def test_least_squares_duplicated_point_predicts_its_label():
    D = make_dataset([(1.5, 4.0, 0)] * 3)
    with pytest.warns(RuntimeWarning, match="rank deficient"):
        theta = least_squares(D)
    assert D.X[0] @ theta == pytest.approx(4.0)


def test_least_squares_discriminates_on_average():
    ds = [true_disc_stat(least_squares(gen_illustrative(1000, seed=s))) for s in range(10_000)]
    assert np.mean(ds) == pytest.approx(-0.67, abs=0.02)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.integers(20, 300))
def test_least_squares_residuals_orthogonal(seed, m):
    rng = np.random.default_rng(seed)
    F = rng.normal(size=(m, 3))
    D = Dataset.from_features(F, F @ [1.0, -2.0, 0.5] + rng.normal(size=m), rng.integers(0, 2, m))
    r = D.y - D.X @ least_squares(D)
    scale = np.linalg.norm(D.X, axis=0) * np.linalg.norm(D.y)
    assert np.all(np.abs(D.X.T @ r) <= 1e-8 * scale)


def test_sclr_lambda_zero_matches_least_squares():
    D = gen_illustrative(1000, seed=1)
    np.testing.assert_allclose(sclr(D, 0.0), least_squares(D), atol=1e-6)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.0, 50.0))
def test_sclr_never_worse_than_least_squares(seed, lam):
    D = gen_illustrative(300, seed=seed)
    assert sclr_objective(sclr(D, lam), D, lam) <= sclr_objective(least_squares(D), D, lam) + 1e-9


def test_sclr_very_large_lambda_removes_discrimination():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        ds = [abs(true_disc_stat(sclr(gen_illustrative(1000, seed=s), 1e3))) for s in range(200)]
    assert np.mean(ds) < 0.05


def test_sclr_large_lambda_matches_noise_floor():
    # With d_hat pinned at 0 the remaining true d is about -(mean noise gap), whose
    # standard deviation is sqrt(4/m); its mean absolute value is that times sqrt(2/pi).
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        ds = np.array([abs(true_disc_stat(sclr(gen_illustrative(1000, seed=s), 1e3))) for s in range(200)])
    limit = np.sqrt(4 / 1000) * np.sqrt(2 / np.pi)
    assert abs(ds.mean() - limit) <= 3 * ds.std(ddof=1) / np.sqrt(ds.size)


def test_sclr_rejects_negative_lambda():
    with pytest.raises(ValueError):
        sclr(gen_illustrative(50, seed=0), -1.0)


def test_disc_stat_perfect_predictor():
    x = np.linspace(0, 1, 6)
    D = Dataset.from_features(x, 3 * x - 1, np.arange(6) % 2)
    assert sample_disc_stat([3.0, -1.0], D) == pytest.approx(0.0, abs=1e-12)


def test_disc_stat_opposite_errors():
    D = make_dataset([(0, -1, 0), (0, -1, 0), (0, 1, 1)])
    assert sample_disc_stat([0.0, 0.0], D) == pytest.approx(2.0)


def test_disc_stat_uses_all_points_unlike_pairs():
    D = make_dataset([(0, -1, 0), (0, -5, 0), (0, 1, 1)])
    assert sample_disc_stat([0.0, 0.0], D) == pytest.approx(4.0)
    assert paired_error_diffs([0.0, 0.0], D).mean() == pytest.approx(2.0)
    B = gen_illustrative(400, seed=2)
    assert sample_disc_stat([0.5, 0.1], B) == pytest.approx(paired_error_diffs([0.5, 0.1], B).mean())


def test_disc_stat_missing_type():
    with pytest.raises(ValueError):
        sample_disc_stat([0.0, 0.0], make_dataset([(0, 1, 1), (1, 1, 1)]))


@given(st.integers(0, 1000), st.floats(-3, 3), st.floats(-3, 3))
def test_disc_stat_antisymmetric_under_flip(seed, a, c):
    D = gen_illustrative(30, seed=seed)
    F = Dataset(D.X, D.y, 1 - D.t)
    assert sample_disc_stat([a, c], F) == pytest.approx(-sample_disc_stat([a, c], D))
