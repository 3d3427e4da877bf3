import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seldonian_ml import IllustrativeParams, bayes_optimal, gen_illustrative, true_disc_stat, true_mse
from seldonian_ml._random import box_muller, make_rng
from seldonian_ml.baselines import sample_disc_stat
from seldonian_ml.regression import sample_mse


def test_type_balance(big_synthetic):
    assert big_synthetic.t.mean() == pytest.approx(0.5, abs=0.002)


def test_unbalanced_types_are_fair_coins():
    D = gen_illustrative(1_000_000, seed=5, balanced=False)
    assert D.t.mean() == pytest.approx(0.5, abs=0.002)
    assert D.m0 != D.m1


def test_conditional_label_mean(big_synthetic):
    D = big_synthetic
    assert D.y[D.t == 0].mean() == pytest.approx(1.0, abs=0.005)
    assert D.y[D.t == 1].mean() == pytest.approx(-1.0, abs=0.005)


def test_feature_label_correlation(big_synthetic):
    r = np.corrcoef(big_synthetic.features[:, 0], big_synthetic.y)[0, 1]
    assert r == pytest.approx(2 / np.sqrt(6), abs=0.005)


def test_reproducible():
    a, b = gen_illustrative(IllustrativeParams(500, seed=9)), gen_illustrative(500, seed=9)
    assert np.array_equal(a.X, b.X) and np.array_equal(a.y, b.y) and np.array_equal(a.t, b.t)
    assert not np.array_equal(a.y, gen_illustrative(500, seed=10).y)


def test_constant_feature_last():
    D = gen_illustrative(10, seed=0)
    assert np.all(D.X[:, -1] == 1.0) and D.feature_names == ("x",)


def test_params_validation():
    with pytest.raises(ValueError):
        IllustrativeParams(0)


def test_box_muller_is_standard_normal():
    z = box_muller(make_rng(3), 200_001)
    assert z.size == 200_001
    assert z.mean() == pytest.approx(0.0, abs=0.01) and z.std() == pytest.approx(1.0, abs=0.01)


def test_streams_are_independent_by_key():
    a = make_rng(1, key=(1000, 0)).random(5)
    b = make_rng(1, key=(1000, 1)).random(5)
    assert not np.array_equal(a, b)
    assert np.array_equal(a, make_rng(1, key=(1000, 0)).random(5))


@pytest.mark.parametrize("theta,expected", [((2 / 3, 0), -2 / 3), ((1, 5.0), 0.0), ((1, -3.0), 0.0), ((0, 0), -2.0)])
def test_true_disc_stat_values(theta, expected):
    assert true_disc_stat(theta) == pytest.approx(expected, abs=1e-15)


def test_true_mse_at_zero():
    assert true_mse((0.0, 0.0)) == 2.0


def test_true_mse_matches_monte_carlo_1e7():
    thetas = [np.array(v) for v in ((0.0, 0.0), (2 / 3, 0.0), (1.2, -0.4))]
    sums = np.zeros(len(thetas))
    n = 0
    for chunk in range(10):
        D = gen_illustrative(1_000_000, seed=100 + chunk)
        for i, th in enumerate(thetas):
            sums[i] += sample_mse(th, D) * D.m
        n += D.m
    for th, s in zip(thetas, sums):
        assert s / n == pytest.approx(true_mse(th), abs=5e-3)


def test_bayes_optimal_and_its_disc_stat():
    np.testing.assert_allclose(bayes_optimal(), [0.6667, 0.0], atol=1e-4)
    assert true_disc_stat(bayes_optimal()) == pytest.approx(-2 / 3)
    assert true_mse(bayes_optimal()) < true_mse((1.0, 0.0))


def test_grid_argmin_of_true_mse():
    from seldonian_ml.harness.oracle import mse_argmin

    np.testing.assert_allclose(mse_argmin(), bayes_optimal(), atol=1e-3)


def test_true_mse_minimum_over_random_probes():
    rng = np.random.default_rng(0)
    probes = rng.uniform(-5, 5, size=(2, 1000))
    assert np.all(true_mse(probes) >= true_mse(bayes_optimal()))


@settings(max_examples=20, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3))
def test_sample_disc_stat_converges(big_synthetic, a, c):
    assert sample_disc_stat([a, c], big_synthetic) == pytest.approx(true_disc_stat([a, c]), abs=0.01)
