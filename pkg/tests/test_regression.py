import math
import warnings

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from conftest import make_dataset
from seldonian_ml import Dataset, NoSolutionFound, gen_illustrative, is_nsf
from seldonian_ml import regression as reg
from seldonian_ml.optimize import ConvergenceWarning, SearchConfig, minimize_candidate

THETA_BAYES = np.array([2 / 3, 0.0])


def test_pairing_two_points():
    D = Dataset(np.array([[1.0, 1.0], [2.0, 1.0]]), np.array([0.0, 1.0]), np.array([0, 1]))
    np.testing.assert_array_equal(reg.paired_error_diffs([1.0, 0.0], D), [0.0])


def test_pairing_follows_encounter_order_and_drops_surplus():
    D = make_dataset([(0, 5, 0), (0, 1, 1), (0, 7, 0), (0, 2, 0), (0, 4, 1)])
    # theta = 0: errors are -y; pairs (5,1) and (7,4); the third type-0 row is unused.
    np.testing.assert_array_equal(reg.paired_error_diffs([0.0, 0.0], D), [-4.0, -3.0])


def test_identical_pairs_give_zero_z():
    D = make_dataset([(1, 2, 0), (1, 2, 1), (3, 1, 0), (3, 1, 1)])
    np.testing.assert_array_equal(reg.paired_error_diffs([0.4, -0.2], D), [0.0, 0.0])


def test_missing_type_is_infeasible():
    D = make_dataset([(1, 2, 0), (2, 3, 0)])
    with pytest.raises(ValueError):
        reg.paired_error_diffs([1.0, 0.0], D)


def test_mean_z_at_bayes_line(big_synthetic):
    assert reg.paired_error_diffs(THETA_BAYES, big_synthetic).mean() == pytest.approx(-2 / 3, abs=0.01)


# -- Hoeffding objective and safety bound -------------------------------------------


def _exact_line(m=40, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=m)
    t = np.arange(m) % 2
    return Dataset.from_features(x, 2 * x + 1, t)


def test_hoeffding_objective_zero_on_exact_fit():
    D = _exact_line()
    assert reg.hoeffding_candidate_objective([2.0, 1.0], D, 0.05, 1e6, 1.0, 100) == 0.0


def test_hoeffding_objective_eps_zero_is_barrier():
    D = _exact_line()
    val = reg.hoeffding_candidate_objective([2.0, 1.0], D, 0.05, 0.0, 1.0, 100)
    ub = math.sqrt(math.log(2 / 0.05) / 100)
    assert val == pytest.approx(1.0 + ub)
    assert val >= 1.0


def test_hoeffding_barrier_grows_with_ub():
    D = gen_illustrative(200, seed=3)
    small = reg.hoeffding_candidate_objective([2 / 3, 0], D, 0.05, 0.01, 2.0, 1000)
    large = reg.hoeffding_candidate_objective([2 / 3, 0], D, 0.05, 0.01, 2.0, 10)
    assert small >= 4.0 - 0.01 and large > small


def test_hoeffding_safety_zero_z():
    D = make_dataset([(1, 2, 0), (1, 2, 1)] * 9)
    m = 9
    assert reg.hoeffding_safety_bound([0.0, 0.0], D, 2 * math.exp(-2), 1.0) == pytest.approx(math.sqrt(1 / m))


def test_hoeffding_safety_zero_range_is_abs_mean():
    D = gen_illustrative(101, seed=4)
    Z = reg.paired_error_diffs(THETA_BAYES, D)
    assert reg.hoeffding_safety_bound(THETA_BAYES, D, 0.05, 0.0) == pytest.approx(abs(Z.mean()))


# -- t-test objective and safety bound ------------------------------------------------


def test_ttest_objective_zero_on_exact_fit():
    D = _exact_line()
    assert reg.ttest_candidate_objective([2.0, 1.0], D, 0.05, 1e6, 100, lam=0.0) == 0.0


def test_ttest_barrier_with_lambda_one():
    D = gen_illustrative(200, seed=5)
    Z = reg.paired_error_diffs(THETA_BAYES, D)
    ub = max(reg.bounds.predict_t_upper(Z, 0.025, 50), reg.bounds.predict_t_upper(-Z, 0.025, 50))
    val = reg.ttest_candidate_objective(THETA_BAYES, D, 0.05, 1e-3, 50, lam=1.0, b=3.0)
    assert val == pytest.approx(9.0 + ub)


def test_ttest_inside_branch_penalises_mean_z_linearly():
    D = gen_illustrative(400, seed=6)
    theta = np.array([1.0, 0.0])
    Z = reg.paired_error_diffs(theta, D)
    base = reg.ttest_candidate_objective(theta, D, 0.05, 1e6, 400, lam=0.0)
    with_lam = reg.ttest_candidate_objective(theta, D, 0.05, 1e6, 400, lam=2.5)
    assert with_lam - base == pytest.approx(2.5 * Z.mean())


def test_ttest_safety_constant_z():
    D = make_dataset([(0, 0, 0), (0, 1.5, 1)] * 5)
    assert reg.ttest_safety_bound([0.0, 0.0], D, 0.05) == pytest.approx(1.5)


def test_ttest_safety_two_pairs():
    D = make_dataset([(0, 0, 0), (0, 0, 0), (0, 1, 1), (0, 3, 1)])
    assert reg.ttest_safety_bound([0.0, 0.0], D, 0.1) == pytest.approx(8.3138, abs=1e-4)


def test_ttest_safety_needs_two_pairs():
    D = make_dataset([(0, 0, 0), (0, 1, 1)])
    with pytest.raises(ValueError):
        reg.ttest_safety_bound([0.0, 0.0], D, 0.1)


# -- full algorithms --------------------------------------------------------------


def test_ndlr_huge_eps_returns_candidate():
    D = gen_illustrative(500, seed=7)
    out = reg.ndlr(D, 0.05, 1e6, 1.0)
    assert not is_nsf(out) and out.shape == (2,)


def test_ndlr_eps_zero_refuses():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        assert is_nsf(reg.ndlr(gen_illustrative(500, seed=8), 0.05, 0.0, 1.0))


def test_ndlr_small_m_refuses():
    outs = [reg.ndlr(gen_illustrative(1000, seed=s), 0.05, 0.1, 12.0) for s in range(10)]
    assert sum(is_nsf(o) for o in outs) >= 9


def test_qndlr_eps_zero_refuses():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        assert is_nsf(reg.qndlr(gen_illustrative(800, seed=9), 0.05, 0.0))


def test_missing_type_in_partition_is_nsf():
    t = np.r_[np.zeros(20, int), np.ones(80, int)]
    D = Dataset.from_features(np.arange(100.0), np.arange(100.0), t)
    out = reg.qndlr(D, 0.05, 0.1)
    assert isinstance(out, NoSolutionFound) and "D1" in out.reason


def test_qndlr_is_deterministic():
    D = gen_illustrative(3000, seed=10)
    a = reg.qndlr(D, 0.05, 0.1, cfg=SearchConfig(seed=3))
    b = reg.qndlr(D, 0.05, 0.1, cfg=SearchConfig(seed=3))
    if is_nsf(a):
        assert is_nsf(b) and a.reason == b.reason
    else:
        assert np.array_equal(a, b)


@given(st.integers(10, 400), st.floats(0.05, 0.95))
def test_partition_is_disjoint_and_complete(m, frac):
    D = Dataset.from_features(np.arange(m, dtype=float), np.zeros(m), np.arange(m) % 2)
    D1, D2 = D.split(frac)
    a, b = D1.features[:, 0], D2.features[:, 0]
    assert len(set(a) & set(b)) == 0
    assert sorted(np.r_[a, b]) == list(range(m))


@settings(max_examples=30, suppress_health_check=[HealthCheck.too_slow])
@given(st.integers(0, 10_000), st.floats(-2, 2), st.floats(-2, 2))
def test_label_flip_symmetry(seed, a, c):
    D = gen_illustrative(60, seed=seed)
    F = Dataset(D.X, D.y, 1 - D.t)
    theta = np.array([a, c])
    np.testing.assert_allclose(reg.paired_error_diffs(theta, F), -reg.paired_error_diffs(theta, D))
    assert reg.ttest_safety_bound(theta, F, 0.05) == pytest.approx(reg.ttest_safety_bound(theta, D, 0.05))
    assert reg.hoeffding_safety_bound(theta, F, 0.05, 3.0) == pytest.approx(
        reg.hoeffding_safety_bound(theta, D, 0.05, 3.0)
    )


def test_delta_only_changes_half_width():
    D = gen_illustrative(300, seed=11)
    theta = np.array([0.9, 0.1])
    Z = reg.paired_error_diffs(theta, D)
    for delta in (0.01, 0.1, 0.3):
        inside = reg.ttest_candidate_objective(theta, D, delta, 1e6, 300)
        assert inside == pytest.approx(reg.sample_mse(theta, D))
        ub = reg.ttest_safety_bound(theta, D, delta)
        assert ub == pytest.approx(abs(Z.mean()) + (reg.bounds.t_upper(Z, delta / 2) - Z.mean()))


# -- general algorithm ----------------------------------------------------------


def test_general_constant_constraint_passes():
    D = gen_illustrative(200, seed=12)
    spec = reg.ConstraintSpec(lambda th, D: -np.ones(len(D)), 0.05, "always satisfied")
    out = reg.quasi_seldonian_general(D, [spec])
    assert not is_nsf(out)
    # Unconstrained in effect, so the candidate is the least-squares fit on the first partition.
    D1, _ = D.split(0.2)
    np.testing.assert_allclose(out, reg._least_squares_start(D1), atol=1e-5)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.3, 1.3), st.floats(-0.3, 0.3), st.floats(0.02, 0.4))
def test_general_reproduces_qndlr_safety_decision(seed, a, c, eps):
    D2 = gen_illustrative(400, seed=seed)
    theta = np.array([a, c])
    q = reg.ttest_safety_bound(theta, D2, 0.05) <= eps
    g = all(reg.constraint_bound(s, theta, D2) <= 0 for s in reg.error_diff_constraints(eps, 0.05))
    assert q == g


def test_general_degenerate_estimates_give_nsf():
    D = gen_illustrative(100, seed=13)
    spec = reg.ConstraintSpec(lambda th, D: np.array([0.0]), 0.05, "one estimate")
    out = reg.quasi_seldonian_general(D, [spec])
    assert is_nsf(out) and "one estimate" in out.reason


def test_constraint_spec_rejects_bad_delta():
    with pytest.raises(ValueError):
        reg.ConstraintSpec(lambda th, D: np.zeros(3), 1.5)


# -- optimiser -------------------------------------------------------------------


def test_minimize_quadratic():
    x = minimize_candidate(lambda v: float((v[0] - 3.0) ** 2), SearchConfig(), dim=1)
    assert x[0] == pytest.approx(3.0, abs=1e-4)


def test_minimize_mse_on_exact_line():
    D = _exact_line(m=50, seed=1)
    x = minimize_candidate(lambda th: reg.sample_mse(th, D), SearchConfig(), x0=[0.0, 0.0])
    np.testing.assert_allclose(x, [2.0, 1.0], atol=1e-4)


def test_minimize_is_deterministic():
    f = lambda v: float(np.sum(np.abs(v - [1.0, -2.0])) + np.sin(5 * v[0]))  # noqa: E731
    a = minimize_candidate(f, SearchConfig(seed=4), dim=2)
    b = minimize_candidate(f, SearchConfig(seed=4), dim=2)
    assert np.array_equal(a, b)


def test_minimize_warns_when_budget_exhausted():
    with pytest.warns(ConvergenceWarning):
        minimize_candidate(lambda v: float(np.sum(v * v)), SearchConfig(max_iter=3, n_restarts=0), dim=3, x0=[5.0, 5, 5])


def _predicted_hoeffding(th, D1, b, k):
    Z = reg.paired_error_diffs(th, D1)
    return max(
        reg.bounds.predict_hoeffding_upper(Z, b, 0.025, k),
        reg.bounds.predict_hoeffding_upper(-Z, b, 0.025, k),
    )


def test_barrier_search_ends_feasible_when_any_probe_was():
    # b**2 = 4 exceeds every interior MSE on this data, so the barrier dominates.
    D1 = gen_illustrative(20_000, seed=14)
    k, b, eps = 80_000, 2.0, 0.1
    feasible = []

    def f(th):
        feasible.append(_predicted_hoeffding(th, D1, b, k) <= eps)
        return reg.hoeffding_candidate_objective(th, D1, 0.05, eps, b, k)

    x = minimize_candidate(f, SearchConfig(), x0=reg._least_squares_start(D1))
    assert any(feasible)
    assert _predicted_hoeffding(x, D1, b, k) <= eps
