"""scikit-learn style wrappers around the functional algorithms.

Every regressor takes the type indicator as a third ``fit`` argument::

    est = QNDLR(delta=0.05, epsilon=0.1).fit(X, y, t)
    if est.solution_found_:
        est.predict(X_new)

A refused fit is not an error: ``solution_found_`` is False, ``theta_`` is
``None`` and :meth:`predict` raises :class:`NoSolutionFoundError`.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import baselines, regression
from ._validation import check_fraction, to_dataset
from .data import NoSolutionFound, is_nsf
from .optimize import SearchConfig


class NoSolutionFoundError(RuntimeError):
    pass


class _LinearTypeAwareRegressor(RegressorMixin, BaseEstimator):
    """Shared fit/predict plumbing; subclasses implement ``_solve(D)``."""

    def _search_config(self):
        return SearchConfig(
            split_fraction=getattr(self, "split_fraction", 0.2),
            max_iter=getattr(self, "max_iter", 2000),
            tol=getattr(self, "tol", 1e-8),
            seed=getattr(self, "random_state", None) or 0,
            shuffle=getattr(self, "shuffle", False),
        )

    def fit(self, X, y, t):
        D = to_dataset(X, y, t, self.fit_intercept)
        self.n_features_in_ = D.n_features - int(self.fit_intercept)
        outcome = self._solve(D)
        if is_nsf(outcome):
            self.solution_found_ = False
            self.theta_ = None
            self.nsf_reason_ = outcome.reason
            self.coef_ = None
            self.intercept_ = None
        else:
            self.solution_found_ = True
            self.theta_ = np.asarray(outcome, dtype=float)
            self.nsf_reason_ = ""
            if self.fit_intercept:
                self.coef_, self.intercept_ = self.theta_[:-1], float(self.theta_[-1])
            else:
                self.coef_, self.intercept_ = self.theta_, 0.0
        return self

    def predict(self, X):
        check_is_fitted(self, "solution_found_")
        if not self.solution_found_:
            raise NoSolutionFoundError(self.nsf_reason_ or "no solution found")
        X = check_array(X, dtype=float)
        return X @ self.coef_ + self.intercept_

    @property
    def outcome_(self):
        check_is_fitted(self, "solution_found_")
        return self.theta_ if self.solution_found_ else NoSolutionFound(self.nsf_reason_)


class LeastSquaresRegression(_LinearTypeAwareRegressor):
    """Ordinary least squares; ``t`` is accepted for API symmetry and ignored."""

    def __init__(self, fit_intercept=True):
        self.fit_intercept = fit_intercept

    def _solve(self, D):
        return baselines.least_squares(D)


class SoftConstrainedRegression(_LinearTypeAwareRegressor):
    def __init__(self, lam=1.0, fit_intercept=True, max_iter=2000, tol=1e-8, random_state=None):
        self.lam = lam
        self.fit_intercept = fit_intercept
        self.max_iter = max_iter
        self.tol = tol
        self.random_state = random_state

    def _solve(self, D):
        return baselines.sclr(D, self.lam, self._search_config())


class NDLR(_LinearTypeAwareRegressor):
    """Seldonian regression bounding ``|d(theta)| <= epsilon`` via Hoeffding's inequality.

    ``b`` must bound the range of the paired error differences for the
    guarantee to be formal.
    """

    def __init__(self, delta=0.05, epsilon=0.1, b=10.0, split_fraction=0.2, fit_intercept=True,
                 max_iter=2000, tol=1e-8, shuffle=False, random_state=None):
        self.delta = delta
        self.epsilon = epsilon
        self.b = b
        self.split_fraction = split_fraction
        self.fit_intercept = fit_intercept
        self.max_iter = max_iter
        self.tol = tol
        self.shuffle = shuffle
        self.random_state = random_state

    def _solve(self, D):
        check_fraction("delta", self.delta)
        return regression.ndlr(D, self.delta, self.epsilon, self.b, self._search_config())


class QNDLR(_LinearTypeAwareRegressor):
    """Quasi-Seldonian regression using Student's t; ``lam > 0`` adds the soft penalty."""

    def __init__(self, delta=0.05, epsilon=0.1, lam=0.0, b=None, split_fraction=0.2,
                 fit_intercept=True, max_iter=2000, tol=1e-8, shuffle=False, random_state=None):
        self.delta = delta
        self.epsilon = epsilon
        self.lam = lam
        self.b = b
        self.split_fraction = split_fraction
        self.fit_intercept = fit_intercept
        self.max_iter = max_iter
        self.tol = tol
        self.shuffle = shuffle
        self.random_state = random_state

    def _solve(self, D):
        check_fraction("delta", self.delta)
        return regression.qndlr(D, self.delta, self.epsilon, self.lam, self.b, self._search_config())


class QuasiSeldonianRegression(_LinearTypeAwareRegressor):
    """General quasi-Seldonian linear regression with user constraints.

    ``constraints`` is a list of :class:`~seldonian_ml.regression.ConstraintSpec`;
    ``objective(theta, D)`` is maximised (negative sample MSE by default).
    """

    def __init__(self, constraints=(), objective=None, split_fraction=0.2, fit_intercept=True,
                 max_iter=2000, tol=1e-8, shuffle=False, random_state=None):
        self.constraints = constraints
        self.objective = objective
        self.split_fraction = split_fraction
        self.fit_intercept = fit_intercept
        self.max_iter = max_iter
        self.tol = tol
        self.shuffle = shuffle
        self.random_state = random_state

    def _solve(self, D):
        f = self.objective or regression.negative_mse
        return regression.quasi_seldonian_general(D, list(self.constraints), f, self._search_config())


class QuasiSeldonianPolicySelector(BaseEstimator):
    """Pick a candidate policy distribution from logged episodes.

    ``fit(P, r, R)``: ``P`` sampled policies (m, dim), ``r`` primary returns,
    ``R`` constraint returns (m, n).  After fitting, ``choice_`` is the 0-based
    candidate index or ``None`` when no candidate is safe.  ``thresholds``
    replaces the data-derived behaviour baselines with fixed constants;
    ``constrained=False`` gives the plain importance-sampling argmax.
    """

    def __init__(self, behavior=None, candidates=(), deltas=(0.05,), thresholds=None, constrained=True):
        self.behavior = behavior
        self.candidates = candidates
        self.deltas = deltas
        self.thresholds = thresholds
        self.constrained = constrained

    def fit(self, P, r, R=None):
        from . import rl

        P = check_array(P, dtype=float)
        r = check_array(r, ensure_2d=False, dtype=float)
        R = np.zeros((P.shape[0], 0)) if R is None else check_array(R, ensure_2d=False, dtype=float)
        R = R.reshape(P.shape[0], -1)
        problem = rl.RLProblem(self.behavior, tuple(self.candidates), tuple(self.deltas))
        E = rl.Episodes(P, r, R)
        if not self.constrained:
            out = rl.unconstrained_rl(E, problem)
        elif self.thresholds is not None:
            out = rl.absolute_threshold_constraint(E, problem, self.thresholds)
        else:
            out = rl.quasi_seldonian_rl(E, problem)
        self.choice_ = None if is_nsf(out) else int(out)
        self.solution_found_ = self.choice_ is not None
        return self
