"""Standard-approach comparators: least squares and soft-constrained regression."""
from __future__ import annotations

import warnings

import numpy as np

from .data import ConstraintInfeasibleError, Dataset
from .optimize import SearchConfig, minimize_candidate
from .regression import sample_mse


def least_squares(D: Dataset) -> np.ndarray:
    """Normal-equation fit; falls back to the pseudo-inverse when rank deficient."""
    A = D.X.T @ D.X
    rhs = D.X.T @ D.y
    if np.linalg.matrix_rank(A) < A.shape[0]:
        warnings.warn("design matrix is rank deficient; using the pseudo-inverse", RuntimeWarning)
        return np.linalg.pinv(D.X) @ D.y
    return np.linalg.solve(A, rhs)


def sample_disc_stat(theta, D: Dataset) -> float:
    """Mean error on type-0 rows minus mean error on type-1 rows (all rows used)."""
    if D.m0 == 0 or D.m1 == 0:
        raise ConstraintInfeasibleError("both types must be present")
    err = D.X @ np.asarray(theta, dtype=float) - D.y
    return float(err[D.t == 0].mean() - err[D.t == 1].mean())


def sclr_objective(theta, D: Dataset, lam) -> float:
    return sample_mse(theta, D) + lam * abs(sample_disc_stat(theta, D))


def sclr(D: Dataset, lam, cfg=SearchConfig()) -> np.ndarray:
    """Soft-constrained linear regression: minimise ``MSE + lam*|d_hat|``.

    Starts from the least-squares weights, so ``lam=0`` returns them unchanged
    up to the optimiser tolerance.
    """
    if lam < 0:
        raise ValueError("lam must be non-negative")
    if D.m0 == 0 or D.m1 == 0:
        raise ConstraintInfeasibleError("both types must be present")
    # Precompute so each evaluation is O(l^2) instead of O(m*l).
    G = D.X.T @ D.X / D.m
    h = D.X.T @ D.y / D.m
    c = float(D.y @ D.y) / D.m
    mask0 = D.t == 0
    gx = D.X[mask0].mean(axis=0) - D.X[~mask0].mean(axis=0)
    gy = float(D.y[mask0].mean() - D.y[~mask0].mean())

    def objective(theta):
        return theta @ G @ theta - 2.0 * theta @ h + c + lam * abs(gx @ theta - gy)

    x0 = cfg.theta0 if cfg.theta0 is not None else least_squares(D)
    return minimize_candidate(objective, cfg, x0=x0)
