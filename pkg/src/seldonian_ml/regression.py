"""Seldonian and quasi-Seldonian linear regression.

All algorithms share one shape: split the data, pick a candidate on the first
part with an objective that anticipates the safety test, then run the real
safety test on the held-out part and either return the weights or
:class:`~seldonian_ml.data.NoSolutionFound`.

Throughout, ``Z`` is the vector of paired prediction-error differences
``(theta.x0_i - y0_i) - (theta.x1_i - y1_i)`` whose mean estimates the
discriminatory statistic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import bounds
from .data import ConstraintInfeasibleError, Dataset, NoSolutionFound
from .optimize import SearchConfig, minimize_candidate


def paired_error_diffs(theta, D: Dataset) -> np.ndarray:
    p = D.paired
    return p.dX @ np.asarray(theta, dtype=float) - p.dy


def paired_prediction_diffs(theta, D: Dataset) -> np.ndarray:
    """Per-pair ``theta.x0_i - theta.x1_i``; its mean estimates the gap in mean predictions."""
    return D.paired.dX @ np.asarray(theta, dtype=float)


def sample_mse(theta, D: Dataset) -> float:
    r = D.X @ np.asarray(theta, dtype=float) - D.y
    return float(r @ r) / r.size


def default_b(D: Dataset) -> float:
    """Barrier scale used when the caller gives none: three times the largest |y|."""
    return 3.0 * float(np.max(np.abs(D.y))) if len(D) else 1.0


# -- Hoeffding family ------------------------------------------------------------


def hoeffding_candidate_objective(theta, D1: Dataset, delta, eps, b, k) -> float:
    Z = paired_error_diffs(theta, D1)
    ub = max(
        bounds.predict_hoeffding_upper(Z, b, delta / 2, k),
        bounds.predict_hoeffding_upper(-Z, b, delta / 2, k),
    )
    if ub <= eps:
        return sample_mse(theta, D1)
    return b * b + ub - eps


def hoeffding_safety_bound(theta, D2: Dataset, delta, b) -> float:
    """High-probability upper bound on |d(theta)| from Hoeffding's inequality."""
    Z = paired_error_diffs(theta, D2)
    return max(
        bounds.hoeffding_upper(Z, b, delta / 2),
        bounds.hoeffding_upper(-Z, b, delta / 2),
    )


# -- Student-t family ------------------------------------------------------------


def ttest_candidate_objective(theta, D1: Dataset, delta, eps, k, lam=0.0, b=None) -> float:
    """Candidate objective for QNDLR / QNDLR(lambda).

    Inside the predicted-feasible region this is ``MSE + lam*mean(Z)`` (no
    absolute value on the penalty); outside it is the barrier
    ``b**2 + ub + (lam - 1)*eps``.
    """
    if b is None:
        b = default_b(D1)
    Z = paired_error_diffs(theta, D1)
    if Z.size < 2:
        raise ConstraintInfeasibleError("need at least two pairs for a t-test")
    ub = max(
        bounds.predict_t_upper(Z, delta / 2, k),
        bounds.predict_t_upper(-Z, delta / 2, k),
    )
    if ub <= eps:
        return sample_mse(theta, D1) + lam * float(Z.mean())
    return b * b + ub + (lam - 1.0) * eps


def ttest_safety_bound(theta, D2: Dataset, delta) -> float:
    Z = paired_error_diffs(theta, D2)
    if Z.size < 2:
        raise ValueError("need at least two pairs for a t-test")
    return max(bounds.t_upper(Z, delta / 2), bounds.t_upper(-Z, delta / 2))


# -- shared driver ---------------------------------------------------------------


def _least_squares_start(D: Dataset):
    theta, *_ = np.linalg.lstsq(D.X, D.y, rcond=None)
    return theta


def _split_both_types(D, cfg):
    D1, D2 = D.split(cfg.split_fraction, shuffle=cfg.shuffle, seed=cfg.seed)
    for name, part in (("D1", D1), ("D2", D2)):
        if part.m0 == 0 or part.m1 == 0:
            return None, None, f"{name} is missing a type (m0={part.m0}, m1={part.m1})"
    return D1, D2, ""


def _candidate(objective, D1, cfg):
    x0 = cfg.theta0 if cfg.theta0 is not None else _least_squares_start(D1)
    return minimize_candidate(objective, cfg, x0=x0)


def ndlr(D: Dataset, delta, eps, b, cfg=SearchConfig()):
    """Non-discriminatory linear regression (Seldonian, Hoeffding-based)."""
    D1, D2, why = _split_both_types(D, cfg)
    if D1 is None:
        return NoSolutionFound(why)
    k = len(D2)
    theta_c = _candidate(
        lambda th: hoeffding_candidate_objective(th, D1, delta, eps, b, k), D1, cfg
    )
    ub = hoeffding_safety_bound(theta_c, D2, delta, b)
    if ub <= eps:
        return theta_c
    return NoSolutionFound(f"safety bound {ub:.4g} > eps {eps:.4g}")


def qndlr(D: Dataset, delta, eps, lam=0.0, b=None, cfg=SearchConfig()):
    """Quasi-non-discriminatory linear regression; ``lam > 0`` gives QNDLR(lambda)."""
    D1, D2, why = _split_both_types(D, cfg)
    if D1 is None:
        return NoSolutionFound(why)
    if len(D1.paired) < 2 or len(D2.paired) < 2:
        return NoSolutionFound("fewer than two pairs in a partition")
    if b is None:
        b = default_b(D1)
    k = len(D2)
    theta_c = _candidate(
        lambda th: ttest_candidate_objective(th, D1, delta, eps, k, lam, b), D1, cfg
    )
    ub = ttest_safety_bound(theta_c, D2, delta)
    if ub <= eps:
        return theta_c
    return NoSolutionFound(f"safety bound {ub:.4g} > eps {eps:.4g}")


# -- general quasi-Seldonian algorithm -------------------------------------------


@dataclass(frozen=True)
class ConstraintSpec:
    """A behavioural constraint ``E[estimator(theta, D)] <= 0`` held with prob. ``1 - delta``.

    ``estimator`` returns a vector of unbiased estimates of ``g(theta)``.
    """

    estimator: Callable[[np.ndarray, Dataset], np.ndarray]
    delta: float
    description: str = ""

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")


def abs_mean_constraints(per_pair, eps, delta, name):
    """Split ``|E[per_pair]| <= eps`` into two one-sided constraints at ``delta/2`` each."""
    return [
        ConstraintSpec(lambda th, D: per_pair(th, D) - eps, delta / 2, f"{name} <= eps"),
        ConstraintSpec(lambda th, D: -per_pair(th, D) - eps, delta / 2, f"-{name} <= eps"),
    ]


def error_diff_constraints(eps, delta):
    return abs_mean_constraints(paired_error_diffs, eps, delta, "error gap")


def prediction_diff_constraints(eps, delta):
    return abs_mean_constraints(paired_prediction_diffs, eps, delta, "prediction gap")


def negative_mse(theta, D):
    return -sample_mse(theta, D)


def _estimates(spec, theta, D):
    g = np.asarray(spec.estimator(theta, D), dtype=float).ravel()
    if g.size < 2 or not np.all(np.isfinite(g)):
        raise ValueError(f"degenerate estimates for constraint {spec.description!r}")
    return g


def predicted_constraint_bound(spec, theta, D1, k):
    g = _estimates(spec, theta, D1)
    return float(g.mean()) + 2.0 * float(g.std(ddof=1)) / math.sqrt(k) * bounds.t_quantile(
        1.0 - spec.delta, k - 1
    )


def constraint_bound(spec, theta, D2):
    """t-test upper bound on ``g(theta)``; the sample count is that of the estimates."""
    return bounds.t_upper(_estimates(spec, theta, D2), spec.delta)


def quasi_seldonian_general(
    D: Dataset,
    constraints: Sequence[ConstraintSpec],
    objective: Callable[[np.ndarray, Dataset], float] = negative_mse,
    cfg=SearchConfig(),
    barrier=1e6,
):
    """General quasi-Seldonian search over linear weights.

    ``objective`` is *maximised*.  A candidate must satisfy every constraint's
    predicted bound (twice the half-width, ``|D2|`` samples) on the first
    partition; it is returned only if each constraint independently passes its
    own t-test on the second partition.  Infeasible points score
    ``barrier + total predicted violation`` during the search.
    """
    D1, D2, why = _split_both_types(D, cfg)
    if D1 is None:
        return NoSolutionFound(why)
    k = len(D2)

    def score(theta):
        violation = 0.0
        for spec in constraints:
            try:
                ub = predicted_constraint_bound(spec, theta, D1, k)
            except ValueError:
                return barrier * 10.0
            violation += max(ub, 0.0)
        if violation > 0.0:
            return barrier + violation
        return -float(objective(theta, D1))

    try:
        theta_c = _candidate(score, D1, cfg)
        for spec in constraints:
            ub = constraint_bound(spec, theta_c, D2)
            if ub > 0.0:
                return NoSolutionFound(f"{spec.description or 'constraint'}: bound {ub:.4g} > 0")
    except ValueError as exc:
        return NoSolutionFound(str(exc))
    return theta_c
