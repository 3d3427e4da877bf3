"""Seldonian and quasi-Seldonian algorithms for fair regression and safe batch RL.

Functional core::

    from seldonian_ml import gen_illustrative, qndlr
    D = gen_illustrative(5000, seed=1)
    theta = qndlr(D, delta=0.05, eps=0.1)   # weights, or NoSolutionFound

Estimator classes with a scikit-learn interface live in
:mod:`seldonian_ml.estimators`.
"""
from .baselines import least_squares, sample_disc_stat, sclr
from .bounds import (
    hoeffding_upper,
    predict_hoeffding_upper,
    predict_t_upper,
    t_lower,
    t_quantile,
    t_upper,
)
from .data import NSF, ConstraintInfeasibleError, Dataset, NoSolutionFound, is_nsf
from .estimators import (
    NDLR,
    QNDLR,
    LeastSquaresRegression,
    NoSolutionFoundError,
    QuasiSeldonianPolicySelector,
    QuasiSeldonianRegression,
    SoftConstrainedRegression,
)
from .optimize import ConvergenceWarning, SearchConfig, minimize_candidate
from .regression import (
    ConstraintSpec,
    error_diff_constraints,
    ndlr,
    paired_error_diffs,
    paired_prediction_diffs,
    prediction_diff_constraints,
    qndlr,
    quasi_seldonian_general,
)
from .rl import (
    BoxDistribution,
    EpisodeRecord,
    Episodes,
    RLProblem,
    ToyGlucoseEnv,
    absolute_threshold_constraint,
    box_pdf,
    importance_estimate,
    overlap_mass,
    quasi_seldonian_rl,
    reward_r,
    reward_r1,
    unconstrained_rl,
)
from .synthgen import IllustrativeParams, bayes_optimal, gen_illustrative, true_disc_stat, true_mse

__all__ = [
    "BoxDistribution",
    "ConstraintInfeasibleError",
    "ConstraintSpec",
    "ConvergenceWarning",
    "Dataset",
    "EpisodeRecord",
    "Episodes",
    "IllustrativeParams",
    "LeastSquaresRegression",
    "NDLR",
    "NSF",
    "NoSolutionFound",
    "NoSolutionFoundError",
    "QNDLR",
    "QuasiSeldonianPolicySelector",
    "QuasiSeldonianRegression",
    "RLProblem",
    "SearchConfig",
    "SoftConstrainedRegression",
    "ToyGlucoseEnv",
    "absolute_threshold_constraint",
    "bayes_optimal",
    "box_pdf",
    "error_diff_constraints",
    "gen_illustrative",
    "hoeffding_upper",
    "importance_estimate",
    "is_nsf",
    "least_squares",
    "minimize_candidate",
    "ndlr",
    "overlap_mass",
    "paired_error_diffs",
    "paired_prediction_diffs",
    "predict_hoeffding_upper",
    "predict_t_upper",
    "prediction_diff_constraints",
    "qndlr",
    "quasi_seldonian_general",
    "quasi_seldonian_rl",
    "reward_r",
    "reward_r1",
    "sample_disc_stat",
    "sclr",
    "t_lower",
    "t_quantile",
    "t_upper",
    "true_disc_stat",
    "true_mse",
    "unconstrained_rl",
]

__version__ = "0.1.0"
