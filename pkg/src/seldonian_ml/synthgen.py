"""The two-type synthetic applicant distribution and its analytic oracles.

Generative model: ``T`` is a fair type label, ``Y | T=0 ~ N(1, 1)``,
``Y | T=1 ~ N(-1, 1)`` and ``X = Y + N(0, 1)``.  Features are ``(x, 1)``.

Random streams
--------------
All randomness comes from numpy's ``PCG64`` bit generator seeded through
``SeedSequence``.  Independent streams for experiment trials use
``SeedSequence(master_seed, spawn_key=key)`` where ``key`` is a tuple of
non-negative integers, e.g. ``(m, trial)``.  Normal variates are produced by
the Box-Muller transform from ``Generator.random()`` uniforms (see
:func:`box_muller`), so other implementations can match the distribution
without matching numpy's internal ziggurat sampler.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._random import box_muller, make_rng
from .data import Dataset

@dataclass(frozen=True)
class IllustrativeParams:
    m: int
    seed: int = 0
    balanced: bool = True

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be at least 1")


def gen_illustrative(m, seed=0, balanced=True, rng=None) -> Dataset:
    """Draw ``m`` rows from the synthetic distribution.

    With ``balanced`` (the default) exactly ``m // 2`` rows of each type are
    drawn (an odd extra row gets a fair-coin type) and their order is
    shuffled; otherwise each type is an independent fair coin.
    """
    if isinstance(m, IllustrativeParams):
        m, seed, balanced = m.m, m.seed, m.balanced
    if m < 1:
        raise ValueError("m must be at least 1")
    rng = make_rng(seed) if rng is None else rng
    if balanced:
        t = np.zeros(m, dtype=np.int8)
        t[: m // 2] = 1
        if m % 2:
            t[-1] = rng.random() < 0.5
        t = t[rng.permutation(m)]
    else:
        t = (rng.random(m) < 0.5).astype(np.int8)
    y = np.where(t == 0, 1.0, -1.0) + box_muller(rng, m)
    x = y + box_muller(rng, m)
    return Dataset.from_features(x, y, t, feature_names=("x",))


def true_disc_stat(theta) -> float:
    """Exact discriminatory statistic of ``y_hat = theta[0]*x + theta[1]``.

    ``E[X | T=0] = 1`` and ``E[X | T=1] = -1``, so the intercept cancels and
    ``d = (theta0 - 1) - (-theta0 + 1) = 2*theta0 - 2``.
    """
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (2,):
        raise ValueError("theta must be (slope, intercept)")
    return float(2.0 * theta[0] - 2.0)


def true_mse(theta) -> float:
    """Exact ``E[(theta0*X + theta1 - Y)^2]``.

    The error is ``(theta0 - 1)*Y + theta0*N + theta1`` with ``E[Y] = 0``,
    ``E[Y^2] = 2`` and ``N`` independent standard normal.

    Also accepts a stacked array of shape ``(2, ...)`` for grid evaluation.
    """
    theta = np.asarray(theta, dtype=float)
    if theta.ndim == 0 or theta.shape[0] != 2:
        raise ValueError("theta must be (slope, intercept)")
    a, c = theta
    out = 2.0 * (a - 1.0) ** 2 + a * a + c * c
    return float(out) if np.ndim(out) == 0 else out


def bayes_optimal() -> np.ndarray:
    """Minimiser of :func:`true_mse` over lines: ``y_hat = (2/3) x``."""
    return np.array([2.0 / 3.0, 0.0])
