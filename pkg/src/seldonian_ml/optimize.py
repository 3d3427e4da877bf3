"""Derivative-free candidate search shared by every algorithm in the package."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize


class ConvergenceWarning(UserWarning):
    pass


@dataclass(frozen=True)
class SearchConfig:
    """Knobs for partitioning and the candidate search.

    ``split_fraction`` is the share of rows used for candidate selection; the
    rest go to the safety test.  ``theta0=None`` means "algorithm default".
    """

    split_fraction: float = 0.2
    max_iter: int = 2000
    tol: float = 1e-8
    theta0: tuple | None = None
    seed: int = 0
    n_restarts: int = 2
    simplex_step: float = 0.5
    shuffle: bool = False

    def __post_init__(self):
        if not 0.0 < self.split_fraction < 1.0:
            raise ValueError("split_fraction must lie in (0, 1)")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.n_restarts < 0:
            raise ValueError("n_restarts must be non-negative")


def _simplex(x0, step):
    n = x0.size
    sim = np.tile(x0, (n + 1, 1))
    sim[1:] += step * np.eye(n)
    return sim


def _nelder_mead(objective, x0, cfg):
    res = minimize(
        objective,
        x0,
        method="Nelder-Mead",
        options={
            "initial_simplex": _simplex(x0, cfg.simplex_step),
            "maxfev": cfg.max_iter,
            "maxiter": cfg.max_iter,
            "xatol": cfg.tol,
            "fatol": cfg.tol,
            "adaptive": x0.size > 2,
        },
    )
    # Polish from the collapsed simplex; Nelder-Mead can stall near a kink.
    res2 = minimize(
        objective,
        res.x,
        method="Nelder-Mead",
        options={
            "initial_simplex": _simplex(res.x, max(cfg.simplex_step * 1e-2, 10 * cfg.tol)),
            "maxfev": cfg.max_iter,
            "maxiter": cfg.max_iter,
            "xatol": cfg.tol,
            "fatol": cfg.tol,
            "adaptive": x0.size > 2,
        },
    )
    best = res2 if res2.fun <= res.fun else res
    return np.asarray(best.x, dtype=float), float(best.fun), bool(res.success and res2.success)


def minimize_candidate(objective, cfg=SearchConfig(), x0=None, dim=None):
    """Locally minimise ``objective`` with Nelder-Mead and seeded restarts.

    The first start is ``x0`` (or ``cfg.theta0``, or zeros of length ``dim``);
    each restart perturbs the best point found so far with standard normal
    noise.  Ties keep the earlier point.  If no run meets the tolerance the
    best point is still returned and a :class:`ConvergenceWarning` is issued.
    """
    if x0 is None:
        x0 = cfg.theta0
    if x0 is None:
        if dim is None:
            raise ValueError("need x0, cfg.theta0 or dim")
        x0 = np.zeros(dim)
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    rng = np.random.default_rng(cfg.seed)

    best_x, best_f, converged = _nelder_mead(objective, x0, cfg)
    for _ in range(cfg.n_restarts):
        start = best_x + rng.standard_normal(best_x.size)
        x, f, ok = _nelder_mead(objective, start, cfg)
        if f < best_f:
            best_x, best_f = x, f
        converged = converged or ok
    if not converged:
        warnings.warn("candidate search exhausted its budget", ConvergenceWarning, stacklevel=2)
    return best_x
