"""Concentration-bound primitives shared by the safety tests.

Every bound here is an *upper* bound on the mean of the random variable that
produced the samples ``Z``.  Lower bounds are obtained by negation.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy import special


def _as_samples(Z, min_len=1):
    z = np.asarray(Z, dtype=float).ravel()
    if z.size < min_len:
        raise ValueError(f"need at least {min_len} sample(s), got {z.size}")
    if not np.all(np.isfinite(z)):
        raise ValueError("samples must be finite")
    return z


def _check_delta(delta):
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta!r}")


def hoeffding_upper(Z, b, delta):
    """Hoeffding upper bound on the mean: ``mean(Z) + b*sqrt(ln(1/delta)/(2m))``.

    ``b`` is the width of the interval the random variable lives in.  The
    guarantee is only formal when ``b`` really bounds the range of ``Z``.
    """
    z = _as_samples(Z)
    _check_delta(delta)
    if b < 0:
        raise ValueError("b must be non-negative")
    return float(z.mean() + b * math.sqrt(math.log(1.0 / delta) / (2.0 * z.size)))


def predict_hoeffding_upper(Z, b, delta, k):
    """Over-predict what :func:`hoeffding_upper` returns on ``k`` fresh samples.

    The missing factor 2 under the root (compared to :func:`hoeffding_upper`)
    is deliberate inflation.
    """
    z = _as_samples(Z)
    _check_delta(delta)
    if b < 0:
        raise ValueError("b must be non-negative")
    if k < 1:
        raise ValueError("k must be a positive integer")
    return float(z.mean() + b * math.sqrt(math.log(1.0 / delta) / k))


@lru_cache(maxsize=4096)
def _t_quantile_cached(confidence, nu):
    if confidence == 0.5:
        return 0.0
    # Upper tail mass on one side, mapped through I_x(nu/2, 1/2).
    tail = 1.0 - confidence if confidence > 0.5 else confidence
    x = special.betaincinv(0.5 * nu, 0.5, 2.0 * tail)
    t = math.sqrt(nu * (1.0 / x - 1.0)) if x > 0 else math.inf
    # Newton polish against the CDF; betaincinv is already close.
    for _ in range(3):
        if not math.isfinite(t):
            break
        err = special.stdtr(nu, t) - max(confidence, 1.0 - confidence)
        dens = math.exp(
            special.gammaln((nu + 1) / 2)
            - special.gammaln(nu / 2)
            - 0.5 * math.log(nu * math.pi)
            - (nu + 1) / 2 * math.log1p(t * t / nu)
        )
        if dens <= 0:
            break
        step = err / dens
        t -= step
        if abs(step) < 1e-14 * max(1.0, abs(t)):
            break
    return t if confidence > 0.5 else -t


def t_quantile(confidence, nu):
    """Inverse CDF of Student's t with ``nu`` degrees of freedom."""
    if not 0.0 < confidence < 1.0:
        raise ValueError(f"confidence must lie in (0, 1), got {confidence!r}")
    if nu < 1 or int(nu) != nu:
        raise ValueError(f"degrees of freedom must be a positive integer, got {nu!r}")
    return _t_quantile_cached(float(confidence), int(nu))


def _mean_std(z):
    # Bessel-corrected standard deviation.
    return float(z.mean()), float(z.std(ddof=1))


def t_upper(Z, delta):
    """One-sided Student-t upper confidence bound at level ``1 - delta``."""
    z = _as_samples(Z, min_len=2)
    _check_delta(delta)
    mean, sd = _mean_std(z)
    m = z.size
    return mean + sd / math.sqrt(m) * t_quantile(1.0 - delta, m - 1)


def t_lower(Z, delta):
    """Mirror image of :func:`t_upper`."""
    return -t_upper(-np.asarray(Z, dtype=float), delta)


def predict_t_upper(Z, delta, k):
    """Conservative guess at :func:`t_upper` on ``k`` fresh samples.

    Uses twice the half-width the real test would have with ``k`` samples
    and the standard deviation observed in ``Z``.
    """
    z = _as_samples(Z, min_len=2)
    _check_delta(delta)
    if k < 2:
        raise ValueError("k must be at least 2")
    mean, sd = _mean_std(z)
    return mean + 2.0 * sd / math.sqrt(k) * t_quantile(1.0 - delta, k - 1)
