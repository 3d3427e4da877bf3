"""Seeded random streams (see :mod:`seldonian_ml.synthgen` for the contract)."""
from __future__ import annotations

import numpy as np

RNG_ALGORITHM = "PCG64/SeedSequence v1; normals via Box-Muller"


def make_rng(seed=None, key=()):
    """PCG64 generator for ``SeedSequence(seed, spawn_key=key)``."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=tuple(key))))


def box_muller(rng, n):
    """``n`` standard normals: ``sqrt(-2 ln(1-u1)) * (cos, sin)(2 pi u2)``."""
    k = (n + 1) // 2
    u1 = rng.random(k)
    u2 = rng.random(k)
    r = np.sqrt(-2.0 * np.log1p(-u1))
    z = np.concatenate([r * np.cos(2.0 * np.pi * u2), r * np.sin(2.0 * np.pi * u2)])
    return z[:n]
