"""Input checks shared by the estimator classes."""
from __future__ import annotations

import numpy as np
from sklearn.utils.validation import check_array, check_X_y

from .data import Dataset


def check_X_y_t(X, y, t):
    X, y = check_X_y(X, y, dtype=float, y_numeric=True)
    t = check_array(t, ensure_2d=False, dtype=None)
    if t.shape[0] != X.shape[0]:
        raise ValueError(f"t has {t.shape[0]} rows, X has {X.shape[0]}")
    if not np.all((t == 0) | (t == 1)):
        raise ValueError("t must contain only 0 and 1")
    return X, y, t.astype(np.int8)


def to_dataset(X, y, t, fit_intercept=True):
    X, y, t = check_X_y_t(X, y, t)
    if fit_intercept:
        return Dataset.from_features(X, y, t)
    return Dataset(X, y, t)


def check_fraction(name, value):
    if not 0.0 < value < 1.0:
        raise ValueError(f"{name} must lie in (0, 1), got {value!r}")
