"""Labeled regression data with a binary type attribute."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


class NoSolutionFound:
    """The refusal value returned when the safety test cannot certify a solution.

    Instances compare equal to each other regardless of ``reason``; the reason
    is a diagnostic only.
    """

    __slots__ = ("reason",)

    def __init__(self, reason=""):
        self.reason = reason

    def __eq__(self, other):
        return isinstance(other, NoSolutionFound)

    def __hash__(self):
        return hash(NoSolutionFound)

    def __bool__(self):
        return False

    def __repr__(self):
        return f"NoSolutionFound({self.reason!r})" if self.reason else "NoSolutionFound()"


NSF = NoSolutionFound()


def is_nsf(outcome):
    return isinstance(outcome, NoSolutionFound)


class ConstraintInfeasibleError(ValueError):
    """A statistic needs both types present and one of them is missing."""


@dataclass(frozen=True, eq=False)
class Paired:
    """Type-0 / type-1 points matched in encounter order, surplus dropped."""

    dX: np.ndarray  # X0_i - X1_i
    dy: np.ndarray  # y0_i - y1_i

    def __len__(self):
        return self.dy.shape[0]


@dataclass(frozen=True, eq=False)
class Dataset:
    """Rows ``(x, y, t)``; ``X`` already carries the constant feature as its last column.

    Row order is significant: pairing and partitioning both follow it.
    """

    X: np.ndarray
    y: np.ndarray
    t: np.ndarray
    feature_names: tuple = field(default=())

    def __post_init__(self):
        X = np.ascontiguousarray(self.X, dtype=float)
        y = np.ascontiguousarray(self.y, dtype=float).ravel()
        t = np.ascontiguousarray(self.t).ravel()
        if X.ndim != 2:
            raise ValueError("X must be two-dimensional")
        if not (X.shape[0] == y.shape[0] == t.shape[0]):
            raise ValueError("X, y and t must have the same number of rows")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise ValueError("features and labels must be finite")
        if t.size and not np.all((t == 0) | (t == 1)):
            raise ValueError("type indicator t must be 0 or 1")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "t", t.astype(np.int8))
        object.__setattr__(self, "feature_names", tuple(self.feature_names))

    @classmethod
    def from_features(cls, features, y, t, feature_names=()):
        """Build from raw features, appending the constant-1 column."""
        F = np.asarray(features, dtype=float)
        if F.ndim == 1:
            F = F[:, None]
        X = np.hstack([F, np.ones((F.shape[0], 1))])
        return cls(X, y, t, feature_names)

    def __len__(self):
        return self.y.shape[0]

    @property
    def m(self):
        return len(self)

    @property
    def m1(self):
        return int(self.t.sum())

    @property
    def m0(self):
        return self.m - self.m1

    @property
    def n_features(self):
        return self.X.shape[1]

    @property
    def features(self):
        """Feature columns without the appended constant."""
        return self.X[:, :-1]

    def subset(self, index):
        return Dataset(self.X[index], self.y[index], self.t[index], self.feature_names)

    @cached_property
    def paired(self):
        i0 = np.flatnonzero(self.t == 0)
        i1 = np.flatnonzero(self.t == 1)
        n = min(i0.size, i1.size)
        if n == 0:
            raise ConstraintInfeasibleError(
                f"both types must be present (m0={i0.size}, m1={i1.size})"
            )
        i0, i1 = i0[:n], i1[:n]
        return Paired(self.X[i0] - self.X[i1], self.y[i0] - self.y[i1])

    def split(self, fraction, shuffle=False, seed=None):
        """Prefix split: the first ``round(fraction*m)`` rows go to the first part.

        With ``shuffle`` the rows are permuted first by a seeded generator.
        """
        if not 0.0 < fraction < 1.0:
            raise ValueError("fraction must lie in (0, 1)")
        order = np.arange(self.m)
        if shuffle:
            order = np.random.default_rng(seed).permutation(self.m)
        n1 = int(round(fraction * self.m))
        return self.subset(order[:n1]), self.subset(order[n1:])
