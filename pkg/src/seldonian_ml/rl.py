"""Quasi-Seldonian policy-distribution selection for batch RL.

The learner never picks individual policies.  It picks one of ``l`` candidate
*distributions over policies*, using histories logged while policies were
drawn from a behaviour distribution.  Each logged episode is one sampled
policy ``p`` plus the returns it produced under the primary return function
and under each constraint return function.

Constraint ``j`` requires that switching to the chosen distribution does not
lower the expected constraint return ``r_j`` below the behaviour
distribution's, with probability at least ``1 - delta_j``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import ndtr

from . import bounds
from ._random import box_muller
from .data import NoSolutionFound

MGDL_PER_MMOLL = 18.018018


# -- policy distributions ----------------------------------------------------------


@dataclass(frozen=True)
class BoxDistribution:
    """Uniform distribution over an axis-aligned box (closed)."""

    lower: tuple
    upper: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lower)
        hi = tuple(float(v) for v in self.upper)
        if len(lo) != len(hi) or not lo:
            raise ValueError("lower and upper must have the same positive length")
        if any(a >= b for a, b in zip(lo, hi)):
            raise ValueError("need lower < upper in every dimension")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def volume(self):
        return float(np.prod(np.subtract(self.upper, self.lower)))

    def contains(self, p):
        p = np.asarray(p, dtype=float)
        return np.all((p >= self.lower) & (p <= self.upper), axis=-1)

    def pdf(self, p):
        inside = self.contains(p)
        return np.where(inside, 1.0 / self.volume, 0.0)

    def sample(self, rng, n):
        lo, hi = np.asarray(self.lower), np.asarray(self.upper)
        return lo + (hi - lo) * rng.random((n, lo.size))

    def intersection_volume(self, other):
        lo = np.maximum(self.lower, other.lower)
        hi = np.minimum(self.upper, other.upper)
        return float(np.prod(np.clip(hi - lo, 0.0, None)))

    def is_subset_of(self, other):
        return all(a >= c for a, c in zip(self.lower, other.lower)) and all(
            b <= d for b, d in zip(self.upper, other.upper)
        )


@dataclass(frozen=True)
class DiscreteDistribution:
    """Finite distribution over hashable policy points (used for exact checks)."""

    probs: dict

    def __post_init__(self):
        probs = {k: float(v) for k, v in dict(self.probs).items()}
        if any(v < 0 for v in probs.values()) or not math.isclose(sum(probs.values()), 1.0):
            raise ValueError("probabilities must be non-negative and sum to one")
        object.__setattr__(self, "probs", probs)

    @property
    def support(self):
        return {k for k, v in self.probs.items() if v > 0}

    def pdf(self, p):
        if np.ndim(p) == 0:
            return self.probs.get(p, 0.0)
        return np.array([self.probs.get(_key(q), 0.0) for q in p])

    def sample(self, rng, n):
        keys = list(self.probs)
        idx = rng.choice(len(keys), size=n, p=[self.probs[k] for k in keys])
        return np.array([keys[i] for i in idx])

    def is_subset_of(self, other):
        return self.support <= other.support


def _key(q):
    return q.item() if isinstance(q, np.ndarray) and q.ndim == 0 else q


def box_pdf(mu: BoxDistribution, p) -> float:
    return float(mu.pdf(p))


def overlap_mass(mu_i, mu_b) -> float:
    """Behaviour probability of the candidate's support."""
    if isinstance(mu_i, BoxDistribution) and isinstance(mu_b, BoxDistribution):
        return mu_i.intersection_volume(mu_b) / mu_b.volume
    if isinstance(mu_i, DiscreteDistribution) and isinstance(mu_b, DiscreteDistribution):
        return float(sum(mu_b.probs.get(k, 0.0) for k in mu_i.support))
    raise TypeError("overlap_mass needs two distributions of the same kind")


# -- rewards ---------------------------------------------------------------------


def reward_r(bg):
    """Primary reward for a blood-glucose reading in mg/dL (penalises both extremes)."""
    u = np.asarray(bg, dtype=float) / MGDL_PER_MMOLL - 6.0
    out = np.where(u < 0, -(u * u) / 5.0, -(u * u) / 10.0)
    return float(out) if out.ndim == 0 else out


def reward_r1(bg):
    """Auxiliary reward that only penalises low blood glucose."""
    u = np.asarray(bg, dtype=float) / MGDL_PER_MMOLL - 6.0
    out = np.where(u < 0, -(u * u) / 5.0, 0.0)
    return float(out) if out.ndim == 0 else out


# -- data containers -------------------------------------------------------------


@dataclass(frozen=True)
class EpisodeRecord:
    policy: tuple
    r: float
    constraint_returns: tuple = ()


@dataclass(frozen=True)
class Episodes:
    """Column view of a batch of episodes: ``P`` (m, dim), ``r`` (m,), ``R`` (m, n)."""

    P: np.ndarray
    r: np.ndarray
    R: np.ndarray

    @classmethod
    def from_records(cls, records: Sequence[EpisodeRecord]):
        records = list(records)
        P = np.array([rec.policy for rec in records])
        r = np.array([rec.r for rec in records], dtype=float)
        R = np.array([rec.constraint_returns for rec in records], dtype=float).reshape(len(records), -1)
        return cls(P, r, R)

    @classmethod
    def coerce(cls, D):
        return D if isinstance(D, Episodes) else cls.from_records(D)

    def __len__(self):
        return self.r.shape[0]

    def records(self):
        return [
            EpisodeRecord(tuple(np.atleast_1d(p).tolist()), float(r), tuple(R))
            for p, r, R in zip(self.P, self.r, self.R)
        ]


@dataclass(frozen=True)
class RLProblem:
    behavior: object
    candidates: tuple
    deltas: tuple = ()
    environment: object = None

    def __post_init__(self):
        cands = tuple(self.candidates)
        if not cands:
            raise ValueError("need at least one candidate distribution")
        for i, mu in enumerate(cands):
            if not mu.is_subset_of(self.behavior):
                raise ValueError(f"candidate {i} has support outside the behaviour support")
        if any(not 0.0 < d < 1.0 for d in self.deltas):
            raise ValueError("every delta must lie in (0, 1)")
        object.__setattr__(self, "candidates", cands)
        object.__setattr__(self, "deltas", tuple(float(d) for d in self.deltas))

    @property
    def n_candidates(self):
        return len(self.candidates)

    @property
    def n_constraints(self):
        return len(self.deltas)


# -- algorithm -------------------------------------------------------------------


class UndefinedEstimateError(ValueError):
    pass


def _check_episodes(E: Episodes, problem: RLProblem, need_constraints=True):
    if len(E) < 2:
        raise ValueError("need at least two episodes")
    if need_constraints and E.R.shape[1] < problem.n_constraints:
        raise ValueError("episodes carry fewer constraint returns than the problem has deltas")
    pb = np.asarray(problem.behavior.pdf(E.P), dtype=float)
    if np.any(pb <= 0):
        raise ValueError("an episode's policy has zero behaviour density")
    return pb


def _weights(mu_i, E, pb, c):
    pi = np.asarray(mu_i.pdf(E.P), dtype=float)
    inside = pi != 0
    return c * pi / pb, inside


def importance_estimate(D, mu_i, mu_b, returns=None) -> float:
    """Support-corrected importance-sampling estimate of ``E[return | mu_i]``.

    Sums ``c * mu_i(P)/mu_b(P) * return`` and divides by the number of
    episodes inside ``supp(mu_i)`` (not by ``m``), where ``c`` is the
    behaviour mass of that support.  ``returns`` selects the return column;
    it defaults to the primary return.
    """
    E = Episodes.coerce(D)
    if returns is None:
        ret = E.r
    elif np.isscalar(returns):
        ret = E.R[:, returns]
    else:
        ret = np.asarray(returns, dtype=float)
    pb = np.asarray(mu_b.pdf(E.P), dtype=float)
    if np.any(pb <= 0):
        raise ValueError("an episode's policy has zero behaviour density")
    w, inside = _weights(mu_i, E, pb, overlap_mass(mu_i, mu_b))
    n_in = int(inside.sum())
    if n_in == 0:
        raise UndefinedEstimateError("no episode falls inside the candidate's support")
    return float((w * ret).sum() / n_in)


def behavior_upper_bounds(D, problem: RLProblem):
    """Per-constraint t upper bounds on the behaviour's expected constraint return."""
    E = Episodes.coerce(D)
    _check_episodes(E, problem)
    level = [d / (problem.n_candidates + 1) for d in problem.deltas]
    return [bounds.t_upper(E.R[:, j], level[j]) for j in range(problem.n_constraints)]


def safe_candidates(D, problem: RLProblem, baselines):
    """Indices (0-based) whose lower bound on every constraint return clears its baseline."""
    E = Episodes.coerce(D)
    pb = _check_episodes(E, problem)
    l = problem.n_candidates
    safe = []
    for i, mu_i in enumerate(problem.candidates):
        w, inside = _weights(mu_i, E, pb, overlap_mass(mu_i, problem.behavior))
        ok = True
        for j, delta in enumerate(problem.deltas):
            rho = (w * E.R[:, j])[inside]
            # A single estimate has no sample deviation, hence no bound.
            if rho.size < 2 or bounds.t_lower(rho, delta / (l + 1)) < baselines[j]:
                ok = False
                break
        if ok:
            safe.append(i)
    return safe


def _best_of(E, problem, pb, indices):
    best_idx, best_perf = None, None
    for idx, i in enumerate(indices):
        mu_i = problem.candidates[i]
        w, inside = _weights(mu_i, E, pb, overlap_mass(mu_i, problem.behavior))
        n_in = int(inside.sum())
        perf = float((w * E.r).sum() / n_in) if n_in else -math.inf
        if idx == 0 or perf > best_perf:
            best_idx, best_perf = i, perf
    return best_idx


def quasi_seldonian_rl(D, problem: RLProblem):
    """Return the 0-based index of the chosen candidate, or ``NoSolutionFound``."""
    E = Episodes.coerce(D)
    baselines = behavior_upper_bounds(E, problem)
    return _select(E, problem, baselines)


def absolute_threshold_constraint(D, problem: RLProblem, thresholds):
    """Same as :func:`quasi_seldonian_rl` but each baseline is a fixed user constant.

    A constraint of the form "expected return at least ``1 - beta``" maps to
    ``thresholds[j] = 1 - beta``.
    """
    E = Episodes.coerce(D)
    if len(thresholds) != problem.n_constraints:
        raise ValueError("need one threshold per constraint")
    return _select(E, problem, [float(v) for v in thresholds])


def _select(E, problem, baselines):
    pb = _check_episodes(E, problem)
    safe = safe_candidates(E, problem, baselines)
    if not safe:
        return NoSolutionFound("no candidate passed every constraint test")
    return _best_of(E, problem, pb, safe)


def unconstrained_rl(D, problem: RLProblem):
    """Importance-sampling argmax over all candidates, ignoring constraints."""
    E = Episodes.coerce(D)
    pb = _check_episodes(E, problem, need_constraints=False)
    return _best_of(E, problem, pb, range(problem.n_candidates))


# -- toy glucose environment -----------------------------------------------------


def _neg_part_second_moment(a, s):
    """``E[u^2 ; u < 0]`` for ``u ~ N(a, s^2)``; ``s = 0`` is the point mass at ``a``."""
    a = np.asarray(a, dtype=float)
    if s == 0:
        return np.where(a < 0, a * a, 0.0)
    z = a / s
    phi = np.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)
    return (a * a + s * s) * ndtr(-z) - a * s * phi


@dataclass(frozen=True)
class ToyGlucoseEnv:
    """Stand-in for a metabolic simulator, with closed-form expected returns.

    A policy is ``p = (p1, p2)`` in the unit square (``p1`` plays the role of
    the carbohydrate ratio, ``p2`` the correction factor).  One episode is a
    day with ``n_readings`` blood-glucose readings::

        bg_k / 18.018018 = base + slope*p1 + cross*(p2 - 0.5) + noise*eps_k

    with ``eps_k`` iid standard normal.  Small ``p1`` means low glucose and
    hypoglycaemia; large ``p1`` means hyperglycaemia.  The episode's returns
    are the sums of :func:`reward_r` and :func:`reward_r1` over the readings.
    The mean reading crosses 6 mmol/L (the hypoglycaemia threshold) at
    ``p1 = (6 - base - cross*(p2 - 0.5)) / slope``.
    """

    base: float = 5.5
    slope: float = 4.0
    cross: float = 0.4
    noise: float = 1.0
    n_readings: int = 3
    admissible: BoxDistribution = field(default_factory=lambda: BoxDistribution((0.0, 0.0), (1.0, 1.0)))

    def mean_mmol(self, p):
        p = np.asarray(p, dtype=float)
        return self.base + self.slope * p[..., 0] + self.cross * (p[..., 1] - 0.5)

    @property
    def hypo_threshold_p1(self):
        return (6.0 - self.base) / self.slope

    def episode(self, p, rng) -> EpisodeRecord:
        p = np.asarray(p, dtype=float)
        if not self.admissible.contains(p):
            raise ValueError(f"policy {p.tolist()} is outside the admissible box")
        bg = MGDL_PER_MMOLL * (self.mean_mmol(p) + self.noise * box_muller(rng, self.n_readings))
        return EpisodeRecord(tuple(p.tolist()), float(np.sum(reward_r(bg))), (float(np.sum(reward_r1(bg))),))

    def episodes(self, P, rng) -> Episodes:
        """Vectorised batch; same distribution as calling :meth:`episode` per row."""
        P = np.atleast_2d(np.asarray(P, dtype=float))
        if not np.all(self.admissible.contains(P)):
            raise ValueError("a policy is outside the admissible box")
        mu = self.mean_mmol(P)[:, None]
        eps = box_muller(rng, P.shape[0] * self.n_readings).reshape(-1, self.n_readings)
        bg = MGDL_PER_MMOLL * (mu + self.noise * eps)
        return Episodes(P, reward_r(bg).sum(axis=1), reward_r1(bg).sum(axis=1)[:, None])

    def expected_returns(self, p):
        """Closed-form ``(E[r | p], E[r1 | p])`` for one episode."""
        a = self.mean_mmol(p) - 6.0
        s = self.noise
        neg = _neg_part_second_moment(a, s)
        total = a * a + s * s
        er = -(neg / 5.0 + (total - neg) / 10.0) * self.n_readings
        er1 = -(neg / 5.0) * self.n_readings
        return er, er1

    def expected_returns_under(self, mu: BoxDistribution, n_nodes=48):
        """``(E[r], E[r1])`` when policies are drawn from a uniform box (Gauss-Legendre)."""
        x, w = np.polynomial.legendre.leggauss(n_nodes)
        lo, hi = np.asarray(mu.lower), np.asarray(mu.upper)
        g1 = lo[0] + (hi[0] - lo[0]) * (x + 1) / 2
        g2 = lo[1] + (hi[1] - lo[1]) * (x + 1) / 2
        P = np.stack(np.meshgrid(g1, g2, indexing="ij"), axis=-1)
        W = np.outer(w, w) / 4.0
        er, er1 = self.expected_returns(P)
        return float((W * er).sum()), float((W * er1).sum())


def quarter_tiling(behavior: BoxDistribution):
    """27 sub-boxes, each covering 1/4 of the behaviour box.

    Three aspect ratios (width, height fractions) ``(1/2, 1/2)``,
    ``(1/3, 3/4)`` and ``(3/4, 1/3)``, each placed on a 3x3 grid of lower
    corners spanning the free room in each dimension.
    """
    lo = np.asarray(behavior.lower)
    span = np.asarray(behavior.upper) - lo
    boxes = []
    for fw, fh in ((0.5, 0.5), (1 / 3, 0.75), (0.75, 1 / 3)):
        size = span * (fw, fh)
        for ox in (0.0, 0.5, 1.0):
            for oy in (0.0, 0.5, 1.0):
                corner = lo + (span - size) * (ox, oy)
                boxes.append(BoxDistribution(tuple(corner), tuple(corner + size)))
    return boxes


def default_problem(delta=0.05, env=None) -> RLProblem:
    env = ToyGlucoseEnv() if env is None else env
    return RLProblem(env.admissible, tuple(quarter_tiling(env.admissible)), (delta,), env)


def sample_episodes(problem: RLProblem, m, rng) -> Episodes:
    P = problem.behavior.sample(rng, m)
    return problem.environment.episodes(P, rng)
