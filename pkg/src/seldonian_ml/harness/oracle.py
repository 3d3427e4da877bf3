"""Analytic-versus-Monte-Carlo cross-checks, reported as pass/fail with measured values."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import bounds, rl
from .._random import make_rng
from ..baselines import sample_disc_stat
from ..regression import sample_mse
from ..synthgen import bayes_optimal, gen_illustrative, true_disc_stat, true_mse

# Two-sided table values of Student's t, rounded to three decimals:
# (confidence, degrees of freedom) -> quantile.
T_TABLE = {
    (0.95, 1): 6.314, (0.975, 1): 12.706, (0.99, 1): 31.821,
    (0.95, 2): 2.920, (0.95, 5): 2.015, (0.975, 5): 2.571,
    (0.95, 10): 1.812, (0.99, 10): 2.764, (0.975, 20): 2.086,
    (0.95, 30): 1.697, (0.975, 100): 1.984, (0.995, 60): 2.660,
}

# Stream tags keep each check's random numbers independent of the trial streams.
_STREAM = {"hoeffding": 9001, "t": 9002, "mirror": 9003, "env": 9004}


@dataclass
class Check:
    name: str
    passed: bool
    measured: float
    target: str

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name}: measured {self.measured:.6g} (target {self.target})"


def mse_argmin(step=0.01, refine=3):
    """Grid search for the minimiser of the closed-form MSE, refined around the best cell."""
    lo, hi = np.array([-1.0, -1.0]), np.array([2.0, 1.0])
    for _ in range(refine + 1):
        g1 = np.arange(lo[0], hi[0] + step / 2, step)
        g2 = np.arange(lo[1], hi[1] + step / 2, step)
        A, B = np.meshgrid(g1, g2, indexing="ij")
        vals = true_mse(np.stack([A, B]))
        i, j = np.unravel_index(np.argmin(vals), vals.shape)
        best = np.array([g1[i], g2[j]])
        lo, hi = best - 2 * step, best + 2 * step
        step /= 10
    return best


def check_bayes_optimal():
    best = mse_argmin()
    err = float(np.max(np.abs(best - bayes_optimal())))
    return Check("MSE minimiser is (2/3, 0)", err < 1e-3, err, "max abs error < 1e-3")


def check_disc_anchor():
    v = true_disc_stat(np.array([2 / 3, 0.0]))
    return Check("d(2/3, 0) = -2/3", abs(v + 2 / 3) < 1e-12, v, "-0.666667")


def check_t_table():
    err = max(abs(bounds.t_quantile(c, nu) - q) for (c, nu), q in T_TABLE.items())
    return Check("t quantiles vs table", err < 1e-3, err, "max abs error < 1e-3")


def hoeffding_coverage(delta, reps=10_000, n=30, seed=0):
    """Fraction of bounded (Beta(2, 5)) samples whose Hoeffding bound covers the true mean."""
    rng = make_rng(seed, key=(_STREAM["hoeffding"], n))
    Z = rng.beta(2.0, 5.0, size=(reps, n))
    ub = np.array([bounds.hoeffding_upper(z, 1.0, delta) for z in Z])
    return float(np.mean(ub >= 2.0 / 7.0))


def t_coverage(delta, reps=10_000, n=30, seed=0):
    rng = make_rng(seed, key=(_STREAM["t"], n))
    Z = rng.normal(0.3, 2.0, size=(reps, n))
    ub = np.array([bounds.t_upper(z, delta) for z in Z])
    return float(np.mean(ub >= 0.3))


def check_coverage(seed=0):
    out = []
    for delta in (0.05, 0.1):
        cov = hoeffding_coverage(delta, seed=seed)
        out.append(Check(f"Hoeffding coverage, delta={delta}", cov >= 1 - delta, cov, f">= {1 - delta}"))
        cov = t_coverage(delta, seed=seed)
        out.append(Check(
            f"t coverage on normal data, delta={delta}",
            abs(cov - (1 - delta)) <= 0.015, cov, f"{1 - delta} +/- 0.015",
        ))
    return out


# A five-point policy space for checking the importance-sampling estimator exactly.
MIRROR_BEHAVIOR = rl.DiscreteDistribution({0: 0.2, 1: 0.2, 2: 0.2, 3: 0.2, 4: 0.2})
MIRROR_CANDIDATE = rl.DiscreteDistribution({1: 0.5, 2: 0.3, 3: 0.2})


def mirror_mean_return(p):
    return np.asarray(p, dtype=float) ** 2 - 1.0


def mirror_expectation():
    return sum(q * float(mirror_mean_return(p)) for p, q in MIRROR_CANDIDATE.probs.items())


def importance_sampling_mirror(reps=10_000, m=20, seed=0):
    """Mean and standard error of repeated estimates on the discrete mirror problem."""
    rng = make_rng(seed, key=(_STREAM["mirror"], m))
    est = np.empty(reps)
    for k in range(reps):
        P = MIRROR_BEHAVIOR.sample(rng, m)
        ret = mirror_mean_return(P) + rng.normal(size=m)
        E = rl.Episodes(P, ret, np.zeros((m, 0)))
        try:
            est[k] = rl.importance_estimate(E, MIRROR_CANDIDATE, MIRROR_BEHAVIOR)
        except rl.UndefinedEstimateError:
            est[k] = np.nan
    est = est[np.isfinite(est)]
    return float(est.mean()), float(est.std(ddof=1) / np.sqrt(est.size))


def check_importance_sampling(seed=0):
    mean, se = importance_sampling_mirror(seed=seed)
    truth = mirror_expectation()
    z = abs(mean - truth) / se
    return Check("importance sampling unbiased (z-score)", z <= 3.0, z, f"<= 3 (truth {truth:.4g})")


def check_synthetic(seed=0, m=1_000_000):
    D = gen_illustrative(m, seed=seed)
    out = []
    for theta in (np.array([2 / 3, 0.0]), np.array([1.0, 0.5]), np.array([0.2, -0.3])):
        at = theta.round(3).tolist()
        err = abs(sample_disc_stat(theta, D) - true_disc_stat(theta))
        out.append(Check(f"sample d vs closed form at {at}", err <= 0.01, err, "<= 0.01"))
        err = abs(sample_mse(theta, D) - true_mse(theta))
        out.append(Check(f"sample MSE vs closed form at {at}", err <= 0.02, err, "<= 0.02"))
    return out


def check_toy_env(seed=0, n=100_000):
    env = rl.ToyGlucoseEnv()
    out = []
    for p in ((0.05, 0.5), (0.4, 0.2)):
        key = (_STREAM["env"],) + tuple(int(1000 * v) for v in p)
        E = env.episodes(np.tile(p, (n, 1)), make_rng(seed, key=key))
        er, er1 = env.expected_returns(np.asarray(p))
        for name, sample, exact in (("r", E.r, er), ("r1", E.R[:, 0], er1)):
            z = abs(sample.mean() - exact) / (sample.std(ddof=1) / np.sqrt(n))
            out.append(Check(f"toy env E[{name}] at p={p} (z-score)", z <= 3.0, z, "<= 3"))
    return out


def oracle_check(seed=0):
    checks = [check_bayes_optimal(), check_disc_anchor(), check_t_table()]
    checks += check_coverage(seed)
    checks.append(check_importance_sampling(seed))
    checks += check_synthetic(seed)
    checks += check_toy_env(seed)
    return checks
