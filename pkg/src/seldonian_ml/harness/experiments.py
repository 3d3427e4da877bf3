"""Multi-trial experiment runner.

Every trial draws a fresh dataset from its own stream
``SeedSequence(seed, spawn_key=(m, trial))``, so results do not depend on
the order trials run in or on the number of worker threads.  All algorithms
in one trial see the same dataset.  Rows are sorted before they are written,
which makes the CSV output byte-identical for a fixed seed.  ``wall_ms`` is
left blank unless ``timing`` is set, because timings are never reproducible.
"""
from __future__ import annotations

import os
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .. import baselines, regression, rl
from .._random import make_rng
from ..data import is_nsf
from ..optimize import SearchConfig
from ..synthgen import gen_illustrative, true_disc_stat, true_mse
from . import io
from .config import DEFAULT_NDLR_B, ExperimentConfig


@dataclass
class ExperimentResult:
    header: list
    rows: list
    summary_header: list
    summary: list
    paths: dict


# -- algorithm table -------------------------------------------------------------


def _alg11_constraints(cfg: ExperimentConfig):
    out = []
    for name in cfg.constraints:
        if name == "error-diff":
            out += regression.error_diff_constraints(cfg.eps, cfg.delta)
        elif name == "prediction-diff":
            out += regression.prediction_diff_constraints(cfg.eps, cfg.delta)
        else:
            raise ValueError(f"unknown constraint {name!r}")
    return out


def regression_algorithms(cfg: ExperimentConfig):
    """``[(label, fit(D, search_cfg) -> outcome), ...]`` in configured order."""
    table = []
    lams = cfg.lam if cfg.kind == "lambda-sweep" else cfg.lam[:1]
    for algo in cfg.algos:
        if algo == "ls":
            table.append(("ls", lambda D, s: baselines.least_squares(D)))
        elif algo == "ndlr":
            b = DEFAULT_NDLR_B if cfg.b is None else cfg.b
            table.append(("ndlr", lambda D, s, b=b: regression.ndlr(D, cfg.delta, cfg.eps, b, s)))
        elif algo == "qndlr":
            table.append(("qndlr", lambda D, s: regression.qndlr(D, cfg.delta, cfg.eps, 0.0, cfg.b, s)))
        elif algo == "alg11":
            cons = _alg11_constraints(cfg)
            table.append(("alg11", lambda D, s: regression.quasi_seldonian_general(D, cons, cfg=s)))
        elif algo == "sclr":
            for lam in lams:
                table.append((f"sclr:{lam:g}", lambda D, s, lam=lam: baselines.sclr(D, lam, s)))
        elif algo == "qndlr-lambda":
            for lam in lams:
                table.append((
                    f"qndlr-lambda:{lam:g}",
                    lambda D, s, lam=lam: regression.qndlr(D, cfg.delta, cfg.eps, lam, cfg.b, s),
                ))
    return table


# -- trials ----------------------------------------------------------------------


def _timed(fn, timing):
    t0 = time.perf_counter()
    out = fn()
    return out, (round((time.perf_counter() - t0) * 1e3, 3) if timing else None)


def regression_trial(cfg: ExperimentConfig, table, m, trial):
    rng = make_rng(cfg.seed, key=(m, trial))
    D = gen_illustrative(m, balanced=cfg.balanced, rng=rng)
    search = SearchConfig(split_fraction=cfg.split_fraction, seed=trial)
    rows = []
    for label, fit in table:
        out, ms = _timed(lambda: fit(D, search), cfg.timing)
        if is_nsf(out):
            rows.append([trial, m, label, "nsf", None, None, None, None, ms])
        else:
            th = np.asarray(out, dtype=float)
            rows.append([trial, m, label, "solution", th[0], th[1], true_disc_stat(th), true_mse(th), ms])
    return rows


class RLTruth:
    """Closed-form expected returns of the behaviour and every candidate."""

    def __init__(self, problem):
        env = problem.environment
        self.behavior = env.expected_returns_under(problem.behavior)
        self.candidates = [env.expected_returns_under(mu) for mu in problem.candidates]


def rl_trial(cfg: ExperimentConfig, problem, truth: RLTruth, m, trial):
    rng = make_rng(cfg.seed, key=(m, trial))
    E = rl.sample_episodes(problem, m, rng)
    algos = {"qsrl": rl.quasi_seldonian_rl, "unconstrained": rl.unconstrained_rl}
    rows = []
    for label in cfg.algos:
        out, ms = _timed(lambda: algos[label](E, problem), cfg.timing)
        if is_nsf(out):
            rows.append([trial, m, label, "nsf", None, None, None, 0, ms])
        else:
            er, er1 = truth.candidates[out]
            rows.append([trial, m, label, "solution", out, er, er1, int(er1 < truth.behavior[1]), ms])
    return rows


# -- aggregation -----------------------------------------------------------------

REGRESSION_SUMMARY = [
    "algo", "m", "trials", "solutions", "solution_rate", "violations", "violation_rate",
    "violation_per_trial", "mean_true_mse", "mean_true_d", "mean_true_abs_d",
]
RL_SUMMARY = [
    "algo", "m", "trials", "solutions", "solution_rate", "violations", "violation_rate",
    "violation_per_trial", "mean_true_r", "mean_true_r1",
]


def _mean(xs):
    return float(np.mean(xs)) if xs else None


def summarize(records, eps=None):
    """Per-(algo, m) aggregates computed only from trial rows (dicts as read back from CSV).

    Regression rows count a violation when ``|true_d| > eps``; RL rows carry
    their own ``violation`` flag.  ``violation_rate`` is over returned
    solutions, ``violation_per_trial`` over all trials.
    """
    groups = {}
    for r in records:
        groups.setdefault((r["algo"], int(r["m"])), []).append(r)
    is_rl = bool(records) and "violation" in records[0]
    out = []
    for (algo, m), rows in groups.items():
        sol = [r for r in rows if r["outcome"] == "solution"]
        if is_rl:
            viol = sum(int(r["violation"]) for r in sol)
        else:
            viol = sum(abs(r["true_d"]) > eps for r in sol)
        row = [
            algo, m, len(rows), len(sol), len(sol) / len(rows), viol,
            viol / len(sol) if sol else None, viol / len(rows),
        ]
        if is_rl:
            row += [_mean([r["true_r"] for r in sol]), _mean([r["true_r1"] for r in sol])]
        else:
            row += [
                _mean([r["true_mse"] for r in sol]),
                _mean([r["true_d"] for r in sol]),
                _mean([abs(r["true_d"]) for r in sol]),
            ]
        out.append(row)
    return out


def _as_records(header, rows):
    return [dict(zip(header, r)) for r in rows]


# -- driver ----------------------------------------------------------------------


def check_writable(out):
    """Create ``out`` (a directory) and prove it is writable, before any work is done."""
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    fd, probe = tempfile.mkstemp(dir=path, prefix=".probe")
    os.close(fd)
    os.unlink(probe)
    return path


def _run_jobs(fn, jobs, threads):
    if threads == 1:
        return [fn(*j) for j in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda j: fn(*j), jobs))


def run_experiment(cfg: ExperimentConfig, progress=None) -> ExperimentResult:
    """Run every (m, trial) job and write ``trials.csv`` and ``summary.csv`` under ``cfg.out``."""
    if cfg.kind == "oracle-check":
        raise ValueError("use oracle.oracle_check for oracle-check configs")
    outdir = check_writable(cfg.out) if cfg.out else None
    jobs = [(m, trial) for m in cfg.m for trial in range(cfg.trials)]

    if cfg.kind == "rl-sweep":
        problem = rl.default_problem(cfg.delta)
        truth = RLTruth(problem)
        header = io.RL_COLUMNS
        fn = lambda m, trial: rl_trial(cfg, problem, truth, m, trial)  # noqa: E731
        order = {a: i for i, a in enumerate(cfg.algos)}
        summary_header = RL_SUMMARY
    else:
        table = regression_algorithms(cfg)
        header = io.regression_header(2)
        fn = lambda m, trial: regression_trial(cfg, table, m, trial)  # noqa: E731
        order = {label: i for i, (label, _) in enumerate(table)}
        summary_header = REGRESSION_SUMMARY

    if progress is not None:
        inner = fn
        fn = lambda m, trial: progress(m, trial) or inner(m, trial)  # noqa: E731

    rows = [r for batch in _run_jobs(fn, jobs, cfg.threads) for r in batch]
    rows.sort(key=lambda r: (order[r[2]], r[1], r[0]))
    summary = summarize(_as_records(header, rows), cfg.eps)

    paths = {}
    if outdir is not None:
        paths["trials"] = outdir / "trials.csv"
        paths["summary"] = outdir / "summary.csv"
        io.write_rows(paths["trials"], header, rows)
        io.write_rows(paths["summary"], summary_header, summary)
    return ExperimentResult(header, rows, summary_header, summary, paths)


def summary_lookup(result: ExperimentResult, algo, m):
    for row in result.summary:
        if row[0] == algo and row[1] == m:
            return dict(zip(result.summary_header, row))
    raise KeyError((algo, m))

