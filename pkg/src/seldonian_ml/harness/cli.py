"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 data or parse error, 3 oracle-check failure.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .. import baselines, regression, rl
from .._random import make_rng
from ..data import is_nsf
from ..optimize import SearchConfig
from ..synthgen import gen_illustrative
from . import io
from .config import ALGOS, DEFAULT_NDLR_B, DEFAULT_TRIALS, ConfigError, ExperimentConfig
from .experiments import run_experiment
from .oracle import oracle_check

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_ORACLE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(s):
    try:
        return tuple(int(float(v)) for v in s.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N[,N...], got {s!r}") from None


def _float_list(s):
    try:
        return tuple(float(v) for v in s.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected X[,X...], got {s!r}") from None


def _algo_list(s):
    algos = tuple(a.strip() for a in s.split(","))
    bad = [a for a in algos if a not in ALGOS]
    if bad:
        raise argparse.ArgumentTypeError(f"invalid choice {bad}; choose from {'|'.join(ALGOS)}")
    return algos


def _shared():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", metavar="PATH", help="JSON experiment config; flags override it")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", metavar="PATH")
    p.add_argument("--trials", type=int)
    p.add_argument("--m", type=_int_list, metavar="N[,N...]")
    p.add_argument("--delta", type=float)
    p.add_argument("--eps", type=float)
    p.add_argument("--lambda", dest="lam", type=_float_list, metavar="X[,X...]")
    p.add_argument("--algo", type=_algo_list, metavar="{" + "|".join(ALGOS) + "}")
    p.add_argument("--threads", type=int)
    return p


def build_parser():
    shared = _shared()
    parser = _Parser(prog="seldonian", description="Seldonian regression and RL experiments.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("synth", parents=[shared], help="write a synthetic dataset or episode log")
    p.add_argument("--kind", choices=("regression", "rl"), default="regression")

    p = sub.add_parser("fit", parents=[shared], help="fit one algorithm to a dataset CSV")
    p.add_argument("--data", metavar="PATH", required=True)
    p.add_argument("--b", type=float)
    p.add_argument(
        "--constraints", default="error-diff", help="alg11 only: comma list of error-diff,prediction-diff"
    )

    p = sub.add_parser("experiment", parents=[shared], help="multi-trial regression sweep")
    p.add_argument("--kind", choices=("regression-sweep", "lambda-sweep"))
    p.add_argument("--b", type=float)
    p.add_argument("--timing", action="store_true", help="record wall_ms (output no longer reproducible)")

    p = sub.add_parser("rl-experiment", parents=[shared], help="multi-trial RL sweep on the toy environment")
    p.add_argument("--timing", action="store_true")

    sub.add_parser("oracle-check", parents=[shared], help="run the analytic cross-checks")
    return parser


def _overrides(args):
    return {
        "seed": args.seed, "out": args.out, "trials": args.trials, "m": args.m,
        "delta": args.delta, "eps": args.eps, "lam": args.lam, "algos": args.algo,
        "threads": args.threads, "b": getattr(args, "b", None),
        "timing": getattr(args, "timing", None) or None,
    }


def _load_config(args, kind):
    base = ExperimentConfig.from_json(args.config) if args.config else None
    over = _overrides(args)
    if base is None:
        kw = {k: v for k, v in over.items() if v is not None}
        kw["kind"] = kind or "regression-sweep"
        kw.setdefault("trials", DEFAULT_TRIALS[kw["kind"]])
        return ExperimentConfig(**kw)
    if kind is not None and kind != base.kind:
        base = base.replace(kind=kind)
    return base.replace(**over)


def _print_summary(result, out):
    for row in result.summary:
        print("  ".join(f"{h}={io.fmt(v)}" for h, v in zip(result.summary_header, row)), file=out)
    if result.paths:
        print(f"wrote {', '.join(str(p) for p in result.paths.values())}", file=out)


def cmd_synth(args):
    m = (args.m or (1000,))[0]
    seed = 0 if args.seed is None else args.seed
    if m < 1:
        raise UsageError("--m must be positive")
    if args.kind == "rl":
        problem = rl.default_problem(args.delta or 0.05)
        E = rl.sample_episodes(problem, m, make_rng(seed))
        data, writer = E, io.write_episodes
    else:
        data, writer = gen_illustrative(m, seed=seed), io.write_dataset
    writer(args.out or sys.stdout, data)
    return EXIT_OK


def cmd_fit(args):
    D = io.read_dataset(args.data)
    algo = (args.algo or ("qndlr",))[0]
    delta = 0.05 if args.delta is None else args.delta
    eps = 0.1 if args.eps is None else args.eps
    lam = (args.lam or (0.0,))[0]
    cfg = SearchConfig(seed=args.seed or 0)
    if algo == "ls":
        out = baselines.least_squares(D)
    elif algo == "sclr":
        out = baselines.sclr(D, lam, cfg)
    elif algo == "ndlr":
        out = regression.ndlr(D, delta, eps, DEFAULT_NDLR_B if args.b is None else args.b, cfg)
    elif algo in ("qndlr", "qndlr-lambda"):
        out = regression.qndlr(D, delta, eps, lam if algo == "qndlr-lambda" else 0.0, args.b, cfg)
    else:
        cons = []
        for name in args.constraints.split(","):
            if name == "error-diff":
                cons += regression.error_diff_constraints(eps, delta)
            elif name == "prediction-diff":
                cons += regression.prediction_diff_constraints(eps, delta)
            else:
                raise UsageError(f"unknown constraint {name!r}")
        out = regression.quasi_seldonian_general(D, cons, cfg=cfg)
    if is_nsf(out):
        result = {"algo": algo, "outcome": "nsf", "reason": out.reason}
    else:
        names = list(D.feature_names) + ["intercept"]
        result = {"algo": algo, "outcome": "solution", "theta": dict(zip(names, np.asarray(out).tolist()))}
    text = json.dumps(result, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    print(text)
    return EXIT_OK


def cmd_experiment(args, kind):
    cfg = _load_config(args, kind)
    if cfg.kind == "rl-sweep" and args.command != "rl-experiment":
        raise UsageError("use the rl-experiment subcommand for rl-sweep configs")
    if cfg.kind == "oracle-check":
        return cmd_oracle(args)
    if cfg.out is None:
        cfg = cfg.replace(out="results")
    result = run_experiment(cfg)
    _print_summary(result, sys.stdout)
    return EXIT_OK


def cmd_oracle(args):
    checks = oracle_check(seed=args.seed or 0)
    for c in checks:
        print(c.line())
    if args.out:
        io.write_rows(args.out, ["check", "passed", "measured", "target"],
                      [[c.name, c.passed, c.measured, c.target] for c in checks])
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return EXIT_ORACLE if failed else EXIT_OK


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "synth":
            return cmd_synth(args)
        if args.command == "fit":
            return cmd_fit(args)
        if args.command == "experiment":
            return cmd_experiment(args, args.kind)
        if args.command == "rl-experiment":
            return cmd_experiment(args, "rl-sweep")
        return cmd_oracle(args)
    except (UsageError, ConfigError) as exc:
        print(f"seldonian: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (io.CSVParseError, ValueError, OSError) as exc:
        print(f"seldonian: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
