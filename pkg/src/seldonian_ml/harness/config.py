"""Experiment configuration: a JSON file plus command-line overrides."""
from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path

KINDS = ("regression-sweep", "lambda-sweep", "rl-sweep", "oracle-check")
ALGOS = ("ls", "sclr", "ndlr", "qndlr", "qndlr-lambda", "alg11")
RL_ALGOS = ("qsrl", "unconstrained")
DEFAULT_ALGOS = {"regression-sweep": ("qndlr",), "lambda-sweep": ("sclr",), "rl-sweep": RL_ALGOS}

# Bound on the range of prediction errors when x and y lie in [-3, 3].
DEFAULT_NDLR_B = 12.0

# Desk-scale sweep grid; the 5e5 point is only meant for NDLR.
DEFAULT_M_GRID = (100, 316, 1000, 3162, 10_000, 100_000)
DEFAULT_TRIALS = {"regression-sweep": 500, "lambda-sweep": 200, "rl-sweep": 200, "oracle-check": 1}


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    kind: str = "regression-sweep"
    algos: tuple | None = None
    m: tuple = DEFAULT_M_GRID
    trials: int = 500
    delta: float = 0.05
    eps: float = 0.1
    lam: tuple = (4.9,)
    b: float | None = None
    seed: int = 0
    out: str | None = None
    threads: int = 1
    timing: bool = False
    balanced: bool = True
    split_fraction: float = 0.2
    # alg11 only: which |mean| <= eps constraints to impose
    constraints: tuple = ("error-diff",)

    def __post_init__(self):
        if self.algos is None:
            self.algos = DEFAULT_ALGOS.get(self.kind, ())
        self.algos = _as_tuple(self.algos, str)
        self.m = _as_tuple(self.m, int)
        self.lam = _as_tuple(self.lam, float)
        self.constraints = _as_tuple(self.constraints, str)
        self.validate()

    def validate(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}; expected one of {KINDS}")
        allowed = RL_ALGOS if self.kind == "rl-sweep" else ALGOS
        bad = [a for a in self.algos if a not in allowed]
        if bad:
            raise ConfigError(f"unknown algorithm(s) {bad} for {self.kind}; expected from {allowed}")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not self.m or any(v < 10 for v in self.m):
            raise ConfigError("every m must be >= 10")
        if not 0.0 < self.delta < 1.0:
            raise ConfigError("delta must lie in (0, 1)")
        if self.eps < 0:
            raise ConfigError("eps must be non-negative")
        if any(v < 0 for v in self.lam):
            raise ConfigError("lambda must be non-negative")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if not 0.0 < self.split_fraction < 1.0:
            raise ConfigError("split_fraction must lie in (0, 1)")

    @classmethod
    def from_dict(cls, d):
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_json(cls, path):
        try:
            d = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
        if not isinstance(d, dict):
            raise ConfigError(f"{path}: top level must be an object")
        return cls.from_dict(d)

    def replace(self, **overrides):
        overrides = {k: v for k, v in overrides.items() if v is not None}
        return dataclasses.replace(self, **overrides)

    def to_dict(self):
        return dataclasses.asdict(self)


def _as_tuple(v, typ):
    if isinstance(v, (str, int, float)):
        v = [v]
    try:
        return tuple(typ(x) for x in v)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"cannot read {v!r} as a list of {typ.__name__}") from exc
