"""Configuration, CSV I/O, experiment runner, oracle checks and the CLI."""
from .config import ConfigError, ExperimentConfig
from .experiments import ExperimentResult, run_experiment, summarize
from .io import CSVParseError, read_dataset, read_episodes, read_records, write_dataset, write_episodes
from .oracle import Check, oracle_check

__all__ = [
    "Check", "CSVParseError", "ConfigError", "ExperimentConfig", "ExperimentResult",
    "oracle_check", "read_dataset", "read_episodes", "read_records", "run_experiment",
    "summarize", "write_dataset", "write_episodes",
]
