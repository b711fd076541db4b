"""Configuration, run orchestration, verification suites and the CLI."""
from .config import ConfigError, RunConfig, default_config, load_config, parse_config, serialize
from .runner import RunFailure, diagnostics, initial_state, run_simulate
from .suites import SUITES, SuiteResult, run_checks, run_suite

__all__ = ["ConfigError", "RunConfig", "default_config", "load_config", "parse_config", "serialize",
           "RunFailure", "diagnostics", "initial_state", "run_simulate",
           "SUITES", "SuiteResult", "run_checks", "run_suite"]
