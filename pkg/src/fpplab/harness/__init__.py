"""Experiment configuration, orchestration and output."""

from fpplab.harness.config import ConfigError, ExperimentConfig
from fpplab.harness.runner import ResultRecord, execute, run

__all__ = ["ConfigError", "ExperimentConfig", "ResultRecord", "execute", "run"]
