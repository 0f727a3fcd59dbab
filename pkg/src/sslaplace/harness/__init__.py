"""Experiment harness: configuration, commands, and flat-file output."""

from .commands import RunReport, cmd_calibration_scan, cmd_compare, cmd_convergence, cmd_solve
from .config import ConfigError, ProblemConfig, load_config, parse_config

__all__ = [
    "ConfigError",
    "ProblemConfig",
    "RunReport",
    "cmd_calibration_scan",
    "cmd_compare",
    "cmd_convergence",
    "cmd_solve",
    "load_config",
    "parse_config",
]
