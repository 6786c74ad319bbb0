"""Verification suite: configuration, the check registry, reports and the CLI."""
from ..fitting import ExponentFit, fit_exponent
from ..solver import sigma
from .checks import REGISTRY, CheckResult
from .config import ConfigError, ExperimentConfig, load_config
from .report import VerificationReport, run_suite

__all__ = [
    "ExponentFit",
    "fit_exponent",
    "sigma",
    "REGISTRY",
    "CheckResult",
    "ConfigError",
    "ExperimentConfig",
    "load_config",
    "VerificationReport",
    "run_suite",
]
