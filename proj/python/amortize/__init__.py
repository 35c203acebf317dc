"""Amortized Bayesian inference for Levy-flight response-time models."""

from ._core import (
    AmortizeError,
    Comparison,
    ConfigError,
    CorruptionError,
    DataError,
    NumericError,
    Posterior,
    TrainingError,
    bayes_factors,
    read_rt_csv,
    run_cli,
    sample_alpha_stable,
    simulate_lfm,
)

__all__ = [
    "AmortizeError",
    "Comparison",
    "ConfigError",
    "CorruptionError",
    "DataError",
    "NumericError",
    "Posterior",
    "TrainingError",
    "bayes_factors",
    "read_rt_csv",
    "run_cli",
    "sample_alpha_stable",
    "simulate_lfm",
]
