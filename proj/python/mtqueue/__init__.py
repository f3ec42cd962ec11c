"""Bounds, truncation and transient analysis for M_t|M_t|S queues with
state-dependent catastrophes."""

from ._core import (
    ConfigError,
    Envelope,
    NumericalError,
    PreconditionError,
    QueueModel,
    Weights,
    alpha_inf,
    alpha_integral,
    alpha_k,
    check_weak_ergodicity,
    default_step,
    example_envelope,
    fit_envelope,
    integrate_forward,
    limiting_mean_bound,
    limiting_regime,
    lognorm_oracle,
    min_truncation_level,
    regime_bounds,
    simulate,
    truncation_bounds,
)

__all__ = [
    "ConfigError",
    "Envelope",
    "NumericalError",
    "PreconditionError",
    "QueueModel",
    "Weights",
    "alpha_inf",
    "alpha_integral",
    "alpha_k",
    "check_weak_ergodicity",
    "default_step",
    "example_envelope",
    "fit_envelope",
    "integrate_forward",
    "limiting_mean_bound",
    "limiting_regime",
    "lognorm_oracle",
    "min_truncation_level",
    "regime_bounds",
    "simulate",
    "truncation_bounds",
]
