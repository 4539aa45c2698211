"""Heavy-tail index estimation for SGD on a single ReLU gate."""

from ._tailgate import (
    ConfigError,
    DivergenceError,
    EnsembleError,
    Error,
    NonPositiveEstimateError,
    ZeroNormError,
    alg1_gradient,
    block_sums,
    classification_error,
    hill_alpha,
    hill_inverse_alpha,
    ks_critical_value,
    ks_two_sample_statistic,
    parse_config,
    realizable_ensemble,
    relu,
    run_experiment,
    sample_sas,
    sas_characteristic,
    sgd_gradient,
    stability_ks_statistic,
    train_realizable,
)

__all__ = [name for name in dir() if not name.startswith("_")]
