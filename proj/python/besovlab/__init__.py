"""Dyadic Besov regularity statistics for simulated stochastic processes."""

from ._besovlab import (  # noqa: F401
    BesovlabNumericalError,
    BesovlabValidationError,
    __version__,
    berman_lnd_ratio,
    classify,
    cov_bifbm,
    dyadic_profile,
    estimate_exponent,
    gaussian_charfn,
    grr_check,
    localtime_profile,
    modulus_lp,
    run_experiment_json,
    sample_path,
    variance_bounds,
)

__all__ = [
    "BesovlabNumericalError",
    "BesovlabValidationError",
    "__version__",
    "berman_lnd_ratio",
    "classify",
    "cov_bifbm",
    "dyadic_profile",
    "estimate_exponent",
    "gaussian_charfn",
    "grr_check",
    "localtime_profile",
    "modulus_lp",
    "run_experiment_json",
    "sample_path",
    "variance_bounds",
]
