"""Exact Gaussian-process regression with derivative posteriors.

The heavy lifting lives in the compiled extension; this package re-exports
its surface: kernels, series functions, posterior queries, empirical Bayes
selection, effective-dimension diagnostics and the simulation studies.
"""

from gpderiv._core import (  # noqa: F401
    CapabilityError,
    ContractError,
    Dataset,
    DomainError,
    EffectiveDims,
    EigenSequence,
    FittedGP,
    KernelSpec,
    NumericalError,
    RateSchedule,
    Rng,
    ScoreEntry,
    SelectionError,
    SelectionResult,
    SeriesFunction,
    StudyCell,
    UnsupportedKernelError,
    bound_constant,
    contraction_probe,
    credible_band,
    cross_gram,
    default_lambda_grid,
    effective_dims,
    equivalent_kernel,
    eval,
    eval_deriv,
    f_lambda,
    fit,
    gram,
    krr_check,
    log_marginal_likelihood,
    loocv_select,
    mmle_sigma2,
    rate_schedule,
    rate_study,
    replicate_study,
    rmse,
    sample_paths,
    select_lambda,
    series_eval,
    series_eval_grid,
    simulate_dataset,
    space_norm,
    true_target,
    variance_bias_discrepancy,
)

__version__ = "0.1.0"
