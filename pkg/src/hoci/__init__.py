"""Higher-order common information: closed-form Gaussian bounds, an exact
discrete oracle, pluggable MI estimators, and a noise-injection estimation
pipeline with CSV/JSON IO."""

__version__ = "0.1.0"

from .channels import ChannelMatrix
from .discrete import (
    DiscreteEnsemble,
    LevelVerification,
    MaskSet,
    Theorem5Verification,
    all_level_masks,
    build_ensemble,
    build_t_level,
    canonical_level_size,
    enumerate_mask_mi,
    exact_entropy,
    mask_mi,
    sample_channels,
    verify_theorem5,
)
from .errors import (
    CapacityError,
    ConfigurationError,
    ConvergenceError,
    DegenerateInputError,
    HociError,
    IngestionError,
    NoCommonInformationError,
    ParameterDomainError,
    PipelineError,
)
from .estimators import (
    EstimatorConfig,
    MiEstimate,
    bidirectional_te_mi,
    mi_estimate,
    mi_estimate_full,
    mi_estimate_joint,
)
from .gaussian import (
    AsymptoticLimits,
    DeltaQuantities,
    GaussianEnsembleSpec,
    MmseCoefficients,
    asymptotic_limits,
    cond_mi_xi_xj_given_xk,
    delta_quantities,
    interaction_information,
    mi_x_xi,
    mi_xi_xj,
    mmse_coefficients,
    r3_lower,
    r4_lower,
    sample_ensemble,
    wyner_ci_standard_normal,
)
from .pipeline import (
    CommonInfoReport,
    LagCorrelation,
    LevelEstimate,
    approx_rtilde,
    average_rbar,
    chain_slack_bits,
    derive_sci_seed,
    estimate_r2,
    estimate_r3_lower,
    estimate_r4_lower,
    lag_max_correlation,
    lag_max_correlation_samples,
    region_min,
    run_estimate,
)
from .sci import (
    BisectionConfig,
    SciDescriptor,
    SciVerification,
    analytic_sci_variance,
    analytic_sci_variance_stage2,
    build_sci,
    build_sci_higher,
    verify_sci,
)

__all__ = [
    "AsymptoticLimits",
    "BisectionConfig",
    "CapacityError",
    "ChannelMatrix",
    "CommonInfoReport",
    "ConfigurationError",
    "ConvergenceError",
    "DegenerateInputError",
    "DeltaQuantities",
    "DiscreteEnsemble",
    "EstimatorConfig",
    "GaussianEnsembleSpec",
    "HociError",
    "IngestionError",
    "LagCorrelation",
    "LevelEstimate",
    "LevelVerification",
    "MaskSet",
    "MiEstimate",
    "MmseCoefficients",
    "NoCommonInformationError",
    "ParameterDomainError",
    "PipelineError",
    "SciDescriptor",
    "SciVerification",
    "Theorem5Verification",
    "all_level_masks",
    "analytic_sci_variance",
    "analytic_sci_variance_stage2",
    "approx_rtilde",
    "asymptotic_limits",
    "average_rbar",
    "bidirectional_te_mi",
    "build_ensemble",
    "build_sci",
    "build_sci_higher",
    "build_t_level",
    "canonical_level_size",
    "chain_slack_bits",
    "cond_mi_xi_xj_given_xk",
    "delta_quantities",
    "derive_sci_seed",
    "enumerate_mask_mi",
    "estimate_r2",
    "estimate_r3_lower",
    "estimate_r4_lower",
    "exact_entropy",
    "interaction_information",
    "lag_max_correlation",
    "lag_max_correlation_samples",
    "mask_mi",
    "mi_estimate",
    "mi_estimate_full",
    "mi_estimate_joint",
    "mi_x_xi",
    "mi_xi_xj",
    "mmse_coefficients",
    "r3_lower",
    "r4_lower",
    "region_min",
    "run_estimate",
    "sample_channels",
    "sample_ensemble",
    "verify_sci",
    "verify_theorem5",
    "wyner_ci_standard_normal",
]
