"""Robust small-area estimation: the classical area-level model and a
two-component normal-mixture extension fit by Gibbs sampling."""

from .backends import available_backends, default_backend, get_kernels
from .classic import FHFit, eb_predict, fit_fh, ols_fit, prasad_rao_a, reml_a
from .core import (fh_shrinkage, marginal_loglik, mixture_conditional_mean,
                   mixture_weight, validate_prior)
from .errors import (ConfigError, DataError, EstimationError, FhmixError,
                     PriorProprietyError, SamplerError)
from .gibbs import (STUDY_PROFILE, ChainConfig, ChainOutput, log_posterior,
                    run_fh_chain, run_mixture_chain)
from .simstudy import (DeviationReport, ScenarioSpec, ShrinkageRow, StudyRow,
                       assign_d, contaminate, deviation_metrics, gen_effects,
                       make_acs_like, make_covariates, run_shrinkage_study,
                       run_study, t_scale_factor)
from .summaries import (AreaSummary, ParamDiagnostic, ParamSummary,
                        diagnostics, ess, gelman_rubin, outlier_probs,
                        shrinkage_summary, summarize_areas, summarize_params)
from .truncdist import sample_truncated_invgamma
from .types import (AreaObservation, Dataset, FHParams, LatentState,
                    MixtureParams, PriorCheck, PriorConfig)

__version__ = "0.1.0"

__all__ = [
    "AreaObservation", "AreaSummary", "ChainConfig", "ChainOutput",
    "ConfigError", "DataError", "Dataset", "DeviationReport",
    "EstimationError", "FHFit", "FHParams", "FhmixError", "LatentState",
    "MixtureParams", "ParamDiagnostic", "ParamSummary", "PriorCheck",
    "PriorConfig", "PriorProprietyError", "SamplerError", "ScenarioSpec",
    "ShrinkageRow", "StudyRow", "STUDY_PROFILE",
    "assign_d", "available_backends", "contaminate", "default_backend",
    "deviation_metrics", "diagnostics", "eb_predict", "ess", "fh_shrinkage",
    "fit_fh", "gelman_rubin", "gen_effects", "get_kernels", "log_posterior",
    "make_acs_like", "make_covariates", "marginal_loglik",
    "mixture_conditional_mean", "mixture_weight", "ols_fit", "outlier_probs",
    "prasad_rao_a", "reml_a", "run_fh_chain", "run_mixture_chain",
    "run_shrinkage_study", "run_study", "sample_truncated_invgamma",
    "shrinkage_summary", "summarize_areas", "summarize_params",
    "t_scale_factor", "validate_prior",
]
