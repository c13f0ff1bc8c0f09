"""Treatment-effect estimators for two-arm pre-post trials."""

from .ancova import (
    AncovaInteractionEstimator,
    AncovaMainEstimator,
    ancova_interaction,
    ancova_main,
)
from .anova import AnovaChangeEstimator, AnovaPostEstimator, anova_change, anova_post
from .base import AnalysisResult, BaseEstimator, GlsCovEstimate, MethodId
from .factory import (
    HETEROGENEOUS_METHODS,
    HOMOGENEOUS_METHODS,
    EstimatorFactory,
    resolve_methods,
)
from .repeated import (
    CrmGroupedEstimator,
    CrmPooledEstimator,
    RepeatedMeasuresEstimator,
    crm_fit,
    crm_grouped_closed_form,
    crm_pooled_closed_form,
    reml_covariance,
    rm_fit,
)
from .report import ComparisonReport, analyze_all

__all__ = [
    "AnalysisResult",
    "BaseEstimator",
    "GlsCovEstimate",
    "MethodId",
    "EstimatorFactory",
    "HOMOGENEOUS_METHODS",
    "HETEROGENEOUS_METHODS",
    "resolve_methods",
    "AnovaPostEstimator",
    "AnovaChangeEstimator",
    "AncovaMainEstimator",
    "AncovaInteractionEstimator",
    "RepeatedMeasuresEstimator",
    "CrmPooledEstimator",
    "CrmGroupedEstimator",
    "anova_post",
    "anova_change",
    "ancova_main",
    "ancova_interaction",
    "rm_fit",
    "crm_fit",
    "crm_pooled_closed_form",
    "crm_grouped_closed_form",
    "reml_covariance",
    "ComparisonReport",
    "analyze_all",
]
