"""Closed-form variance oracle for the treatment-effect estimators."""

from .params import DesignSize, PopulationParams
from .variance import (
    ResidualVariances,
    conditional_variance_ancova,
    crm_grouped_gls_variance,
    crossover_correlation,
    efficiency_gap,
    efficiency_table,
    residual_variances,
    slope_difference,
    true_unconditional_variance,
)

__all__ = [
    "DesignSize",
    "PopulationParams",
    "ResidualVariances",
    "conditional_variance_ancova",
    "crm_grouped_gls_variance",
    "crossover_correlation",
    "efficiency_gap",
    "efficiency_table",
    "residual_variances",
    "slope_difference",
    "true_unconditional_variance",
]
