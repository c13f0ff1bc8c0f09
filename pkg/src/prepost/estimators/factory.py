"""Estimator factory for creating estimator instances."""

from typing import Any, Dict, List, Optional, Type, Union

from ..exceptions import EstimationError, UsageError
from ..types import PopulationMode
from .ancova import AncovaInteractionEstimator, AncovaMainEstimator
from .anova import AnovaChangeEstimator, AnovaPostEstimator
from .base import BaseEstimator, MethodId
from .repeated import (
    CrmGroupedEstimator,
    CrmPooledEstimator,
    RepeatedMeasuresEstimator,
)

HOMOGENEOUS_METHODS = (
    MethodId.ANOVA_POST,
    MethodId.ANCOVA_MAIN,
    MethodId.ANOVA_CHANGE,
    MethodId.RM,
    MethodId.CRM_POOLED,
)

HETEROGENEOUS_METHODS = (
    MethodId.ANCOVA_MAIN,
    MethodId.ANCOVA_INTERACTION,
    MethodId.CRM_GROUPED,
)


class EstimatorFactory:
    """Factory for creating estimator instances."""

    _estimator_types: Dict[MethodId, Type[BaseEstimator]] = {}

    @classmethod
    def register(
        cls, method: MethodId, estimator_type: Type[BaseEstimator]
    ) -> None:
        """Register an estimator type.

        Args:
            method: Method the estimator implements
            estimator_type: Estimator class

        Raises:
            EstimationError: If the method is already registered
        """
        if method in cls._estimator_types:
            raise EstimationError(f"Estimator for {method.label} already registered")
        cls._estimator_types[method] = estimator_type

    @classmethod
    def create(
        cls, method: Union[str, MethodId], **kwargs: Any
    ) -> BaseEstimator:
        """Create an estimator instance.

        Args:
            method: Method id, command line name or display label
            **kwargs: Arguments passed to the estimator constructor

        Returns:
            Created estimator

        Raises:
            EstimationError: If no estimator is registered for the method
        """
        try:
            method_id = MethodId.parse(method)
        except ValueError as e:
            raise EstimationError(str(e)) from e
        if method_id not in cls._estimator_types:
            raise EstimationError(f"No estimator registered for {method_id.label}")
        return cls._estimator_types[method_id](**kwargs)

    @classmethod
    def get_estimator_types(cls) -> Dict[MethodId, Type[BaseEstimator]]:
        """Get registered estimator types."""
        return dict(cls._estimator_types)

    @classmethod
    def clear(cls) -> None:
        """Clear all registered estimator types."""
        cls._estimator_types.clear()

    @classmethod
    def register_builtin(cls) -> None:
        """(Re)register the seven built-in estimators."""
        for method, estimator_type in _BUILTIN.items():
            cls._estimator_types[method] = estimator_type


def resolve_methods(
    selection: Union[str, List[str]], mode: Optional[PopulationMode] = None
) -> List[MethodId]:
    """Turn a method selection into method ids.

    Args:
        selection: "all" or a comma-separated list (or list) of method names
        mode: With "all", restrict to the homogeneous or heterogeneous family

    Returns:
        List of method ids in canonical order for "all", else in given order

    Raises:
        UsageError: On an unknown method name or an empty selection
    """
    if isinstance(selection, str):
        names = [s.strip() for s in selection.split(",") if s.strip()]
    else:
        names = list(selection)
    if not names:
        raise UsageError("no methods selected")

    if len(names) == 1 and names[0].lower() == "all":
        if mode == "homogeneous":
            return list(HOMOGENEOUS_METHODS)
        if mode == "heterogeneous":
            return list(HETEROGENEOUS_METHODS)
        return list(MethodId)

    methods: List[MethodId] = []
    for name in names:
        try:
            method = MethodId.parse(name)
        except ValueError as e:
            raise UsageError(str(e)) from e
        if method not in methods:
            methods.append(method)
    return methods


_BUILTIN: Dict[MethodId, Type[BaseEstimator]] = {
    MethodId.ANOVA_POST: AnovaPostEstimator,
    MethodId.ANCOVA_MAIN: AncovaMainEstimator,
    MethodId.ANCOVA_INTERACTION: AncovaInteractionEstimator,
    MethodId.ANOVA_CHANGE: AnovaChangeEstimator,
    MethodId.RM: RepeatedMeasuresEstimator,
    MethodId.CRM_POOLED: CrmPooledEstimator,
    MethodId.CRM_GROUPED: CrmGroupedEstimator,
}

# Register built-in estimators
EstimatorFactory.register_builtin()
