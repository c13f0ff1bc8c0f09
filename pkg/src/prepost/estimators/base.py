"""Base estimator interface and result types."""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np

from ..data.base import TrialDataset
from ..exceptions import EstimationError, PrepostError
from ..kernel.distributions import student_t_quantile, student_t_two_sided_p
from ..kernel.linalg import Cov2x2
from ..types import CovarianceStructure, GlsCovDict, HCKind, SEKind

logger = logging.getLogger(__name__)


class MethodId(str, Enum):
    """The seven treatment-effect analyses; values are the command line names."""

    ANOVA_POST = "anova-post"
    ANCOVA_MAIN = "ancova-main"
    ANCOVA_INTERACTION = "ancova-interaction"
    ANOVA_CHANGE = "anova-change"
    RM = "rm"
    CRM_POOLED = "crm"
    CRM_GROUPED = "crm-grouped"

    @property
    def label(self) -> str:
        """Display name, e.g. AncovaMain."""
        return _LABELS[self]

    @classmethod
    def parse(cls, name: Union[str, "MethodId"]) -> "MethodId":
        """Resolve a command line name or display label.

        Raises:
            ValueError: If the name matches no method
        """
        if isinstance(name, MethodId):
            return name
        key = str(name).strip()
        for m in cls:
            if key.lower() in (m.value, m.label.lower()):
                return m
        choices = ", ".join(m.value for m in cls)
        raise ValueError(f"unknown method {name!r}; choose from {choices}")

    def __str__(self) -> str:
        return self.value


_LABELS = {
    MethodId.ANOVA_POST: "AnovaPost",
    MethodId.ANCOVA_MAIN: "AncovaMain",
    MethodId.ANCOVA_INTERACTION: "AncovaInteraction",
    MethodId.ANOVA_CHANGE: "AnovaChange",
    MethodId.RM: "RM",
    MethodId.CRM_POOLED: "CrmPooled",
    MethodId.CRM_GROUPED: "CrmGrouped",
}


@dataclass(frozen=True)
class GlsCovEstimate:
    """REML covariance estimate of a repeated-measures fit.

    Attributes:
        structure: "pooled" (one covariance) or "grouped" (one per arm)
        pooled: Shared covariance for the pooled structure
        control: Arm-0 covariance for the grouped structure
        treatment: Arm-1 covariance for the grouped structure
        iterations: REML iterations used (0 for closed-form solutions)
        converged: Whether the iteration met its tolerance
    """

    structure: CovarianceStructure
    pooled: Optional[Cov2x2] = None
    control: Optional[Cov2x2] = None
    treatment: Optional[Cov2x2] = None
    iterations: int = 0
    converged: bool = True

    def arm(self, j: int) -> Cov2x2:
        """Covariance that applies to arm j."""
        if self.structure == "pooled":
            assert self.pooled is not None
            return self.pooled
        cov = self.control if j == 0 else self.treatment
        assert cov is not None
        return cov

    def to_dict(self) -> GlsCovDict:
        return {
            "structure": self.structure,
            "pooled": None if self.pooled is None else self.pooled.to_dict(),
            "control": None if self.control is None else self.control.to_dict(),
            "treatment": None if self.treatment is None else self.treatment.to_dict(),
            "iterations": self.iterations,
            "converged": self.converged,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "GlsCovEstimate":
        def cov(d: Optional[Dict[str, float]]) -> Optional[Cov2x2]:
            return None if d is None else Cov2x2(d["v00"], d["v01"], d["v11"])

        return cls(
            structure=data["structure"],
            pooled=cov(data.get("pooled")),
            control=cov(data.get("control")),
            treatment=cov(data.get("treatment")),
            iterations=int(data["iterations"]),
            converged=bool(data["converged"]),
        )


@dataclass(frozen=True)
class AnalysisResult:
    """Treatment-effect estimate of one method with its inference.

    ``t_stat``, ``p_value`` and ``ci95`` are computed from the SE flavor named
    by ``inference_se`` with ``df`` degrees of freedom.
    """

    method: MethodId
    estimate: float
    se_model: float
    df: float
    t_stat: float
    p_value: float
    ci95: Tuple[float, float]
    inference_se: SEKind = "model"
    se_hc: Optional[float] = None
    se_adjusted_hc: Optional[float] = None
    se_bootstrap: Optional[float] = None
    hc_kind: Optional[HCKind] = None
    nuisance: Dict[str, Any] = field(default_factory=dict)
    residuals: Optional[Tuple[np.ndarray, np.ndarray]] = field(
        default=None, compare=False, repr=False
    )

    def se(self, kind: SEKind) -> Optional[float]:
        """Standard error of the given flavor, None if not computed."""
        return {
            "model": self.se_model,
            "hc": self.se_hc,
            "adjusted_hc": self.se_adjusted_hc,
            "bootstrap": self.se_bootstrap,
        }[kind]

    @property
    def selected_se(self) -> float:
        """SE that drives t, p and the interval."""
        value = self.se(self.inference_se)
        assert value is not None
        return value

    def with_bootstrap(self, se_bootstrap: float) -> "AnalysisResult":
        """Copy with the bootstrap SE attached; inference is unchanged."""
        return replace(self, se_bootstrap=se_bootstrap)


def t_inference(
    estimate: float, se: float, df: float, level: float = 0.95
) -> Tuple[float, float, Tuple[float, float]]:
    """t statistic, two-sided p-value and confidence interval.

    A zero SE gives t = +-inf (p = 0) for a nonzero estimate and t = 0
    (p = 1) for a zero estimate.

    Args:
        estimate: Point estimate
        se: Standard error, >= 0
        df: Degrees of freedom
        level: Confidence level of the interval

    Returns:
        Tuple of (t, p, (lower, upper))
    """
    if se > 0.0:
        t = estimate / se
    elif estimate == 0.0:
        t = 0.0
    else:
        t = math.copysign(math.inf, estimate)
    p = student_t_two_sided_p(t, df)
    q = student_t_quantile(0.5 + 0.5 * level, df)
    return t, p, (estimate - q * se, estimate + q * se)


def build_result(
    method: MethodId,
    estimate: float,
    se_model: float,
    df: float,
    inference_se: SEKind = "model",
    se_hc: Optional[float] = None,
    se_adjusted_hc: Optional[float] = None,
    hc_kind: Optional[HCKind] = None,
    nuisance: Optional[Dict[str, Any]] = None,
    residuals: Optional[Tuple[np.ndarray, np.ndarray]] = None,
) -> AnalysisResult:
    """Assemble an AnalysisResult, deriving t, p and the 95% interval.

    Raises:
        EstimationError: If the SE selected for inference was not computed
    """
    selected = {"model": se_model, "hc": se_hc, "adjusted_hc": se_adjusted_hc}.get(
        inference_se
    )
    if selected is None:
        raise EstimationError(f"{method.label}: no {inference_se} SE for inference")
    t, p, ci = t_inference(estimate, selected, df)
    return AnalysisResult(
        method=method,
        estimate=float(estimate),
        se_model=float(se_model),
        df=float(df),
        t_stat=t,
        p_value=p,
        ci95=ci,
        inference_se=inference_se,
        se_hc=se_hc,
        se_adjusted_hc=se_adjusted_hc,
        hc_kind=hc_kind,
        nuisance=dict(nuisance or {}),
        residuals=residuals,
    )


def split_by_arm(
    ds: TrialDataset, values: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """Split a per-subject vector into (arm 0, arm 1) parts in record order."""
    return values[ds.arm == 0], values[ds.arm == 1]


def sqrt_nonneg(variance: float) -> float:
    """Square root that maps tiny negative rounding noise to zero."""
    return math.sqrt(max(variance, 0.0))


class BaseEstimator(ABC):
    """Base class for treatment-effect estimators.

    All estimators must implement:
    - method: Method identifier
    - description: One-line description
    - _fit_impl: The estimation itself
    """

    def __init__(
        self,
        hc_kind: HCKind = "HC2",
        heterogeneous: bool = False,
        reml_tol: float = 1e-8,
        reml_max_iter: int = 100,
    ) -> None:
        """Initialize the estimator.

        Args:
            hc_kind: Sandwich flavor for se_hc
            heterogeneous: Select the heteroscedasticity-robust SE for
                inference where the method offers one
            reml_tol: REML convergence tolerance (repeated-measures methods)
            reml_max_iter: REML iteration cap (repeated-measures methods)
        """
        self.hc_kind = hc_kind
        self.heterogeneous = heterogeneous
        self.reml_tol = reml_tol
        self.reml_max_iter = reml_max_iter

    @property
    @abstractmethod
    def method(self) -> MethodId:
        """Get the method identifier."""
        pass

    @property
    @abstractmethod
    def description(self) -> str:
        """Get a one-line description."""
        pass

    def fit(self, ds: TrialDataset) -> AnalysisResult:
        """Estimate the treatment effect on a dataset.

        Args:
            ds: Trial dataset

        Returns:
            AnalysisResult: Estimate, SEs and inference

        Raises:
            PrepostError: Numerical or estimation failures; unexpected
                exceptions are wrapped into EstimationError
        """
        try:
            result = self._fit_impl(ds)
        except PrepostError:
            raise
        except Exception as e:
            raise EstimationError(f"{self.method.label}: {e}") from e
        logger.debug(
            f"{self.method.label}: estimate={result.estimate:.6g}, "
            f"se_model={result.se_model:.6g}"
        )
        return result

    @abstractmethod
    def _fit_impl(self, ds: TrialDataset) -> AnalysisResult:
        """Estimate on a validated dataset.

        This method should be implemented by subclasses to provide the actual
        estimator. The base class handles error wrapping.
        """
        pass
