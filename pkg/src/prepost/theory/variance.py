"""Closed-form variances of the treatment-effect estimators.

Homogeneous parameters evaluate the shared-covariance formulas; the
arm-specific formulas reduce to them when both arms share a covariance, so
heterogeneous parameters are accepted wherever the estimator stays unbiased
and its variance has a closed form. The pooled constrained model assumes a
shared covariance and rejects heterogeneous parameters.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Union

from ..data.base import SufficientStats
from ..estimators.base import MethodId
from ..exceptions import ModeMismatchError
from ..types import OracleRowDict
from .params import DesignSize, PopulationParams

logger = logging.getLogger(__name__)

MethodLike = Union[str, MethodId]


@dataclass(frozen=True)
class ResidualVariances:
    """Population residual variances of an ANCOVA model.

    Attributes:
        control: Residual variance in arm 0
        treatment: Residual variance in arm 1
        pooled: Arm-proportion weighted average, the OLS residual variance limit
    """

    control: float
    treatment: float
    pooled: float

    def arm(self, j: int) -> float:
        if j not in (0, 1):
            raise ValueError(f"arm must be 0 or 1, got {j}")
        return self.control if j == 0 else self.treatment


def slope_difference(p: PopulationParams) -> float:
    """Treatment minus control slope of follow-up on baseline.

    Zero under a homogeneous structure.
    """
    sigma0 = p.sigma_pre
    return (
        p.rho_arm(1) * p.sigma_post_arm(1) - p.rho_arm(0) * p.sigma_post_arm(0)
    ) / sigma0


def _conditional_post_variance(p: PopulationParams, j: int) -> float:
    # follow-up variance given baseline
    return (1.0 - p.rho_arm(j) ** 2) * p.sigma_post_arm(j) ** 2


def _change_variance(p: PopulationParams, j: int) -> float:
    s0 = p.sigma_pre
    s1 = p.sigma_post_arm(j)
    return s1 * s1 + s0 * s0 - 2.0 * p.rho_arm(j) * s0 * s1


def residual_variances(
    method: MethodLike, p: PopulationParams, d: DesignSize
) -> ResidualVariances:
    """Residual variances of the main-effect or interaction ANCOVA model.

    The main-effect model fits one slope, the arm-proportion average of the
    arm slopes, so each arm's residual picks up the slope it does not get:
    arm 0 adds (beta3 * p1)^2 * sigma_pre^2 and arm 1 adds
    (beta3 * p0)^2 * sigma_pre^2. The interaction model fits both slopes.

    Args:
        method: AncovaMain or AncovaInteraction
        p: Population parameters
        d: Design

    Returns:
        ResidualVariances: Per-arm and pooled residual variances

    Raises:
        ValueError: For a method without a regression residual
    """
    method = MethodId.parse(method)
    if method == MethodId.ANCOVA_MAIN:
        beta3 = slope_difference(p)
        extra0 = (beta3 * d.p1 * p.sigma_pre) ** 2
        extra1 = (beta3 * d.p0 * p.sigma_pre) ** 2
        v0 = _conditional_post_variance(p, 0) + extra0
        v1 = _conditional_post_variance(p, 1) + extra1
    elif method == MethodId.ANCOVA_INTERACTION:
        v0 = _conditional_post_variance(p, 0)
        v1 = _conditional_post_variance(p, 1)
    else:
        raise ValueError(f"{method.label} has no ANCOVA residual variance")
    return ResidualVariances(control=v0, treatment=v1, pooled=d.p0 * v0 + d.p1 * v1)


def _ancova_main_variance(p: PopulationParams, d: DesignSize) -> float:
    rv = residual_variances(MethodId.ANCOVA_MAIN, p, d)
    return rv.control / d.n0 + rv.treatment / d.n1


def _ancova_interaction_variance(p: PopulationParams, d: DesignSize) -> float:
    beta3 = slope_difference(p)
    return (
        _conditional_post_variance(p, 0) / d.n0
        + _conditional_post_variance(p, 1) / d.n1
        + (beta3 * p.sigma_pre) ** 2 / d.n
    )


def true_unconditional_variance(
    method: MethodLike, p: PopulationParams, d: DesignSize
) -> float:
    """True variance of a method's estimator over repeated trials.

    Args:
        method: Method whose estimator is evaluated
        p: Population parameters
        d: Design

    Returns:
        float: The variance

    Raises:
        ModeMismatchError: For the pooled constrained model under
            heterogeneous parameters
    """
    method = MethodId.parse(method)
    if method == MethodId.ANOVA_POST:
        return p.sigma_post_arm(0) ** 2 / d.n0 + p.sigma_post_arm(1) ** 2 / d.n1
    if method in (MethodId.ANOVA_CHANGE, MethodId.RM):
        return _change_variance(p, 0) / d.n0 + _change_variance(p, 1) / d.n1
    if method == MethodId.CRM_POOLED:
        if p.mode != "homogeneous":
            raise ModeMismatchError(
                f"{method.label} assumes one covariance for both arms; "
                "use crm-grouped for heterogeneous parameters"
            )
        return _ancova_main_variance(p, d)
    if method in (MethodId.ANCOVA_MAIN, MethodId.CRM_GROUPED):
        # grouped cRM shares the printed main-effect form
        return _ancova_main_variance(p, d)
    if method == MethodId.ANCOVA_INTERACTION:
        return _ancova_interaction_variance(p, d)
    raise ValueError(f"no variance formula for {method.label}")


def crm_grouped_gls_variance(p: PopulationParams, d: DesignSize) -> float:
    """Variance of the grouped constrained GLS estimator at known covariances.

    Direct GLS algebra with arm-specific covariances gives the interaction
    model's form, not the main-effect form shared by
    :func:`true_unconditional_variance`; the two agree when n0 == n1 or the
    arm slopes are equal.
    """
    return _ancova_interaction_variance(p, d)


def conditional_variance_ancova(
    stats: SufficientStats, p: PopulationParams, method: MethodLike
) -> float:
    """Variance of an ANCOVA estimator given the observed baselines.

    Args:
        stats: Sufficient statistics of a concrete dataset
        p: Parameters supplying the residual variances
        method: AncovaMain or AncovaInteraction

    Returns:
        float: The conditional variance

    Raises:
        ValueError: If a within-arm baseline sum of squares is zero, or for
            any other method
    """
    method = MethodId.parse(method)
    arms = (stats.control, stats.treatment)
    if any(arm.ss_pre <= 0.0 for arm in arms):
        raise ValueError("within-arm baseline sum of squares is zero")
    design = DesignSize(n0=stats.control.n, n1=stats.treatment.n)
    rv = residual_variances(method, p, design)

    if method == MethodId.ANCOVA_MAIN:
        diff = stats.treatment.mean_pre - stats.control.mean_pre
        ssw = stats.ss_pre_within
        return math.fsum(
            (1.0 / arm.n + diff * diff * arm.ss_pre / (ssw * ssw)) * rv.arm(j)
            for j, arm in enumerate(arms)
        )
    return math.fsum(
        (1.0 / arm.n + (arm.mean_pre - stats.grand_mean_pre) ** 2 / arm.ss_pre)
        * rv.arm(j)
        for j, arm in enumerate(arms)
    )


def _require_homogeneous(p: PopulationParams, what: str) -> None:
    if p.mode != "homogeneous":
        raise ModeMismatchError(f"{what} needs homogeneous parameters")


def efficiency_gap(
    a: MethodLike, b: MethodLike, p: PopulationParams, d: DesignSize
) -> float:
    """Variance of method ``a`` minus variance of method ``b``.

    Positive means ``b`` is more efficient.

    Raises:
        ModeMismatchError: If the parameters are heterogeneous
    """
    _require_homogeneous(p, "efficiency_gap")
    return true_unconditional_variance(a, p, d) - true_unconditional_variance(b, p, d)


def crossover_correlation(p: PopulationParams) -> float:
    """Correlation below which follow-up ANOVA beats the change score.

    The two variances are equal at rho = sigma_pre / (2 * sigma_post). A
    value of 1 or more means the change score never wins.

    Raises:
        ModeMismatchError: If the parameters are heterogeneous
    """
    _require_homogeneous(p, "crossover_correlation")
    assert p.sigma_post is not None
    return p.sigma_pre / (2.0 * p.sigma_post)


def _note(method: MethodId, p: PopulationParams, d: DesignSize) -> Optional[str]:
    if method == MethodId.CRM_GROUPED:
        gls = crm_grouped_gls_variance(p, d)
        return f"GLS derivation gives {gls:.6g}"
    if method == MethodId.RM:
        return "same estimator as anova-change"
    return None


def efficiency_table(
    p: PopulationParams,
    d: DesignSize,
    methods: Optional[Sequence[MethodLike]] = None,
) -> List[OracleRowDict]:
    """Oracle variance, SE and gap to the most efficient method.

    Args:
        p: Population parameters
        d: Design
        methods: Methods to list, default every method with a formula

    Returns:
        List[OracleRowDict]: One row per method in the given order
    """
    selected = [MethodId.parse(m) for m in (methods or list(MethodId))]
    values = {}
    for method in selected:
        try:
            values[method] = true_unconditional_variance(method, p, d)
        except ModeMismatchError as e:
            logger.debug(f"No oracle variance for {method.label}: {e}")
            values[method] = None

    defined = [v for v in values.values() if v is not None]
    best = min(defined) if defined else None
    rows: List[OracleRowDict] = []
    for method in selected:
        variance = values[method]
        rows.append(
            {
                "method": method.value,
                "variance": variance,
                "se": None if variance is None else math.sqrt(variance),
                "gap_to_best": (
                    None if variance is None or best is None else variance - best
                ),
                "note": (
                    "not defined for heterogeneous parameters"
                    if variance is None
                    else _note(method, p, d)
                ),
            }
        )
    return rows
