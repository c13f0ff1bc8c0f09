"""Repeated-measures GLS estimators with REML-estimated 2x2 covariances.

Both time points of a subject form one observation vector (y_pre, y_post)
with an unstructured covariance. Because every subject of an arm shares the
same 2-row design, GLS and REML only need the per-arm sufficient statistics.

Repeated measures (RM) uses a saturated mean {1, G, T, G*T}; its GLS
estimate does not depend on the covariance and the REML covariance is the
pooled within-arm sample covariance. Constrained repeated measures (cRM)
drops the arm main effect, forcing a common baseline mean, and its
covariance is found by EM iteration of the REML score equations.
"""

import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from ..data.base import SufficientStats, TrialDataset
from ..data.io import to_long_format
from ..data.summary import sufficient_stats
from ..exceptions import ConvergenceError, NotPositiveDefiniteError
from ..kernel.linalg import Cov2x2, cholesky2
from ..kernel.ols import ols_fit
from ..types import CovarianceStructure
from .base import (
    AnalysisResult,
    BaseEstimator,
    GlsCovEstimate,
    MethodId,
    build_result,
    sqrt_nonneg,
)

logger = logging.getLogger(__name__)

# Per-arm designs, rows (baseline, follow-up).
# RM columns: intercept, G, T, G*T
RM_ARM_DESIGNS = (
    np.array([[1.0, 0.0, 0.0, 0.0], [1.0, 0.0, 1.0, 0.0]]),
    np.array([[1.0, 1.0, 0.0, 0.0], [1.0, 1.0, 1.0, 1.0]]),
)
# cRM columns: intercept, T, G*T
CRM_ARM_DESIGNS = (
    np.array([[1.0, 0.0, 0.0], [1.0, 1.0, 0.0]]),
    np.array([[1.0, 0.0, 0.0], [1.0, 1.0, 1.0]]),
)

SINGULAR_TOL = 1e-12


@dataclass(frozen=True)
class GlsStep:
    """GLS fixed effects for given arm covariances.

    Attributes:
        coefficients: GLS coefficient vector
        covariance: Inverse of the GLS information matrix
        arm_residuals: Per-arm mean residual vectors, ybar_j - X_j b
    """

    coefficients: np.ndarray
    covariance: np.ndarray
    arm_residuals: Tuple[np.ndarray, np.ndarray]


def _pooled_sample_covariance(stats: SufficientStats) -> Cov2x2:
    return Cov2x2.from_matrix(
        (stats.control.sscp() + stats.treatment.sscp()) / (stats.n - 2)
    )


def _arm_sample_covariance(stats: SufficientStats, j: int) -> Cov2x2:
    arm = stats.arm(j)
    return Cov2x2.from_matrix(arm.sscp() / (arm.n - 1))


def _is_singular(c: Cov2x2) -> bool:
    return c.determinant <= SINGULAR_TOL * c.v00 * c.v11


def gls_step(
    stats: SufficientStats,
    designs: Sequence[np.ndarray],
    covs: Sequence[Cov2x2],
) -> GlsStep:
    """Solve the GLS normal equations from per-arm sufficient statistics.

    Args:
        stats: Sufficient statistics of the dataset
        designs: 2 x k design of each arm
        covs: Covariance of each arm

    Returns:
        GlsStep: Coefficients, their covariance and per-arm mean residuals

    Raises:
        NotPositiveDefiniteError: If an arm covariance is not positive definite
    """
    k = designs[0].shape[1]
    info = np.zeros((k, k))
    score = np.zeros(k)
    weights: List[np.ndarray] = []
    for j in (0, 1):
        cholesky2(covs[j])
        w = np.linalg.inv(covs[j].matrix())
        weights.append(w)
        arm = stats.arm(j)
        x = designs[j]
        info += arm.n * x.T @ w @ x
        score += arm.n * x.T @ w @ arm.means()
    cov_beta = np.linalg.inv(info)
    cov_beta = 0.5 * (cov_beta + cov_beta.T)
    beta = cov_beta @ score
    residuals = (
        stats.control.means() - designs[0] @ beta,
        stats.treatment.means() - designs[1] @ beta,
    )
    return GlsStep(coefficients=beta, covariance=cov_beta, arm_residuals=residuals)


def _reml_update(
    stats: SufficientStats,
    step: GlsStep,
    structure: CovarianceStructure,
) -> Tuple[Cov2x2, Cov2x2]:
    # Fixed point of the REML score: N * Sigma = sum of residual outer
    # products + sum_i X_i C X_i'
    parts = []
    for j in (0, 1):
        arm = stats.arm(j)
        x = CRM_ARM_DESIGNS[j]
        d = step.arm_residuals[j]
        parts.append(
            (
                arm.sscp() + arm.n * np.outer(d, d),
                arm.n * (x @ step.covariance @ x.T),
            )
        )
    if structure == "pooled":
        total = sum(s + v for s, v in parts) / stats.n
        pooled = Cov2x2.from_matrix(total)
        return pooled, pooled
    grouped = [
        Cov2x2.from_matrix((s + v) / stats.arm(j).n) for j, (s, v) in enumerate(parts)
    ]
    return grouped[0], grouped[1]


def reml_covariance(
    stats: SufficientStats,
    structure: CovarianceStructure,
    tol: float = 1e-8,
    max_iter: int = 100,
) -> Tuple[GlsCovEstimate, GlsStep]:
    """REML estimate of the cRM covariance by EM iteration.

    Starts from the pooled (divisor N - 2) or per-arm (divisor n_j - 1)
    sample covariances and alternates GLS with the REML fixed-point update
    until the largest absolute change of a covariance entry falls below
    ``tol``.

    Args:
        stats: Sufficient statistics
        structure: "pooled" or "grouped"
        tol: Absolute convergence tolerance on covariance entries
        max_iter: Iteration cap

    Returns:
        Tuple of the converged covariance estimate and the GLS step at it

    Raises:
        NotPositiveDefiniteError: If a start value or an update is not
            positive definite
        ConvergenceError: If the iteration cap is reached
    """
    covs: Tuple[Cov2x2, Cov2x2]
    if structure == "pooled":
        start = _pooled_sample_covariance(stats)
        covs = (start, start)
    else:
        covs = (_arm_sample_covariance(stats, 0), _arm_sample_covariance(stats, 1))

    for iteration in range(1, max_iter + 1):
        step = gls_step(stats, CRM_ARM_DESIGNS, covs)
        updated = _reml_update(stats, step, structure)
        for c in updated:
            if not c.is_positive_definite():
                raise NotPositiveDefiniteError(
                    f"REML update {iteration} is not positive definite "
                    f"(determinant={c.determinant})",
                    determinant=c.determinant,
                )
        change = max(updated[j].max_abs_diff(covs[j]) for j in (0, 1))
        covs = updated
        logger.debug(f"REML {structure} iteration {iteration}: max change {change:.3e}")
        if change < tol:
            estimate = _gls_cov_estimate(structure, covs, iteration, True)
            return estimate, gls_step(stats, CRM_ARM_DESIGNS, covs)

    raise ConvergenceError(
        f"REML did not converge in {max_iter} iterations",
        iterations=max_iter,
        last_covariance=_gls_cov_estimate(structure, covs, max_iter, False),
    )


def _gls_cov_estimate(
    structure: CovarianceStructure,
    covs: Sequence[Cov2x2],
    iterations: int,
    converged: bool,
) -> GlsCovEstimate:
    if structure == "pooled":
        return GlsCovEstimate(
            structure="pooled",
            pooled=covs[0],
            iterations=iterations,
            converged=converged,
        )
    return GlsCovEstimate(
        structure="grouped",
        control=covs[0],
        treatment=covs[1],
        iterations=iterations,
        converged=converged,
    )


def crm_pooled_closed_form(stats: SufficientStats, cov: Cov2x2) -> float:
    """cRM treatment effect under a shared covariance.

    Follow-up difference minus slope v01/v00 times the baseline difference.
    """
    c, t = stats.control, stats.treatment
    return (t.mean_post - c.mean_post) - cov.slope * (t.mean_pre - c.mean_pre)


def crm_grouped_closed_form(
    stats: SufficientStats, cov0: Cov2x2, cov1: Cov2x2
) -> float:
    """cRM treatment effect under arm-specific covariances.

    Each arm's follow-up mean is adjusted with its own slope toward the
    common baseline mean, estimated with precision weights n_j / v00_j.
    """
    c, t = stats.control, stats.treatment
    w0 = c.n / cov0.v00
    w1 = t.n / cov1.v00
    mu = (w0 * c.mean_pre + w1 * t.mean_pre) / (w0 + w1)
    return (
        (t.mean_post - c.mean_post)
        - cov1.slope * (t.mean_pre - mu)
        + cov0.slope * (c.mean_pre - mu)
    )


class RepeatedMeasuresEstimator(BaseEstimator):
    """Saturated repeated-measures model; the interaction is the diff-in-diff."""

    @property
    def method(self) -> MethodId:
        return MethodId.RM

    @property
    def description(self) -> str:
        return "Repeated measures with arm, time and arm-by-time terms"

    def _fit_impl(self, ds: TrialDataset) -> AnalysisResult:
        long = to_long_format(ds)
        g = long["arm"].to_numpy(dtype=float)
        t = long["time"].to_numpy(dtype=float)
        design = np.column_stack([np.ones(len(long)), g, t, g * t])
        # saturated mean: GLS coincides with OLS for any covariance
        fit = ols_fit(design, long["y"].to_numpy(dtype=float))

        stats = sufficient_stats(ds)
        sigma = _pooled_sample_covariance(stats)
        if sigma.v00 < 0.0 or sigma.v11 < 0.0 or sigma.determinant < -SINGULAR_TOL * (
            sigma.v00 * sigma.v11
        ):
            raise NotPositiveDefiniteError(
                "pooled covariance estimate is not positive semidefinite",
                determinant=sigma.determinant,
            )

        meat = sum(
            stats.arm(j).n * x.T @ sigma.matrix() @ x
            for j, x in enumerate(RM_ARM_DESIGNS)
        )
        cov_beta = fit.xtx_inv @ meat @ fit.xtx_inv
        return build_result(
            self.method,
            estimate=fit.coefficients[3],
            se_model=sqrt_nonneg(cov_beta[3, 3]),
            df=stats.n - 2,
            nuisance={
                "covariance": GlsCovEstimate(
                    structure="pooled", pooled=sigma, iterations=0, converged=True
                )
            },
        )


class _ConstrainedRepeatedMeasuresEstimator(BaseEstimator):
    structure: CovarianceStructure = "pooled"

    def _fit_impl(self, ds: TrialDataset) -> AnalysisResult:
        stats = sufficient_stats(ds)
        df = stats.n - 2

        if self.structure == "pooled":
            start = _pooled_sample_covariance(stats)
            if start.v00 > 0.0 and _is_singular(start):
                return self._boundary_result(stats, start, df)

        cov_estimate, step = reml_covariance(
            stats, self.structure, self.reml_tol, self.reml_max_iter
        )
        return build_result(
            self.method,
            estimate=step.coefficients[2],
            se_model=sqrt_nonneg(step.covariance[2, 2]),
            df=df,
            nuisance={
                "covariance": cov_estimate,
                "baseline_mean": float(step.coefficients[0]),
            },
        )

    def _boundary_result(
        self, stats: SufficientStats, sigma: Cov2x2, df: float
    ) -> AnalysisResult:
        # Follow-up is an exact common linear function of baseline within
        # arms; the REML likelihood peaks at the singular sample covariance.
        logger.warning(
            f"{self.method.label}: singular pooled covariance, "
            "reporting the boundary solution"
        )
        residual_var = sigma.v11 - sigma.v01 * sigma.slope
        c, t = stats.control, stats.treatment
        return build_result(
            self.method,
            estimate=crm_pooled_closed_form(stats, sigma),
            se_model=sqrt_nonneg(residual_var * (1.0 / c.n + 1.0 / t.n)),
            df=df,
            nuisance={
                "covariance": GlsCovEstimate(
                    structure="pooled", pooled=sigma, iterations=0, converged=True
                )
            },
        )


class CrmPooledEstimator(_ConstrainedRepeatedMeasuresEstimator):
    """Constrained repeated measures with one covariance for both arms."""

    structure: CovarianceStructure = "pooled"

    @property
    def method(self) -> MethodId:
        return MethodId.CRM_POOLED

    @property
    def description(self) -> str:
        return "Constrained repeated measures, pooled covariance"


class CrmGroupedEstimator(_ConstrainedRepeatedMeasuresEstimator):
    """Constrained repeated measures with a covariance per arm."""

    structure: CovarianceStructure = "grouped"

    @property
    def method(self) -> MethodId:
        return MethodId.CRM_GROUPED

    @property
    def description(self) -> str:
        return "Constrained repeated measures, arm-specific covariances"


def rm_fit(ds: TrialDataset) -> AnalysisResult:
    """Repeated-measures GLS estimate of the arm-by-time interaction."""
    return RepeatedMeasuresEstimator().fit(ds)


def crm_fit(
    ds: TrialDataset,
    covariance: CovarianceStructure = "pooled",
    reml_tol: float = 1e-8,
    reml_max_iter: int = 100,
) -> AnalysisResult:
    """Constrained repeated-measures estimate with REML covariance.

    Args:
        ds: Trial dataset
        covariance: "pooled" or "grouped"
        reml_tol: REML convergence tolerance
        reml_max_iter: REML iteration cap

    Returns:
        AnalysisResult: Estimate with the covariance estimate in nuisance
    """
    if covariance not in ("pooled", "grouped"):
        raise ValueError(
            f"covariance must be 'pooled' or 'grouped', got {covariance!r}"
        )
    cls = CrmPooledEstimator if covariance == "pooled" else CrmGroupedEstimator
    return cls(reml_tol=reml_tol, reml_max_iter=reml_max_iter).fit(ds)
