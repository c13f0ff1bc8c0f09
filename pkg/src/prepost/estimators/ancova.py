"""Baseline-adjusted regressions of the follow-up outcome."""

import logging

import numpy as np

from ..data.base import TrialDataset
from ..data.summary import sufficient_stats
from ..kernel.ols import hc_covariance, ols_fit
from ..types import HCKind
from .base import (
    AnalysisResult,
    BaseEstimator,
    MethodId,
    build_result,
    split_by_arm,
    sqrt_nonneg,
)

logger = logging.getLogger(__name__)


class AncovaMainEstimator(BaseEstimator):
    """Main-effect ANCOVA, y_post ~ 1 + G + y_pre.

    In heterogeneous mode t, p and the interval use the sandwich SE; the
    model-based SE assumes a common residual variance and is biased
    unconditionally when arms differ in both residual variance and size.
    """

    @property
    def method(self) -> MethodId:
        return MethodId.ANCOVA_MAIN

    @property
    def description(self) -> str:
        return "Regression on treatment and baseline"

    def _fit_impl(self, ds: TrialDataset) -> AnalysisResult:
        design = np.column_stack([np.ones(len(ds)), ds.arm.astype(float), ds.y_pre])
        fit = ols_fit(design, ds.y_post)
        cov_hc = hc_covariance(fit, self.hc_kind)
        return build_result(
            self.method,
            estimate=fit.coefficients[1],
            se_model=sqrt_nonneg(fit.model_covariance()[1, 1]),
            df=fit.df_resid,
            inference_se="hc" if self.heterogeneous else "model",
            se_hc=sqrt_nonneg(cov_hc[1, 1]),
            hc_kind=self.hc_kind,
            nuisance={"beta2": float(fit.coefficients[2]), "sigma2": fit.sigma2},
            residuals=split_by_arm(ds, fit.residuals),
        )


class AncovaInteractionEstimator(BaseEstimator):
    """Interaction ANCOVA with the baseline centered at its overall mean.

    Fits y_post ~ 1 + G + c + G*c with c = y_pre - mean(y_pre). The adjusted
    sandwich SE adds beta3^2 * var(y_pre) / N for estimating the centering
    mean.
    """

    @property
    def method(self) -> MethodId:
        return MethodId.ANCOVA_INTERACTION

    @property
    def description(self) -> str:
        return "Regression with treatment by centered-baseline interaction"

    def _fit_impl(self, ds: TrialDataset) -> AnalysisResult:
        stats = sufficient_stats(ds)
        g = ds.arm.astype(float)
        c = ds.y_pre - stats.grand_mean_pre
        design = np.column_stack([np.ones(len(ds)), g, c, g * c])
        fit = ols_fit(design, ds.y_post)

        beta3 = float(fit.coefficients[3])
        var_hc = float(hc_covariance(fit, self.hc_kind)[1, 1])
        correction = beta3 * beta3 * stats.var_pre / stats.n
        se_adjusted = sqrt_nonneg(var_hc + correction)

        return build_result(
            self.method,
            estimate=fit.coefficients[1],
            se_model=sqrt_nonneg(fit.model_covariance()[1, 1]),
            df=fit.df_resid,
            inference_se="adjusted_hc" if self.heterogeneous else "model",
            se_hc=sqrt_nonneg(var_hc),
            se_adjusted_hc=se_adjusted,
            hc_kind=self.hc_kind,
            nuisance={
                "beta2": float(fit.coefficients[2]),
                "beta3": beta3,
                "centering_mean": stats.grand_mean_pre,
                "sigma2": fit.sigma2,
            },
            residuals=split_by_arm(ds, fit.residuals),
        )


def ancova_main(
    ds: TrialDataset, hc_kind: HCKind = "HC2", heterogeneous: bool = False
) -> AnalysisResult:
    """Main-effect ANCOVA of the follow-up outcome on treatment and baseline."""
    return AncovaMainEstimator(
        hc_kind=hc_kind, heterogeneous=heterogeneous
    ).fit(ds)


def ancova_interaction(
    ds: TrialDataset, hc_kind: HCKind = "HC2", heterogeneous: bool = False
) -> AnalysisResult:
    """Interaction ANCOVA with mean-centered baseline and adjusted HC SE."""
    return AncovaInteractionEstimator(
        hc_kind=hc_kind, heterogeneous=heterogeneous
    ).fit(ds)
