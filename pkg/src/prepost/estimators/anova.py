"""Two-group comparisons of the follow-up outcome and of the change score."""

import numpy as np

from ..data.base import TrialDataset
from ..data.summary import change_scores
from ..kernel.ols import hc_covariance, ols_fit
from ..types import HCKind
from .base import AnalysisResult, BaseEstimator, MethodId, build_result, sqrt_nonneg


def _two_group_result(
    method: MethodId, ds: TrialDataset, outcome: np.ndarray, hc_kind: HCKind
) -> AnalysisResult:
    design = np.column_stack([np.ones(len(ds)), ds.arm.astype(float)])
    fit = ols_fit(design, outcome)
    se_model = sqrt_nonneg(fit.model_covariance()[1, 1])
    se_hc = sqrt_nonneg(hc_covariance(fit, hc_kind)[1, 1])
    return build_result(
        method,
        estimate=fit.coefficients[1],
        se_model=se_model,
        df=fit.df_resid,
        se_hc=se_hc,
        hc_kind=hc_kind,
        nuisance={"sigma2": fit.sigma2},
    )


class AnovaPostEstimator(BaseEstimator):
    """Difference in mean follow-up outcome, y_post ~ 1 + G."""

    @property
    def method(self) -> MethodId:
        return MethodId.ANOVA_POST

    @property
    def description(self) -> str:
        return "Difference in mean follow-up outcome"

    def _fit_impl(self, ds: TrialDataset) -> AnalysisResult:
        return _two_group_result(self.method, ds, ds.y_post, self.hc_kind)


class AnovaChangeEstimator(BaseEstimator):
    """Difference in mean change from baseline, (y_post - y_pre) ~ 1 + G."""

    @property
    def method(self) -> MethodId:
        return MethodId.ANOVA_CHANGE

    @property
    def description(self) -> str:
        return "Difference in mean change from baseline"

    def _fit_impl(self, ds: TrialDataset) -> AnalysisResult:
        return _two_group_result(self.method, ds, change_scores(ds), self.hc_kind)


def anova_post(ds: TrialDataset, hc_kind: HCKind = "HC2") -> AnalysisResult:
    """Compare mean follow-up outcomes between arms."""
    return AnovaPostEstimator(hc_kind=hc_kind).fit(ds)


def anova_change(ds: TrialDataset, hc_kind: HCKind = "HC2") -> AnalysisResult:
    """Compare mean change scores between arms."""
    return AnovaChangeEstimator(hc_kind=hc_kind).fit(ds)
