"""Tests for the two-group and ANCOVA estimators."""

import math

import numpy as np
import pytest

from prepost.data import TrialDataset, sufficient_stats
from prepost.estimators import (
    AncovaInteractionEstimator,
    AncovaMainEstimator,
    AnovaChangeEstimator,
    AnovaPostEstimator,
    EstimatorFactory,
    MethodId,
    ancova_interaction,
    ancova_main,
    anova_change,
    anova_post,
    rm_fit,
)
from prepost.estimators.base import build_result, t_inference
from prepost.estimators.repeated import RM_ARM_DESIGNS, gls_step
from prepost.exceptions import EstimationError, NumericalError
from prepost.kernel import Cov2x2, student_t_quantile

IDENTICAL_SLOPES = TrialDataset.from_arrays(
    [0, 0, 0, 0, 1, 1, 1, 1],
    [1, 2, 3, 4, 1, 2, 3, 4],
    [2.1, 3.9, 5.9, 8.1, 7.1, 8.9, 10.9, 13.1],
)

FLAT_SLOPE = TrialDataset.from_arrays(
    [0, 0, 0, 0, 1, 1, 1, 1],
    [1, 2, 3, 4, 2, 3, 4, 5],
    [5, 3, 3, 5, 7, 5, 5, 7],
)


def test_method_id_parse() -> None:
    """Test lookup by command line name and by display label."""
    assert MethodId.parse("ancova-main") is MethodId.ANCOVA_MAIN
    assert MethodId.parse("AncovaMain") is MethodId.ANCOVA_MAIN
    assert MethodId.parse(" crm ") is MethodId.CRM_POOLED
    assert MethodId.parse("CrmGrouped") is MethodId.CRM_GROUPED
    assert MethodId.parse(MethodId.RM) is MethodId.RM
    assert str(MethodId.ANOVA_CHANGE) == "anova-change"
    with pytest.raises(ValueError, match="unknown method 'ancova'"):
        MethodId.parse("ancova")


def test_anova_post_d4(d4: TrialDataset) -> None:
    """Test the follow-up comparison on D4."""
    result = anova_post(d4)
    assert result.method is MethodId.ANOVA_POST
    assert result.estimate == pytest.approx(-1.0)
    assert result.se_model == pytest.approx(math.sqrt(2.0))
    assert result.nuisance["sigma2"] == pytest.approx(2.0)
    assert result.df == 2.0
    assert result.inference_se == "model"
    assert result.hc_kind == "HC2"


def test_anova_change_d4(d4: TrialDataset) -> None:
    """Test that identical within-arm changes give a zero SE."""
    result = anova_change(d4)
    assert result.estimate == pytest.approx(-2.0)
    assert result.se_model == pytest.approx(0.0, abs=1e-12)
    assert result.t_stat < -1e6
    assert result.p_value == pytest.approx(0.0, abs=1e-12)


def test_ancova_main_d4(d4: TrialDataset) -> None:
    """Test the main-effect ANCOVA on a perfectly linear dataset."""
    result = ancova_main(d4)
    assert result.estimate == pytest.approx(-2.0)
    assert result.nuisance["beta2"] == pytest.approx(1.0)
    assert result.se_model == pytest.approx(0.0, abs=1e-10)
    assert result.se_hc == pytest.approx(0.0, abs=1e-10)
    arm0, arm1 = result.residuals
    assert len(arm0) == 2
    assert len(arm1) == 2


def test_ancova_interaction_d4(d4: TrialDataset) -> None:
    """Test that four subjects cannot support four coefficients."""
    with pytest.raises(NumericalError):
        ancova_interaction(d4)


def test_rm_d4(d4: TrialDataset) -> None:
    """Test the repeated-measures interaction on D4."""
    result = rm_fit(d4)
    assert result.estimate == pytest.approx(-2.0)
    assert result.se_model == pytest.approx(0.0, abs=1e-10)


def test_identical_slopes() -> None:
    """Test that equal arm slopes leave no interaction and no SE adjustment."""
    result = ancova_interaction(IDENTICAL_SLOPES, heterogeneous=True)
    assert result.nuisance["beta3"] == pytest.approx(0.0, abs=1e-10)
    assert result.nuisance["beta2"] == pytest.approx(2.0)
    assert result.estimate == pytest.approx(5.0)
    assert result.se_adjusted_hc == pytest.approx(result.se_hc, rel=1e-8)
    assert result.inference_se == "adjusted_hc"


def test_flat_slope_matches_anova_post() -> None:
    """Test that a zero baseline slope reduces ANCOVA to the follow-up comparison."""
    main = ancova_main(FLAT_SLOPE)
    post = anova_post(FLAT_SLOPE)
    assert main.nuisance["beta2"] == pytest.approx(0.0, abs=1e-12)
    assert main.estimate == pytest.approx(2.0)
    assert post.estimate == pytest.approx(2.0)


def test_ancova_heterogeneous_inference(het_unbalanced_trial: TrialDataset) -> None:
    """Test that heterogeneous mode draws inference from the sandwich SE."""
    homogeneous = AncovaMainEstimator().fit(het_unbalanced_trial)
    robust = AncovaMainEstimator(heterogeneous=True).fit(het_unbalanced_trial)
    assert homogeneous.inference_se == "model"
    assert robust.inference_se == "hc"
    assert robust.estimate == homogeneous.estimate
    assert robust.selected_se == robust.se_hc

    q = student_t_quantile(0.975, robust.df)
    low, high = robust.ci95
    assert low == pytest.approx(robust.estimate - q * robust.se_hc)
    assert high == pytest.approx(robust.estimate + q * robust.se_hc)
    assert robust.t_stat == pytest.approx(robust.estimate / robust.se_hc)


def test_adjusted_hc_exceeds_hc(het_unbalanced_trial: TrialDataset) -> None:
    """Test that the centering correction only increases the sandwich SE."""
    result = AncovaInteractionEstimator(heterogeneous=True).fit(het_unbalanced_trial)
    beta3 = result.nuisance["beta3"]
    assert result.se_adjusted_hc > result.se_hc
    var_pre = np.var(het_unbalanced_trial.y_pre, ddof=1)
    expected = result.se_hc**2 + beta3**2 * var_pre / len(het_unbalanced_trial)
    assert result.se_adjusted_hc**2 == pytest.approx(expected)
    assert result.nuisance["centering_mean"] == pytest.approx(
        np.mean(het_unbalanced_trial.y_pre)
    )


@pytest.mark.parametrize(
    "estimator",
    [
        AnovaPostEstimator(),
        AnovaChangeEstimator(),
        AncovaMainEstimator(),
        AncovaInteractionEstimator(heterogeneous=True),
    ],
    ids=lambda e: e.method.value,
)
def test_interval_contains_estimate(estimator, homogeneous_trial) -> None:
    """Test that every interval is centered on its estimate."""
    result = estimator.fit(homogeneous_trial)
    low, high = result.ci95
    assert low < result.estimate < high
    assert 0.0 <= result.p_value <= 1.0
    assert (low + high) / 2 == pytest.approx(result.estimate)
    q = student_t_quantile(0.975, result.df)
    assert high - low == pytest.approx(2 * q * result.selected_se)


def test_rm_equals_change_score(random_dataset) -> None:
    """Test that the RM interaction is the change-score comparison."""
    rng = np.random.default_rng(2024)
    for _ in range(100):
        ds = random_dataset(rng, int(rng.integers(3, 30)), int(rng.integers(3, 30)))
        rm = rm_fit(ds)
        change = anova_change(ds)
        assert rm.estimate == pytest.approx(change.estimate, abs=1e-9)
        assert rm.se_model == pytest.approx(change.se_model, rel=1e-9)


def test_hc_kind_is_recorded(homogeneous_trial) -> None:
    """Test that the requested sandwich flavor is used and reported."""
    hc0 = anova_post(homogeneous_trial, hc_kind="HC0")
    hc3 = anova_post(homogeneous_trial, hc_kind="HC3")
    assert hc0.hc_kind == "HC0"
    assert hc3.hc_kind == "HC3"
    assert hc0.se_hc < hc3.se_hc


def test_unexpected_error_is_wrapped(mocker, d4: TrialDataset) -> None:
    """Test that unexpected exceptions become EstimationError."""
    mocker.patch.object(
        AnovaPostEstimator, "_fit_impl", side_effect=RuntimeError("boom")
    )
    with pytest.raises(EstimationError, match="AnovaPost: boom"):
        AnovaPostEstimator().fit(d4)


def test_build_result_missing_inference_se() -> None:
    """Test that inference needs the SE it names."""
    with pytest.raises(EstimationError, match="no hc SE for inference"):
        build_result(MethodId.ANCOVA_MAIN, 1.0, 0.5, 10.0, inference_se="hc")


def test_t_inference_zero_se() -> None:
    """Test the conventions for a zero standard error."""
    t, p, ci = t_inference(0.0, 0.0, 5.0)
    assert (t, p, ci) == (0.0, 1.0, (0.0, 0.0))
    t, p, _ = t_inference(-2.0, 0.0, 5.0)
    assert t == -math.inf
    assert p == 0.0


def test_with_bootstrap_keeps_inference(homogeneous_trial) -> None:
    """Test that attaching a bootstrap SE does not alter t, p or the interval."""
    result = anova_post(homogeneous_trial)
    boot = result.with_bootstrap(1.23)
    assert boot.se("bootstrap") == 1.23
    assert boot.t_stat == result.t_stat
    assert boot.ci95 == result.ci95


def _fit_all(ds: TrialDataset) -> dict:
    return {m: EstimatorFactory.create(m).fit(ds) for m in MethodId}


def _assert_ses_scale(base, moved, factor: float) -> None:
    for kind in ("model", "hc", "adjusted_hc"):
        se = base.se(kind)
        if se is None:
            assert moved.se(kind) is None
        else:
            assert moved.se(kind) == pytest.approx(factor * se, rel=1e-6, abs=1e-9)


@pytest.mark.parametrize("shift,scale", [(7.0, 2.5), (0.0, -3.0), (-40.0, 0.1)])
def test_location_scale_equivariance(
    het_unbalanced_trial: TrialDataset, shift: float, scale: float
) -> None:
    """Test that y -> a + k y maps every estimate to k theta and SE to |k| SE."""
    ds = het_unbalanced_trial
    moved = TrialDataset.from_arrays(
        ds.arm, shift + scale * ds.y_pre, shift + scale * ds.y_post
    )
    base, after = _fit_all(ds), _fit_all(moved)
    for method in MethodId:
        assert after[method].estimate == pytest.approx(
            scale * base[method].estimate, rel=1e-6, abs=1e-9
        ), method.label
        _assert_ses_scale(base[method], after[method], abs(scale))


def test_arm_label_symmetry(het_unbalanced_trial: TrialDataset) -> None:
    """Test that swapping arm labels negates the estimate and keeps the SE."""
    ds = het_unbalanced_trial
    swapped = TrialDataset.from_arrays(1 - ds.arm, ds.y_pre, ds.y_post)
    base, after = _fit_all(ds), _fit_all(swapped)
    for method in MethodId:
        assert after[method].estimate == pytest.approx(
            -base[method].estimate, rel=1e-6, abs=1e-9
        ), method.label
        _assert_ses_scale(base[method], after[method], 1.0)


def test_rm_estimate_ignores_working_covariance(homogeneous_trial) -> None:
    """Test that the saturated GLS estimate does not move with the covariance."""
    stats = sufficient_stats(homogeneous_trial)
    estimate = rm_fit(homogeneous_trial).estimate
    rng = np.random.default_rng(8)
    for _ in range(50):
        covs = []
        for _ in (0, 1):
            a = rng.normal(scale=rng.uniform(1.0, 20.0), size=(2, 2))
            covs.append(Cov2x2.from_matrix(a @ a.T + np.eye(2)))
        step = gls_step(stats, RM_ARM_DESIGNS, covs)
        assert step.coefficients[3] == pytest.approx(estimate, rel=1e-9, abs=1e-9)
