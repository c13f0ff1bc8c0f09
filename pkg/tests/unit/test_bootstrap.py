"""Tests for the stratified bootstrap."""

import numpy as np
import pytest

from prepost.data import TrialDataset
from prepost.estimators import anova_post
from prepost.exceptions import BootstrapError
from prepost.resampling import bootstrap_se
from prepost.resampling.bootstrap import _resample_indices
from prepost.simulation import generate_trial, preset
from prepost.theory import DesignSize


@pytest.fixture
def trial() -> TrialDataset:
    """Homogeneous scenario trial with 15 subjects per arm."""
    cfg = preset("homogeneous").model_copy(update={"design": DesignSize(n0=15, n1=15)})
    return generate_trial(cfg, seed=8)


@pytest.mark.parametrize("method", ["anova-post", "anova-change", "rm"])
def test_constant_outcome_has_zero_se(method: str) -> None:
    """Test that a dataset without variation has a zero bootstrap SE."""
    ds = TrialDataset.from_arrays([0] * 5 + [1] * 5, [5.0] * 10, [7.0] * 10)
    result = bootstrap_se(ds, method, B=100, seed=1)
    assert result.se == pytest.approx(0.0, abs=1e-10)
    assert result.replicates == 100
    assert result.redraws == 0


def test_deterministic(trial: TrialDataset) -> None:
    """Test that the same seed gives the same SE."""
    first = bootstrap_se(trial, "ancova-main", B=100, seed=7)
    second = bootstrap_se(trial, "ancova-main", B=100, seed=7)
    other = bootstrap_se(trial, "ancova-main", B=100, seed=8)
    assert first == second
    assert first.se != other.se


def test_independent_of_workers(trial: TrialDataset) -> None:
    """Test that threading does not change the result."""
    serial = bootstrap_se(trial, "anova-post", B=120, seed=3, workers=1)
    threaded = bootstrap_se(trial, "anova-post", B=120, seed=3, workers=4)
    assert serial == threaded


def test_se_is_plausible(trial: TrialDataset) -> None:
    """Test that the bootstrap SE is of the order of the sandwich SE."""
    result = bootstrap_se(trial, "anova-post", B=400, seed=11)
    se_hc = anova_post(trial).se_hc
    assert 0.6 * se_hc < result.se < 1.4 * se_hc
    low, high = result.percentile_ci95
    assert low < anova_post(trial).estimate < high


def test_invalid_arguments(trial: TrialDataset) -> None:
    """Test the replicate count and seed checks."""
    with pytest.raises(ValueError, match="at least 100 replicates"):
        bootstrap_se(trial, "anova-post", B=99, seed=0)
    with pytest.raises(ValueError, match="seed must be non-negative"):
        bootstrap_se(trial, "anova-post", B=100, seed=-1)


def test_resampling_is_stratified() -> None:
    """Test that resamples keep every subject in its arm."""
    rng = np.random.default_rng(0)
    arms = (np.array([0, 1, 2]), np.array([3, 4, 5, 6]))
    for _ in range(50):
        idx = _resample_indices(rng, arms)
        assert len(idx) == 7
        assert set(idx[:3]) <= {0, 1, 2}
        assert set(idx[3:]) <= {3, 4, 5, 6}


def test_degenerate_dataset(d4: TrialDataset) -> None:
    """Test that a method failing on every resample raises BootstrapError."""
    with pytest.raises(BootstrapError, match="AncovaInteraction"):
        bootstrap_se(d4, "ancova-interaction", B=100, seed=0)
