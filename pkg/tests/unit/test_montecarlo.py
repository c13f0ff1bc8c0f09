"""Tests for the Monte Carlo engine."""

import io
import json
import math

import pandas as pd
import pytest
from pydantic import ValidationError

from prepost.estimators import AncovaMainEstimator, MethodId
from prepost.exceptions import NumericalError, SimulationError
from prepost.simulation import MCConfig, preset, run_mc
from prepost.simulation.montecarlo import _replication_seed
from prepost.theory import DesignSize


def _scenario(name: str = "homogeneous", n: int = 20):
    return preset(name).model_copy(update={"design": DesignSize(n0=n, n1=n)})


@pytest.fixture
def config() -> MCConfig:
    """Small homogeneous run with two methods."""
    return MCConfig(
        scenario=_scenario(),
        methods=["anova-post", "AncovaMain"],
        replications=100,
        seed=3,
    )


def test_config_parses_methods(config: MCConfig) -> None:
    """Test that method names and labels are accepted."""
    assert config.methods == [MethodId.ANOVA_POST, MethodId.ANCOVA_MAIN]
    assert config.alpha == 0.05
    assert config.hc_kind == "HC2"


@pytest.mark.parametrize(
    "update,message",
    [
        ({"replications": 99}, "greater than or equal to 100"),
        ({"methods": []}, "at least 1 item"),
        ({"alpha": 1.0}, "less than 1"),
        ({"seed": -1}, "greater than or equal to 0"),
        ({"se_kind_for_inference": {"rm": "hc"}}, "unselected RM"),
        ({"se_kind_for_inference": {"anova-post": "bootstrap"}}, "inference SE"),
        ({"methods": ["anova-pre"]}, "unknown method"),
    ],
)
def test_config_validation(update, message: str) -> None:
    """Test that invalid settings are rejected."""
    fields = {
        "scenario": _scenario(),
        "methods": ["anova-post"],
        "replications": 100,
    }
    fields.update(update)
    with pytest.raises((ValidationError, ValueError), match=message):
        MCConfig(**fields)


def test_replication_seeds_are_distinct() -> None:
    """Test that replications draw from different streams."""
    seeds = {_replication_seed(7, r) for r in range(1000)}
    assert len(seeds) == 1000
    assert _replication_seed(7, 0) == _replication_seed(7, 0)
    assert _replication_seed(7, 0) != _replication_seed(8, 0)


def test_run_summaries(config: MCConfig) -> None:
    """Test the structure and plausibility of the per-method summaries."""
    report = run_mc(config)
    assert report.replications == 100
    assert report.true_tau == -3.0
    assert [m["method"] for m in report.methods] == ["anova-post", "ancova-main"]

    ancova = report.summary("AncovaMain")
    assert ancova["failures"] == 0
    assert ancova["inference_se"] == "model"
    assert ancova["oracle_se"] == pytest.approx(math.sqrt(42.75 * 0.1))
    assert set(ancova["mean_se"]) == {"model", "hc", "inference"}
    assert ancova["mean_se"]["inference"] == ancova["mean_se"]["model"]
    assert ancova["bias"]["value"] == pytest.approx(
        ancova["mean_estimate"]["value"] + 3.0
    )
    assert ancova["empirical_sd"]["mcse"] == pytest.approx(
        ancova["empirical_sd"]["value"] / math.sqrt(198)
    )
    # five Monte Carlo SEs of slack on the bias
    assert abs(ancova["bias"]["value"]) < 5 * ancova["bias"]["mcse"]
    for kind in ("model", "hc", "inference"):
        assert 0.0 <= ancova["coverage"][kind]["value"] <= 1.0
        assert 0.7 <= ancova["calibration"][kind]["value"] <= 1.3

    post = report.summary(MethodId.ANOVA_POST)
    assert post["empirical_sd"]["value"] > ancova["empirical_sd"]["value"]
    with pytest.raises(KeyError):
        report.summary("rm")


def test_rate_mcse(config: MCConfig) -> None:
    """Test the binomial Monte Carlo SE of a coverage rate."""
    entry = run_mc(config).summary("anova-post")
    c = entry["coverage"]["model"]["value"]
    assert entry["coverage"]["model"]["mcse"] == pytest.approx(
        math.sqrt(c * (1 - c) / 100)
    )


def test_deterministic_across_workers(config: MCConfig) -> None:
    """Test that the report does not depend on the thread count."""
    serial = run_mc(config)
    threaded = run_mc(config.model_copy(update={"workers": 4}))
    assert serial.to_dict() == threaded.to_dict()


def test_heterogeneous_inference_and_oracle() -> None:
    """Test the robust inference SE and undefined oracle in a heterogeneous run."""
    cfg = MCConfig(
        scenario=_scenario("het-unbalanced"),
        methods=["ancova-interaction", "crm"],
        replications=100,
        seed=1,
    )
    report = run_mc(cfg)
    interaction = report.summary("ancova-interaction")
    assert interaction["inference_se"] == "adjusted_hc"
    assert set(interaction["mean_se"]) == {"model", "hc", "adjusted_hc", "inference"}
    assert interaction["oracle_se"] is not None
    assert report.summary("crm")["oracle_se"] is None


def test_inference_override() -> None:
    """Test that a configured SE flavor replaces the estimator's choice."""
    cfg = MCConfig(
        scenario=_scenario(),
        methods=["ancova-interaction"],
        replications=100,
        se_kind_for_inference={"ancova-interaction": "hc"},
    )
    entry = run_mc(cfg).summary("ancova-interaction")
    assert entry["inference_se"] == "hc"
    assert entry["mean_se"]["inference"] == entry["mean_se"]["hc"]


def test_override_without_se() -> None:
    """Test that inference from an SE a method lacks fails the run."""
    cfg = MCConfig(
        scenario=_scenario(),
        methods=["anova-post"],
        replications=100,
        se_kind_for_inference={"anova-post": "adjusted_hc"},
    )
    with pytest.raises(SimulationError, match="does not compute a adjusted_hc SE"):
        run_mc(cfg)


def test_too_many_failures(mocker, config: MCConfig) -> None:
    """Test that a method failing in more than 1% of replications aborts."""
    mocker.patch.object(
        AncovaMainEstimator, "_fit_impl", side_effect=NumericalError("singular")
    )
    with pytest.raises(SimulationError, match="AncovaMain failed in 100 of 100"):
        run_mc(config)


def test_report_outputs(config: MCConfig) -> None:
    """Test the JSON, CSV and table renderings."""
    report = run_mc(config)
    document = json.loads(report.to_json())
    assert document["scenario"] == "homogeneous"
    assert document["seed"] == 3
    assert len(document["methods"]) == 2

    buffer = io.StringIO()
    report.to_csv(buffer)
    buffer.seek(0)
    frame = pd.read_csv(buffer)
    assert len(frame) == 2
    assert "bias_value" in frame.columns
    assert "coverage_inference_value" in frame.columns

    assert report.to_table().row_count == 2
