"""Tests for the command line interface."""

import json

import pytest

from prepost.cli import build_parser, run_cli
from prepost.config import AnalysisConfig
from prepost.data import parse_trial_csv, write_trial_csv
from prepost.logging import configure_logging
from prepost.simulation import generate_trial, preset
from prepost.theory import DesignSize

ENV_NAMES = ("HC_KIND", "ALPHA", "REML_TOL", "REML_MAX_ITER", "WORKERS", "LOG_LEVEL")


@pytest.fixture(autouse=True)
def reset_logging(monkeypatch):
    """Clear PREPOST_* variables and restore logging after each command."""
    for name in ENV_NAMES:
        monkeypatch.delenv(f"PREPOST_{name}", raising=False)
    yield
    configure_logging()


def _run(capsys, *argv):
    code = run_cli(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_parser_defaults_follow_config() -> None:
    """Test that configuration supplies flag defaults."""
    parser = build_parser(AnalysisConfig(hc_kind="HC0", alpha=0.1))
    args = parser.parse_args(["mc"])
    assert args.hc == "hc0"
    assert args.alpha == 0.1
    assert args.reps == 1000
    assert args.preset == "homogeneous"


def test_analyze_json(capsys, d4_csv) -> None:
    """Test the default JSON report of every method."""
    code, out, _ = _run(capsys, "analyze", "--input", d4_csv)
    assert code == 0
    document = json.loads(out)
    assert len(document["rows"]) == 7
    assert document["rows"][0]["estimate"] == pytest.approx(-1.0)
    assert document["dataset_summary"]["n0"] == 2


def test_analyze_csv_and_table(capsys, d4_csv) -> None:
    """Test the CSV and table formats."""
    code, out, _ = _run(capsys, "analyze", "--input", d4_csv, "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("method,estimate,se_model")
    assert len(lines) == 8

    code, out, _ = _run(capsys, "analyze", "--input", d4_csv, "--format", "table")
    assert code == 0
    assert "AnovaPost" in out
    assert "CrmGrouped" in out


def test_analyze_to_file(capsys, d4_csv, tmp_path) -> None:
    """Test writing the report and residuals to files."""
    out_path = tmp_path / "report.json"
    residuals_path = tmp_path / "residuals.json"
    code, out, _ = _run(
        capsys,
        "analyze",
        "--input",
        d4_csv,
        "--out",
        str(out_path),
        "--residuals",
        str(residuals_path),
    )
    assert code == 0
    assert out == ""
    assert len(json.loads(out_path.read_text())["rows"]) == 7
    residuals = json.loads(residuals_path.read_text())
    assert set(residuals) == {"ancova_main"}


def test_analyze_methods_and_mode(capsys, d4_csv) -> None:
    """Test method selection and the heterogeneous family."""
    code, out, _ = _run(
        capsys, "analyze", "--input", d4_csv, "--methods", "rm,anova-post"
    )
    assert code == 0
    assert [r["method"] for r in json.loads(out)["rows"]] == ["rm", "anova-post"]

    code, out, _ = _run(capsys, "analyze", "--input", d4_csv, "--mode", "heterogeneous")
    assert code == 0
    assert len(json.loads(out)["rows"]) == 3


def test_analyze_bootstrap(capsys, tmp_path) -> None:
    """Test bootstrap SEs from the command line."""
    cfg = preset("homogeneous").model_copy(update={"design": DesignSize(n0=12, n1=12)})
    path = tmp_path / "trial.csv"
    with open(path, "w", encoding="utf-8", newline="") as stream:
        write_trial_csv(generate_trial(cfg, seed=6), stream)
    code, out, _ = _run(
        capsys,
        "analyze",
        "--input",
        str(path),
        "--methods",
        "anova-post",
        "--bootstrap",
        "100",
        "--seed",
        "4",
    )
    assert code == 0
    assert json.loads(out)["rows"][0]["se_bootstrap"] is not None


@pytest.mark.parametrize(
    "extra,message",
    [
        (["--bootstrap", "50"], "--bootstrap must be at least 100"),
        (["--seed", "-1"], "--seed must be non-negative"),
        (["--hc", "hc9"], "invalid choice"),
        (["--methods", "anova"], "unknown method"),
        (["--workers", "0"], "--workers must be at least 1"),
    ],
)
def test_analyze_usage_errors(capsys, d4_csv, extra, message) -> None:
    """Test that invalid flags exit with status 1."""
    code, out, err = _run(capsys, "analyze", "--input", d4_csv, *extra)
    assert code == 1
    assert out == ""
    assert err.startswith("prepost: error:")
    assert message in err


def test_missing_required_flag(capsys) -> None:
    """Test that analyze needs an input file."""
    code, _, err = _run(capsys, "analyze")
    assert code == 1
    assert "--input" in err


def test_missing_input_file(capsys, tmp_path) -> None:
    """Test that an unreadable file exits with status 2."""
    code, _, err = _run(capsys, "analyze", "--input", str(tmp_path / "nope.csv"))
    assert code == 2
    assert "prepost: error:" in err


def test_invalid_data(capsys, tmp_path) -> None:
    """Test that invalid data exits with status 2 and names the row."""
    path = tmp_path / "bad.csv"
    path.write_text(
        "subject_id,arm,y_pre,y_post\na,0,1,2\nb,0,3,4\nc,2,2,1\nd,1,4,3\ne,1,5,5\n",
        encoding="utf-8",
    )
    code, _, err = _run(capsys, "analyze", "--input", str(path))
    assert code == 2
    assert "row 3" in err


def test_simulate_is_reproducible(capsys, tmp_path) -> None:
    """Test that simulate writes byte-identical files for the same seed."""
    first = tmp_path / "a.csv"
    second = tmp_path / "b.csv"
    for path in (first, second):
        code, _, _ = _run(
            capsys,
            "simulate",
            "--preset",
            "HetUnbalanced",
            "--seed",
            "9",
            "--out",
            str(path),
        )
        assert code == 0
    assert first.read_bytes() == second.read_bytes()

    ds = parse_trial_csv(str(first))
    expected = generate_trial(preset("het-unbalanced"), seed=9)
    assert (ds.n0, ds.n1) == (60, 120)
    assert list(ds.y_post) == list(expected.y_post)


def test_simulate_stdout_and_sizes(capsys) -> None:
    """Test arm size overrides on stdout output."""
    code, out, _ = _run(capsys, "simulate", "--n0", "3", "--n1", "4")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "subject_id,arm,y_pre,y_post"
    assert len(lines) == 8


@pytest.mark.parametrize(
    "extra,message",
    [
        (["--n0", "10"], "--n0 and --n1 must be given together"),
        (["--n0", "1", "--n1", "5"], "must be at least 2"),
        (["--preset", "nope"], "Unknown preset"),
        (["--seed", "-3"], "--seed must be non-negative"),
    ],
)
def test_simulate_usage_errors(capsys, extra, message) -> None:
    """Test scenario flag validation."""
    code, _, err = _run(capsys, "simulate", *extra)
    assert code == 1
    assert message in err


def test_mc(capsys) -> None:
    """Test a small Monte Carlo run."""
    code, out, _ = _run(
        capsys,
        "mc",
        "--n0",
        "20",
        "--n1",
        "20",
        "--reps",
        "100",
        "--methods",
        "ancova-main,anova-post",
        "--seed",
        "2",
    )
    assert code == 0
    document = json.loads(out)
    assert document["replications"] == 100
    assert [m["method"] for m in document["methods"]] == ["ancova-main", "anova-post"]


@pytest.mark.parametrize(
    "extra,message",
    [
        (["--reps", "10"], "--reps must be at least 100"),
        (["--alpha", "1.5"], "--alpha must lie in (0, 1)"),
    ],
)
def test_mc_usage_errors(capsys, extra, message) -> None:
    """Test Monte Carlo flag validation."""
    code, _, err = _run(capsys, "mc", *extra)
    assert code == 1
    assert message in err


def test_compare_json(capsys) -> None:
    """Test the oracle comparison document."""
    code, out, _ = _run(capsys, "compare")
    assert code == 0
    document = json.loads(out)
    assert document["mode"] == "homogeneous"
    assert document["true_tau"] == -3.0
    assert document["crossover_correlation"] == pytest.approx(14.0 / 30.0)
    rows = {r["method"]: r for r in document["rows"]}
    assert set(rows) == {"anova-post", "ancova-main", "anova-change", "rm", "crm"}
    assert rows["anova-post"]["variance"] == pytest.approx(5.0)
    assert rows["ancova-main"]["variance"] == pytest.approx(0.95)


def test_compare_heterogeneous(capsys) -> None:
    """Test the comparison of an unbalanced heterogeneous scenario."""
    code, out, _ = _run(capsys, "compare", "--preset", "het-unbalanced")
    assert code == 0
    document = json.loads(out)
    assert document["crossover_correlation"] is None
    rows = {r["method"]: r for r in document["rows"]}
    assert rows["ancova-interaction"]["variance"] == pytest.approx(1.71875)
    assert rows["ancova-main"]["variance"] == pytest.approx(1.74375)
    assert rows["ancova-interaction"]["gap_to_best"] == 0.0


def test_compare_csv_and_table(capsys) -> None:
    """Test the comparison in CSV and table formats."""
    code, out, _ = _run(capsys, "compare", "--format", "csv")
    assert code == 0
    assert out.splitlines()[0] == "method,variance,se,gap_to_best,note"

    code, out, _ = _run(capsys, "compare", "--format", "table")
    assert code == 0
    assert "Oracle variances" in out
    assert "AncovaMain" in out


def test_environment_configuration(capsys, monkeypatch, d4_csv) -> None:
    """Test that PREPOST_* variables set defaults."""
    monkeypatch.setenv("PREPOST_HC_KIND", "HC3")
    code, out, _ = _run(capsys, "analyze", "--input", d4_csv, "--methods", "anova-post")
    assert code == 0
    assert json.loads(out)["rows"][0]["hc_kind"] == "HC3"


def test_invalid_environment(capsys, monkeypatch) -> None:
    """Test that a malformed variable is a usage error."""
    monkeypatch.setenv("PREPOST_ALPHA", "abc")
    code, _, err = _run(capsys, "compare")
    assert code == 1
    assert "PREPOST_ALPHA" in err


def test_no_command(capsys) -> None:
    """Test that a command is required."""
    code, _, err = _run(capsys)
    assert code == 1
    assert "prepost: error:" in err


def test_help(capsys) -> None:
    """Test that --help exits successfully."""
    code, out, _ = _run(capsys, "--help")
    assert code == 0
    assert "analyze" in out
