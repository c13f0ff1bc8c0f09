"""Tests for configuration."""

import pytest

from prepost.config import AnalysisConfig
from prepost.exceptions import ConfigError


def test_defaults():
    """Test default configuration values."""
    config = AnalysisConfig()
    assert config.hc_kind == "HC2"
    assert config.alpha == 0.05
    assert config.reml_tol == 1e-8
    assert config.reml_max_iter == 100
    assert config.workers == 1
    assert config.log_level == "WARNING"


def test_from_env():
    """Test reading PREPOST_* variables."""
    config = AnalysisConfig.from_env(
        environ={
            "PREPOST_HC_KIND": "hc3",
            "PREPOST_ALPHA": "0.1",
            "PREPOST_REML_MAX_ITER": "250",
            "PREPOST_WORKERS": " 4 ",
            "PREPOST_LOG_LEVEL": "debug",
            "UNRELATED": "x",
        }
    )
    assert config.hc_kind == "HC3"
    assert config.alpha == 0.1
    assert config.reml_max_iter == 250
    assert config.workers == 4
    assert config.log_level == "DEBUG"
    assert config.reml_tol == 1e-8


def test_from_env_blank_uses_default():
    """Test that empty variables fall back to defaults."""
    config = AnalysisConfig.from_env(environ={"PREPOST_ALPHA": "  "})
    assert config.alpha == 0.05


def test_from_env_file(tmp_path):
    """Test reading a dotenv file with the environment taking precedence."""
    env_file = tmp_path / ".env"
    env_file.write_text("PREPOST_HC_KIND=HC0\nPREPOST_WORKERS=3\n", encoding="utf-8")

    config = AnalysisConfig.from_env(
        env_file=str(env_file), environ={"PREPOST_WORKERS": "2"}
    )
    assert config.hc_kind == "HC0"
    assert config.workers == 2


def test_from_env_process_environment(monkeypatch):
    """Test that os.environ is read when no mapping is given."""
    monkeypatch.setenv("PREPOST_REML_TOL", "1e-6")
    assert AnalysisConfig.from_env().reml_tol == 1e-6


def test_unparsable_value():
    """Test that a malformed value names its variable."""
    with pytest.raises(ConfigError, match="PREPOST_ALPHA: cannot parse 'lots'"):
        AnalysisConfig.from_env(environ={"PREPOST_ALPHA": "lots"})


@pytest.mark.parametrize(
    "fields,message",
    [
        ({"hc_kind": "HC4"}, "hc_kind must be one of"),
        ({"alpha": 0.0}, "alpha must lie in"),
        ({"reml_tol": 0.0}, "reml_tol must be positive"),
        ({"reml_max_iter": 0}, "reml_max_iter must be >= 1"),
        ({"workers": 0}, "workers must be >= 1"),
        ({"log_level": "LOUD"}, "log_level must be one of"),
    ],
)
def test_invalid_values(fields, message):
    """Test range validation."""
    with pytest.raises(ConfigError, match=message):
        AnalysisConfig(**fields)
