"""Configuration module for prepost-analysis."""

import os
from dataclasses import dataclass
from typing import Callable, Dict, Mapping, Optional, TypeVar

from dotenv import dotenv_values

from ..exceptions import ConfigError

HC_KINDS = ("HC0", "HC1", "HC2", "HC3")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")

ENV_PREFIX = "PREPOST_"

T = TypeVar("T")


@dataclass(frozen=True)
class AnalysisConfig:
    """Defaults shared by the library entry points and the command line.

    Attributes:
        hc_kind (str): Sandwich estimator flavor used for se_hc
        alpha (float): Two-sided significance level for tests and intervals
        reml_tol (float): Convergence tolerance of the REML covariance iteration
        reml_max_iter (int): Iteration cap of the REML covariance iteration
        workers (int): Thread count for bootstrap and Monte Carlo replication
        log_level (str): Level passed to configure_logging by the command line
    """

    hc_kind: str = "HC2"
    alpha: float = 0.05
    reml_tol: float = 1e-8
    reml_max_iter: int = 100
    workers: int = 1
    log_level: str = "WARNING"

    def __post_init__(self) -> None:
        """Validate field ranges.

        Raises:
            ConfigError: If any field is out of range
        """
        if self.hc_kind not in HC_KINDS:
            raise ConfigError(
                f"hc_kind must be one of {', '.join(HC_KINDS)}, got {self.hc_kind!r}"
            )
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not self.reml_tol > 0.0:
            raise ConfigError(f"reml_tol must be positive, got {self.reml_tol}")
        if self.reml_max_iter < 1:
            raise ConfigError(f"reml_max_iter must be >= 1, got {self.reml_max_iter}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if self.log_level not in LOG_LEVELS:
            raise ConfigError(f"log_level must be one of {', '.join(LOG_LEVELS)}")

    @classmethod
    def from_env(
        cls,
        env_file: Optional[str] = None,
        environ: Optional[Mapping[str, str]] = None,
    ) -> "AnalysisConfig":
        """Build a configuration from PREPOST_* environment variables.

        Values from ``env_file`` (a dotenv file) are read first; the process
        environment takes precedence over them.

        Args:
            env_file: Optional path of a .env file
            environ: Environment mapping, defaults to os.environ

        Returns:
            AnalysisConfig: The resolved configuration

        Raises:
            ConfigError: If a variable cannot be parsed or is out of range
        """
        values: Dict[str, str] = {}
        if env_file is not None:
            values.update(
                {k: v for k, v in dotenv_values(env_file).items() if v is not None}
            )
        values.update(os.environ if environ is None else environ)

        defaults = cls()
        return cls(
            hc_kind=_read(values, "HC_KIND", str.upper, defaults.hc_kind),
            alpha=_read(values, "ALPHA", float, defaults.alpha),
            reml_tol=_read(values, "REML_TOL", float, defaults.reml_tol),
            reml_max_iter=_read(values, "REML_MAX_ITER", int, defaults.reml_max_iter),
            workers=_read(values, "WORKERS", int, defaults.workers),
            log_level=_read(values, "LOG_LEVEL", str.upper, defaults.log_level),
        )


def _read(
    values: Mapping[str, str], name: str, parse: Callable[[str], T], default: T
) -> T:
    raw = values.get(ENV_PREFIX + name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return parse(raw.strip())
    except ValueError as e:
        raise ConfigError(f"{ENV_PREFIX}{name}: cannot parse {raw!r}") from e


__all__ = ["AnalysisConfig", "HC_KINDS", "LOG_LEVELS", "ENV_PREFIX"]
