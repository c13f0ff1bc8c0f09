"""prepost - Treatment-effect analysis of two-arm randomized pre-post trials."""

from .config import AnalysisConfig
from .data import SubjectRecord, TrialDataset, parse_trial_csv, write_trial_csv
from .estimators import (
    AnalysisResult,
    BaseEstimator,
    ComparisonReport,
    EstimatorFactory,
    MethodId,
    analyze_all,
)
from .exceptions import (
    BootstrapError,
    ConfigError,
    ConvergenceError,
    EstimationError,
    ModeMismatchError,
    NumericalError,
    PrepostError,
    SimulationError,
    TrialDataError,
    UsageError,
)
from .logging import configure_logging
from .resampling import BootstrapResult, bootstrap_se
from .simulation import (
    MCConfig,
    MCReport,
    ScenarioConfig,
    generate_trial,
    preset,
    run_mc,
)
from .theory import DesignSize, PopulationParams, true_unconditional_variance

# Configure default logging
configure_logging()

__version__ = "0.1.0"

__all__ = [
    "AnalysisConfig",
    "configure_logging",
    "SubjectRecord",
    "TrialDataset",
    "parse_trial_csv",
    "write_trial_csv",
    "AnalysisResult",
    "BaseEstimator",
    "ComparisonReport",
    "EstimatorFactory",
    "MethodId",
    "analyze_all",
    "BootstrapResult",
    "bootstrap_se",
    "DesignSize",
    "PopulationParams",
    "true_unconditional_variance",
    "MCConfig",
    "MCReport",
    "ScenarioConfig",
    "generate_trial",
    "preset",
    "run_mc",
    "PrepostError",
    "ConfigError",
    "UsageError",
    "TrialDataError",
    "NumericalError",
    "EstimationError",
    "ConvergenceError",
    "ModeMismatchError",
    "BootstrapError",
    "SimulationError",
]
