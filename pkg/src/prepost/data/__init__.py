"""Trial data ingestion, validation and summaries."""

from .base import (
    ArmStats,
    PercentChangeSummary,
    SubjectRecord,
    SufficientStats,
    TrialDataset,
)
from .io import parse_trial_csv, to_long_format, write_trial_csv
from .summary import (
    change_scores,
    percent_change,
    percent_change_summary,
    sufficient_stats,
)

__all__ = [
    "ArmStats",
    "PercentChangeSummary",
    "SubjectRecord",
    "SufficientStats",
    "TrialDataset",
    "parse_trial_csv",
    "write_trial_csv",
    "to_long_format",
    "change_scores",
    "percent_change",
    "percent_change_summary",
    "sufficient_stats",
]
