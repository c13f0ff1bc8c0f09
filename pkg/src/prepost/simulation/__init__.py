"""Synthetic trials and Monte Carlo evaluation."""

from .montecarlo import MCConfig, MCReport, run_mc
from .scenarios import PRESET_NAMES, ScenarioConfig, generate_trial, preset

__all__ = [
    "MCConfig",
    "MCReport",
    "PRESET_NAMES",
    "ScenarioConfig",
    "generate_trial",
    "preset",
    "run_mc",
]
