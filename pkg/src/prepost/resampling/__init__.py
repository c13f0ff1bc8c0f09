"""Resampling-based standard errors."""

from .bootstrap import BootstrapResult, bootstrap_se

__all__ = ["BootstrapResult", "bootstrap_se"]
