"""Descriptive statistics and derived endpoints of a trial dataset."""

import logging
import math
from typing import Union

import numpy as np

from ..exceptions import TrialDataError
from .base import ArmStats, PercentChangeSummary, SufficientStats, TrialDataset

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]


def _fmean(values: np.ndarray) -> float:
    return math.fsum(values) / len(values)


def _arm_stats(pre: np.ndarray, post: np.ndarray) -> ArmStats:
    mean_pre = _fmean(pre)
    mean_post = _fmean(post)
    d_pre = pre - mean_pre
    d_post = post - mean_post
    return ArmStats(
        n=len(pre),
        mean_pre=mean_pre,
        mean_post=mean_post,
        ss_pre=math.fsum(d_pre * d_pre),
        ss_post=math.fsum(d_post * d_post),
        sp_cross=math.fsum(d_pre * d_post),
    )


def sufficient_stats(ds: TrialDataset) -> SufficientStats:
    """Compute per-arm and overall sufficient statistics.

    Sums are accumulated with ``math.fsum`` so the result does not depend on
    record order.

    Args:
        ds: Trial dataset

    Returns:
        SufficientStats: The statistics
    """
    arms = []
    for j in (0, 1):
        idx = ds.arm_indices(j)
        arms.append(_arm_stats(ds.y_pre[idx], ds.y_post[idx]))

    n = len(ds)
    grand_mean = _fmean(ds.y_pre)
    dev = ds.y_pre - grand_mean
    var_pre = math.fsum(dev * dev) / (n - 1)

    return SufficientStats(
        control=arms[0],
        treatment=arms[1],
        grand_mean_pre=grand_mean,
        var_pre=var_pre,
        p0=ds.n0 / n,
        p1=ds.n1 / n,
    )


def change_scores(ds: TrialDataset) -> np.ndarray:
    """Per-subject change from baseline, in record order."""
    return ds.y_post - ds.y_pre


def percent_change(y_pre: ArrayLike, y_post: ArrayLike) -> ArrayLike:
    """Fractional change from baseline, per subject or elementwise.

    Args:
        y_pre: Baseline outcome(s), must be nonzero
        y_post: Follow-up outcome(s)

    Returns:
        (y_post - y_pre) / y_pre

    Raises:
        ZeroDivisionError: If a scalar y_pre is zero
    """
    return (y_post - y_pre) / y_pre


def percent_change_summary(ds: TrialDataset) -> PercentChangeSummary:
    """Summarize the percent change from baseline per arm.

    Args:
        ds: Trial dataset with nonzero baselines

    Returns:
        PercentChangeSummary: Arm means and their difference, flagged
        descriptive-only

    Raises:
        TrialDataError: If a subject has a zero baseline
    """
    zero = np.flatnonzero(ds.y_pre == 0.0)
    if zero.size:
        i = int(zero[0])
        raise TrialDataError(
            f"subject {ds.subject_ids[i]!r} has a zero baseline; "
            "percent change is undefined",
            row=i + 1,
            column="y_pre",
        )

    phi = percent_change(ds.y_pre, ds.y_post)
    phi0 = _fmean(phi[ds.arm == 0])
    phi1 = _fmean(phi[ds.arm == 1])
    return PercentChangeSummary(
        mean_pct_change_control=phi0,
        mean_pct_change_treatment=phi1,
        tau_star=phi1 - phi0,
    )
