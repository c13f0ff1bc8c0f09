"""Stratified nonparametric bootstrap standard errors."""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Optional, Tuple, Union

import numpy as np

from ..data.base import TrialDataset
from ..estimators.base import BaseEstimator, MethodId
from ..estimators.factory import EstimatorFactory
from ..exceptions import BootstrapError, PrepostError

logger = logging.getLogger(__name__)

MIN_REPLICATES = 100


@dataclass(frozen=True)
class BootstrapResult:
    """Bootstrap standard error of one estimator.

    Attributes:
        se: Standard deviation of the replicate estimates (divisor B - 1)
        replicates: Number of replicates B
        percentile_ci95: 2.5% and 97.5% percentiles of the replicate estimates
        seed: Seed the replicate streams derive from
        redraws: Number of failed resamples that were redrawn
    """

    se: float
    replicates: int
    percentile_ci95: Optional[Tuple[float, float]]
    seed: int
    redraws: int = 0


def _resample_indices(
    rng: np.random.Generator, arm_indices: Tuple[np.ndarray, np.ndarray]
) -> np.ndarray:
    # with replacement inside each arm, arm sizes preserved
    return np.concatenate(
        [idx[rng.integers(0, len(idx), size=len(idx))] for idx in arm_indices]
    )


def _replicate(
    ds: TrialDataset,
    estimator: BaseEstimator,
    arm_indices: Tuple[np.ndarray, np.ndarray],
    seed: int,
    index: int,
    max_redraws: int,
) -> Tuple[float, int]:
    attempt = 0
    while True:
        key = [seed, index] if attempt == 0 else [seed, index, attempt]
        rng = np.random.default_rng(np.random.SeedSequence(key))
        resample = ds.take(_resample_indices(rng, arm_indices))
        try:
            return estimator.fit(resample).estimate, attempt
        except PrepostError as e:
            attempt += 1
            logger.debug(f"Bootstrap replicate {index} failed ({e}); redraw {attempt}")
            if attempt > max_redraws:
                raise BootstrapError(
                    f"{estimator.method.label}: more than {max_redraws} failed "
                    "bootstrap resamples; dataset too degenerate"
                ) from e


def bootstrap_se(
    ds: TrialDataset,
    method: Union[str, MethodId],
    B: int,
    seed: int,
    workers: int = 1,
    **estimator_options: Any,
) -> BootstrapResult:
    """Bootstrap the SE of a method by stratified resampling.

    Replicate b draws from ``SeedSequence([seed, b])``; a failed resample is
    redrawn from ``SeedSequence([seed, b, attempt])``, so the result does not
    depend on ``workers``.

    Args:
        ds: Trial dataset
        method: Method to bootstrap
        B: Number of replicates, at least 100
        seed: Non-negative seed
        workers: Thread count
        **estimator_options: Passed to the estimator constructor

    Returns:
        BootstrapResult: SE, percentile interval and redraw count

    Raises:
        ValueError: If B < 100 or seed is negative
        BootstrapError: If more than B/10 resamples fail
    """
    if B < MIN_REPLICATES:
        raise ValueError(
            f"bootstrap needs at least {MIN_REPLICATES} replicates, got {B}"
        )
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")

    estimator = EstimatorFactory.create(method, **estimator_options)
    arm_indices = (ds.arm_indices(0), ds.arm_indices(1))
    max_redraws = B // 10

    def run(b: int) -> Tuple[float, int]:
        return _replicate(ds, estimator, arm_indices, seed, b, max_redraws)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run, range(B)))
    else:
        outcomes = [run(b) for b in range(B)]

    redraws = sum(r for _, r in outcomes)
    if redraws > max_redraws:
        raise BootstrapError(
            f"{estimator.method.label}: {redraws} of {B} bootstrap resamples failed; "
            "dataset too degenerate"
        )

    estimates = np.array([e for e, _ in outcomes], dtype=float)
    mean = math.fsum(estimates) / B
    se = math.sqrt(math.fsum((estimates - mean) ** 2) / (B - 1))
    low, high = np.percentile(estimates, [2.5, 97.5])
    logger.debug(
        f"Bootstrap {estimator.method.label}: B={B}, se={se:.6g}, redraws={redraws}"
    )
    return BootstrapResult(
        se=se,
        replicates=B,
        percentile_ci95=(float(low), float(high)),
        seed=seed,
        redraws=redraws,
    )
