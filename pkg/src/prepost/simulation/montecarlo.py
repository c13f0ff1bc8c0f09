"""Monte Carlo evaluation of the estimators on simulated trials."""

import copy
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import IO, Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from rich.table import Table

from ..estimators.base import AnalysisResult, BaseEstimator, MethodId
from ..estimators.factory import EstimatorFactory
from ..estimators.report import finite_or_none
from ..exceptions import ModeMismatchError, PrepostError, SimulationError
from ..kernel.distributions import student_t_quantile
from ..theory.variance import true_unconditional_variance
from ..types import (
    HCKind,
    MCMethodSummaryDict,
    MCReportDict,
    SEKind,
    SummaryWithErrorDict,
)
from ..validation import MC_REPORT_SCHEMA, validate_document
from .scenarios import ScenarioConfig, generate_trial

logger = logging.getLogger(__name__)

MIN_REPLICATIONS = 100
MAX_FAILURE_RATE = 0.01

# SE flavors summarized per method; "inference" is the one driving the test
SUMMARY_SE_KINDS = ("model", "hc", "adjusted_hc", "inference")

_INFERENCE_KINDS = ("model", "hc", "adjusted_hc")


class MCConfig(BaseModel):
    """Settings of a Monte Carlo run.

    Attributes:
        scenario: Scenario to simulate
        methods: Methods fitted on every replication
        replications: Number of simulated trials R
        seed: Root seed; replication r uses a stream derived from (seed, r)
        alpha: Test level; intervals have coverage 1 - alpha
        se_kind_for_inference: Per-method SE flavor overriding the
            estimator's own choice
        hc_kind: Sandwich flavor for the HC standard errors
        workers: Threads running replications
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    scenario: ScenarioConfig
    methods: List[MethodId] = Field(min_length=1)
    replications: int = Field(ge=MIN_REPLICATIONS)
    seed: int = Field(default=0, ge=0)
    alpha: float = Field(default=0.05, gt=0, lt=1)
    se_kind_for_inference: Dict[MethodId, SEKind] = Field(default_factory=dict)
    hc_kind: HCKind = "HC2"
    workers: int = Field(default=1, ge=1)

    @field_validator("methods", mode="before")
    @classmethod
    def _parse_methods(cls, value: Any) -> Any:
        if isinstance(value, (list, tuple)):
            return [MethodId.parse(m) for m in value]
        return value

    @field_validator("se_kind_for_inference", mode="before")
    @classmethod
    def _parse_overrides(cls, value: Any) -> Any:
        if isinstance(value, dict):
            return {MethodId.parse(k): v for k, v in value.items()}
        return value

    @model_validator(mode="after")
    def _check_overrides(self) -> "MCConfig":
        for method, kind in self.se_kind_for_inference.items():
            if kind not in _INFERENCE_KINDS:
                raise ValueError(
                    f"{method.label}: inference SE must be one of "
                    f"{', '.join(_INFERENCE_KINDS)}, got {kind!r}"
                )
            if method not in self.methods:
                raise ValueError(f"inference SE set for unselected {method.label}")
        return self


@dataclass(frozen=True)
class _Draw:
    """What one replication keeps of one method's fit."""

    estimate: float
    df: float
    se: Dict[str, Optional[float]]
    inference: SEKind


def _summary(value: Optional[float], mcse: Optional[float]) -> SummaryWithErrorDict:
    return {"value": finite_or_none(value), "mcse": finite_or_none(mcse)}


def _mean(values: np.ndarray) -> float:
    return math.fsum(values) / len(values)


def _sd(values: np.ndarray) -> float:
    if len(values) < 2:
        return math.nan
    mean = _mean(values)
    return math.sqrt(math.fsum((values - mean) ** 2) / (len(values) - 1))


def _rate(hits: np.ndarray) -> SummaryWithErrorDict:
    c = _mean(hits.astype(float))
    return {"value": c, "mcse": math.sqrt(c * (1.0 - c) / len(hits))}


@dataclass
class MCReport:
    """Per-method Monte Carlo summaries of one scenario.

    Attributes:
        scenario: Scenario label
        true_tau: True treatment effect of the scenario
        replications: Number of simulated trials
        seed: Root seed
        alpha: Test level
        methods: One summary per method, in configuration order
    """

    scenario: str
    true_tau: float
    replications: int
    seed: int
    alpha: float
    methods: List[MCMethodSummaryDict]

    def summary(self, method: Any) -> MCMethodSummaryDict:
        """Summary of the given method.

        Raises:
            KeyError: If the method was not run
        """
        name = MethodId.parse(method).value
        for entry in self.methods:
            if entry["method"] == name:
                return entry
        raise KeyError(name)

    def to_dict(self) -> MCReportDict:
        return copy.deepcopy(self._document())

    def _document(self) -> MCReportDict:
        return {
            "scenario": self.scenario,
            "true_tau": self.true_tau,
            "replications": self.replications,
            "seed": self.seed,
            "alpha": self.alpha,
            "methods": self.methods,
        }

    def to_json(self, indent: Optional[int] = 2) -> str:
        """Validated JSON text of the report."""
        document = self.to_dict()
        validate_document(dict(document), MC_REPORT_SCHEMA)
        return json.dumps(document, indent=indent, allow_nan=False)

    def to_frame(self) -> pd.DataFrame:
        """One flat row per method; nested summaries become ``a_b_value``."""
        return pd.json_normalize(self.to_dict()["methods"], sep="_")

    def to_csv(self, stream: IO[str]) -> None:
        self.to_frame().to_csv(stream, index=False, lineterminator="\n")

    def to_table(self) -> Table:
        """Rich table of the key summaries."""
        level = round(100 * (1 - self.alpha))
        table = Table(
            title=(
                f"Monte Carlo: {self.scenario}, R={self.replications}, "
                f"true tau={self.true_tau:g}"
            )
        )
        table.add_column("Method")
        for header in (
            "Bias",
            "Emp. SD",
            "Oracle SE",
            "Mean SE",
            "SE/SD",
            f"{level}% coverage",
            "Rejection",
            "Fail",
        ):
            table.add_column(header, justify="right")

        def fmt(value: Optional[float], digits: int = 4) -> str:
            return "-" if value is None else f"{value:.{digits}f}"

        for entry in self.methods:
            kind = "inference"
            table.add_row(
                f"{MethodId.parse(entry['method']).label} ({entry['inference_se']})",
                fmt(entry["bias"]["value"]),
                fmt(entry["empirical_sd"]["value"]),
                fmt(entry["oracle_se"]),
                fmt(entry["mean_se"][kind]["value"]),
                fmt(entry["calibration"][kind]["value"], 3),
                fmt(entry["coverage"][kind]["value"], 3),
                fmt(entry["rejection"][kind]["value"], 3),
                str(entry["failures"]),
            )
        return table


def _draw(result: AnalysisResult, inference_kind: SEKind) -> _Draw:
    se: Dict[str, Optional[float]] = {
        "model": result.se_model,
        "hc": result.se_hc,
        "adjusted_hc": result.se_adjusted_hc,
    }
    se["inference"] = se[inference_kind]
    if se["inference"] is None:
        raise SimulationError(
            f"{result.method.label} does not compute a {inference_kind} SE"
        )
    return _Draw(
        estimate=result.estimate, df=result.df, se=se, inference=inference_kind
    )


def _replication_seed(seed: int, r: int) -> int:
    return int(np.random.SeedSequence([seed, r]).generate_state(1)[0])


def _summarize(
    method: MethodId,
    draws: Sequence[Optional[_Draw]],
    inference_kind: SEKind,
    true_tau: float,
    alpha: float,
    oracle_se: Optional[float],
) -> MCMethodSummaryDict:
    ok = [d for d in draws if d is not None]
    failures = len(draws) - len(ok)
    m = len(ok)
    estimates = np.array([d.estimate for d in ok], dtype=float)
    quantiles = np.array(
        [student_t_quantile(1.0 - alpha / 2.0, d.df) for d in ok], dtype=float
    )

    mean_est = _mean(estimates)
    sd_est = _sd(estimates)
    est_mcse = sd_est / math.sqrt(m)
    sd_mcse = sd_est / math.sqrt(2.0 * (m - 1))

    mean_se: Dict[str, SummaryWithErrorDict] = {}
    calibration: Dict[str, SummaryWithErrorDict] = {}
    coverage: Dict[str, SummaryWithErrorDict] = {}
    rejection: Dict[str, SummaryWithErrorDict] = {}
    for kind in SUMMARY_SE_KINDS:
        values = [d.se[kind] for d in ok]
        if any(v is None for v in values):
            continue
        ses = np.array(values, dtype=float)
        avg = _mean(ses)
        avg_mcse = _sd(ses) / math.sqrt(m)
        mean_se[kind] = _summary(avg, avg_mcse)
        if sd_est > 0.0:
            ratio = avg / sd_est
            rel = (avg_mcse / avg) ** 2 if avg > 0.0 else 0.0
            ratio_mcse = ratio * math.sqrt(rel + (sd_mcse / sd_est) ** 2)
            calibration[kind] = _summary(ratio, ratio_mcse)
        else:
            calibration[kind] = _summary(None, None)
        half = quantiles * ses
        coverage[kind] = _rate(np.abs(estimates - true_tau) <= half)
        rejection[kind] = _rate(np.abs(estimates) > half)

    return {
        "method": method.value,
        "replications": m,
        "failures": failures,
        "mean_estimate": _summary(mean_est, est_mcse),
        "bias": _summary(mean_est - true_tau, est_mcse),
        "empirical_sd": _summary(sd_est, sd_mcse),
        "mean_se": mean_se,
        "calibration": calibration,
        "coverage": coverage,
        "rejection": rejection,
        "inference_se": inference_kind,
        "oracle_se": oracle_se,
    }


def run_mc(cfg: MCConfig) -> MCReport:
    """Simulate R trials and summarize every configured method.

    Replication r draws its trial from a seed derived from ``(cfg.seed, r)``
    and summaries use compensated sums over replication order, so the report
    does not depend on ``cfg.workers``.

    Args:
        cfg: Run settings

    Returns:
        MCReport: Per-method summaries

    Raises:
        SimulationError: If more than 1% of a method's replications fail
    """
    scenario = cfg.scenario
    heterogeneous = scenario.params.mode == "heterogeneous"
    estimators: List[Tuple[BaseEstimator, Optional[SEKind]]] = []
    for method in cfg.methods:
        estimator = EstimatorFactory.create(
            method, hc_kind=cfg.hc_kind, heterogeneous=heterogeneous
        )
        estimators.append((estimator, cfg.se_kind_for_inference.get(method)))

    def replicate(r: int) -> List[Optional[_Draw]]:
        ds = generate_trial(scenario, _replication_seed(cfg.seed, r))
        out: List[Optional[_Draw]] = []
        for estimator, override in estimators:
            try:
                result = estimator.fit(ds)
            except SimulationError:
                raise
            except PrepostError as e:
                logger.debug(f"Replication {r}: {estimator.method.label} failed: {e}")
                out.append(None)
                continue
            out.append(_draw(result, override or result.inference_se))
        return out

    logger.info(
        f"Monte Carlo {scenario.label}: R={cfg.replications}, "
        f"methods={','.join(m.value for m in cfg.methods)}"
    )
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            rows = list(pool.map(replicate, range(cfg.replications)))
    else:
        rows = [replicate(r) for r in range(cfg.replications)]

    summaries: List[MCMethodSummaryDict] = []
    for i, (estimator, override) in enumerate(estimators):
        method = estimator.method
        draws = [row[i] for row in rows]
        failures = sum(d is None for d in draws)
        if failures > MAX_FAILURE_RATE * cfg.replications:
            raise SimulationError(
                f"{method.label} failed in {failures} of {cfg.replications} "
                "replications"
            )
        kind = next(d.inference for d in draws if d is not None)
        try:
            oracle: Optional[float] = math.sqrt(
                true_unconditional_variance(method, scenario.params, scenario.design)
            )
        except ModeMismatchError:
            oracle = None
        summaries.append(
            _summarize(method, draws, kind, scenario.true_tau, cfg.alpha, oracle)
        )

    return MCReport(
        scenario=scenario.label,
        true_tau=scenario.true_tau,
        replications=cfg.replications,
        seed=cfg.seed,
        alpha=cfg.alpha,
        methods=summaries,
    )
