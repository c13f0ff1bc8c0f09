"""Side-by-side comparison of all methods on one dataset."""

import copy
import json
import logging
import math
from dataclasses import dataclass, field
from typing import IO, Any, Dict, List, Optional, Sequence, Union

import pandas as pd
from rich.table import Table

from ..data.base import TrialDataset
from ..data.summary import percent_change_summary, sufficient_stats
from ..exceptions import PrepostError
from ..resampling.bootstrap import bootstrap_se
from ..types import (
    ArmResidualsDict,
    ArmSummaryDict,
    ComparisonReportDict,
    DatasetSummaryDict,
    HCKind,
    PercentChangeDict,
    PopulationMode,
    ReportRowDict,
)
from ..validation import COMPARISON_REPORT_SCHEMA, validate_document
from .base import AnalysisResult, GlsCovEstimate, MethodId
from .factory import EstimatorFactory, resolve_methods

logger = logging.getLogger(__name__)

CSV_COLUMNS = [
    "method",
    "estimate",
    "se_model",
    "se_hc",
    "se_adjusted_hc",
    "se_bootstrap",
    "df",
    "t",
    "p",
    "ci95",
    "inference_se",
    "hc_kind",
    "error",
]

_TABLE_HEADERS = (
    "Estimate",
    "SE model",
    "SE HC",
    "SE adj. HC",
    "SE boot",
    "df",
    "p",
    "95% CI",
)

_RESIDUAL_KEYS = {
    MethodId.ANCOVA_MAIN: "ancova_main",
    MethodId.ANCOVA_INTERACTION: "ancova_interaction",
}


def finite_or_none(value: Optional[float]) -> Optional[float]:
    """Map NaN and infinities to None so documents stay valid JSON."""
    if value is None:
        return None
    value = float(value)
    return value if math.isfinite(value) else None


def _serialize_nuisance(nuisance: Dict[str, Any]) -> Dict[str, Any]:
    out: Dict[str, Any] = {}
    for key, value in nuisance.items():
        if isinstance(value, GlsCovEstimate):
            out[key] = value.to_dict()
        else:
            out[key] = finite_or_none(value)
    return out


def result_row(result: AnalysisResult) -> ReportRowDict:
    """Serialize an analysis result as a report row."""
    return {
        "method": result.method.value,
        "estimate": finite_or_none(result.estimate),
        "se_model": finite_or_none(result.se_model),
        "se_hc": finite_or_none(result.se_hc),
        "se_adjusted_hc": finite_or_none(result.se_adjusted_hc),
        "se_bootstrap": finite_or_none(result.se_bootstrap),
        "df": finite_or_none(result.df),
        "t": finite_or_none(result.t_stat),
        "p": finite_or_none(result.p_value),
        "ci95": [finite_or_none(result.ci95[0]), finite_or_none(result.ci95[1])],
        "inference_se": result.inference_se,
        "hc_kind": result.hc_kind,
        "nuisance": _serialize_nuisance(result.nuisance),
        "error": None,
    }


def error_row(method: MethodId, message: str) -> ReportRowDict:
    """Report row of a method that failed on the dataset."""
    return {
        "method": method.value,
        "estimate": None,
        "se_model": None,
        "se_hc": None,
        "se_adjusted_hc": None,
        "se_bootstrap": None,
        "df": None,
        "t": None,
        "p": None,
        "ci95": None,
        "inference_se": None,
        "hc_kind": None,
        "nuisance": {},
        "error": message,
    }


def dataset_summary(ds: TrialDataset) -> DatasetSummaryDict:
    """Descriptive block of a report, including the percent-change endpoint."""
    stats = sufficient_stats(ds)

    def arm_summary(j: int) -> ArmSummaryDict:
        arm = stats.arm(j)
        return {
            "n": arm.n,
            "mean_pre": arm.mean_pre,
            "mean_post": arm.mean_post,
            "sd_pre": math.sqrt(arm.ss_pre / (arm.n - 1)),
            "sd_post": math.sqrt(arm.ss_post / (arm.n - 1)),
            "correlation": arm.correlation,
        }

    pct: Optional[PercentChangeDict]
    try:
        summary = percent_change_summary(ds)
        pct = {
            "mean_pct_change_control": summary.mean_pct_change_control,
            "mean_pct_change_treatment": summary.mean_pct_change_treatment,
            "tau_star": summary.tau_star,
            "descriptive_only": summary.descriptive_only,
        }
    except PrepostError as e:
        logger.warning(f"Percent change skipped: {e}")
        pct = None

    return {
        "n0": ds.n0,
        "n1": ds.n1,
        "grand_mean_pre": stats.grand_mean_pre,
        "var_pre": stats.var_pre,
        "p0": stats.p0,
        "p1": stats.p1,
        "control": arm_summary(0),
        "treatment": arm_summary(1),
        "percent_change": pct,
    }


@dataclass
class ComparisonReport:
    """All method rows for one dataset plus ANCOVA residuals by arm.

    Attributes:
        dataset_summary: Descriptive statistics of the dataset
        rows: One serialized row per method, in run order
        residuals: Per-arm residuals of the ANCOVA fits that succeeded
        results: In-memory results of the methods that succeeded
    """

    dataset_summary: DatasetSummaryDict
    rows: List[ReportRowDict]
    residuals: Dict[str, ArmResidualsDict] = field(default_factory=dict)
    results: Dict[MethodId, AnalysisResult] = field(
        default_factory=dict, compare=False, repr=False
    )

    def row(self, method: Union[str, MethodId]) -> ReportRowDict:
        """Row of the given method.

        Raises:
            KeyError: If the method is not in the report
        """
        name = MethodId.parse(method).value
        for row in self.rows:
            if row["method"] == name:
                return row
        raise KeyError(name)

    def to_dict(self) -> ComparisonReportDict:
        """Serialize to a JSON-compatible document."""
        return copy.deepcopy(
            {
                "dataset_summary": self.dataset_summary,
                "rows": self.rows,
                "residuals": self.residuals,
            }
        )

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ComparisonReport":
        """Rebuild a report from its serialized form.

        Raises:
            ValueError: If the document does not match the report schema
        """
        validate_document(data, COMPARISON_REPORT_SCHEMA)
        data = copy.deepcopy(data)
        return cls(
            dataset_summary=data["dataset_summary"],
            rows=data["rows"],
            residuals=data["residuals"],
        )

    def to_json(self, indent: Optional[int] = 2) -> str:
        """Validated JSON text of the report."""
        document = self.to_dict()
        validate_document(dict(document), COMPARISON_REPORT_SCHEMA)
        return json.dumps(document, indent=indent, allow_nan=False)

    @classmethod
    def from_json(cls, text: str) -> "ComparisonReport":
        return cls.from_dict(json.loads(text))

    def residuals_json(self, indent: Optional[int] = 2) -> str:
        """JSON text of the residual block only."""
        return json.dumps(self.residuals, indent=indent, allow_nan=False)

    def to_frame(self) -> pd.DataFrame:
        """Rows as a data frame with the CSV column layout."""
        records = []
        for row in self.rows:
            record = {c: row.get(c) for c in CSV_COLUMNS}
            ci = row["ci95"]
            record["ci95"] = None if ci is None else json.dumps(ci)
            records.append(record)
        return pd.DataFrame.from_records(records, columns=CSV_COLUMNS)

    def to_csv(self, stream: IO[str]) -> None:
        """Write the rows as CSV; the interval is a JSON array in one cell."""
        self.to_frame().to_csv(stream, index=False, lineterminator="\n")

    def to_table(self) -> Table:
        """Rich table of the rows for console display."""
        summary = self.dataset_summary
        table = Table(
            title=f"Treatment effect (n0={summary['n0']}, n1={summary['n1']})"
        )
        table.add_column("Method")
        for header in _TABLE_HEADERS:
            table.add_column(header, justify="right")

        def fmt(value: Optional[float], digits: int = 4) -> str:
            return "-" if value is None else f"{value:.{digits}f}"

        for row in self.rows:
            label = MethodId.parse(row["method"]).label
            if row["error"] is not None and row["estimate"] is None:
                table.add_row(label, f"[red]{row['error']}[/red]", *[""] * 7)
                continue
            ci = row["ci95"] or [None, None]
            table.add_row(
                label,
                fmt(row["estimate"]),
                fmt(row["se_model"]),
                fmt(row["se_hc"]),
                fmt(row["se_adjusted_hc"]),
                fmt(row["se_bootstrap"]),
                fmt(row["df"], 0),
                fmt(row["p"]),
                f"[{fmt(ci[0])}, {fmt(ci[1])}]",
            )
        return table


def analyze_all(
    ds: TrialDataset,
    hc_kind: HCKind = "HC2",
    bootstrap: Optional[int] = None,
    seed: int = 0,
    methods: Union[str, Sequence[str]] = "all",
    mode: Optional[PopulationMode] = None,
    workers: int = 1,
    reml_tol: float = 1e-8,
    reml_max_iter: int = 100,
) -> ComparisonReport:
    """Run every selected method on a dataset and assemble a report.

    A method that fails produces a row carrying its error message; the other
    rows are unaffected.

    Args:
        ds: Trial dataset
        hc_kind: Sandwich flavor for se_hc
        bootstrap: Number of bootstrap replicates, None to skip
        seed: Bootstrap seed
        methods: "all" or method names
        mode: Method family for "all" and the ANCOVA inference SE rule
        workers: Threads for bootstrap replication
        reml_tol: REML convergence tolerance
        reml_max_iter: REML iteration cap

    Returns:
        ComparisonReport: The report
    """
    if not isinstance(methods, str):
        methods = list(methods)
    selected = resolve_methods(methods, mode)
    options: Dict[str, Any] = {
        "hc_kind": hc_kind,
        "heterogeneous": mode == "heterogeneous",
        "reml_tol": reml_tol,
        "reml_max_iter": reml_max_iter,
    }

    rows: List[ReportRowDict] = []
    residuals: Dict[str, ArmResidualsDict] = {}
    results: Dict[MethodId, AnalysisResult] = {}
    for method in selected:
        try:
            result = EstimatorFactory.create(method, **options).fit(ds)
        except PrepostError as e:
            logger.warning(f"{method.label} failed: {e}")
            rows.append(error_row(method, str(e)))
            continue

        error: Optional[str] = None
        if bootstrap is not None:
            try:
                boot = bootstrap_se(
                    ds, method, bootstrap, seed, workers=workers, **options
                )
                result = result.with_bootstrap(boot.se)
            except PrepostError as e:
                logger.warning(f"{method.label} bootstrap failed: {e}")
                error = f"bootstrap failed: {e}"

        results[method] = result
        row = result_row(result)
        row["error"] = error
        rows.append(row)

        if method in _RESIDUAL_KEYS and result.residuals is not None:
            arm0, arm1 = result.residuals
            residuals[_RESIDUAL_KEYS[method]] = {
                "arm0": [float(v) for v in arm0],
                "arm1": [float(v) for v in arm1],
            }

    return ComparisonReport(
        dataset_summary=dataset_summary(ds),
        rows=rows,
        residuals=residuals,
        results=results,
    )
