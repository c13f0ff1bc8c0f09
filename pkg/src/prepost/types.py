"""Type definitions for prepost-analysis."""

from typing import Dict, List, Literal, Optional, TypedDict

HCKind = Literal["HC0", "HC1", "HC2", "HC3"]

SEKind = Literal["model", "hc", "adjusted_hc", "bootstrap"]

CovarianceStructure = Literal["pooled", "grouped"]

PopulationMode = Literal["homogeneous", "heterogeneous"]


class CovarianceDict(TypedDict):
    """Structure of a serialized 2x2 covariance."""

    v00: float
    v01: float
    v11: float


class GlsCovDict(TypedDict):
    """Structure of a serialized REML covariance estimate."""

    structure: CovarianceStructure
    pooled: Optional[CovarianceDict]
    control: Optional[CovarianceDict]
    treatment: Optional[CovarianceDict]
    iterations: int
    converged: bool


class ReportRowDict(TypedDict):
    """Structure of one method row of a comparison report.

    Non-finite values are written as None (JSON null).
    """

    method: str
    estimate: Optional[float]
    se_model: Optional[float]
    se_hc: Optional[float]
    se_adjusted_hc: Optional[float]
    se_bootstrap: Optional[float]
    df: Optional[float]
    t: Optional[float]
    p: Optional[float]
    ci95: Optional[List[Optional[float]]]
    inference_se: Optional[SEKind]
    hc_kind: Optional[HCKind]
    nuisance: Dict[str, object]
    error: Optional[str]


class ArmSummaryDict(TypedDict):
    """Structure of per-arm descriptive statistics."""

    n: int
    mean_pre: float
    mean_post: float
    sd_pre: float
    sd_post: float
    correlation: Optional[float]


class PercentChangeDict(TypedDict):
    """Structure of the descriptive percent-change block."""

    mean_pct_change_control: float
    mean_pct_change_treatment: float
    tau_star: float
    descriptive_only: bool


class DatasetSummaryDict(TypedDict):
    """Structure of the dataset summary block of a report."""

    n0: int
    n1: int
    grand_mean_pre: float
    var_pre: float
    p0: float
    p1: float
    control: ArmSummaryDict
    treatment: ArmSummaryDict
    percent_change: Optional[PercentChangeDict]


class ArmResidualsDict(TypedDict):
    """Per-arm residual lists of one ANCOVA model."""

    arm0: List[float]
    arm1: List[float]


class ComparisonReportDict(TypedDict):
    """Structure of a serialized comparison report."""

    dataset_summary: DatasetSummaryDict
    rows: List[ReportRowDict]
    residuals: Dict[str, ArmResidualsDict]


class SummaryWithErrorDict(TypedDict):
    """A Monte Carlo summary value and its Monte Carlo standard error."""

    value: Optional[float]
    mcse: Optional[float]


class MCMethodSummaryDict(TypedDict):
    """Structure of the per-method block of a Monte Carlo report."""

    method: str
    replications: int
    failures: int
    mean_estimate: SummaryWithErrorDict
    bias: SummaryWithErrorDict
    empirical_sd: SummaryWithErrorDict
    mean_se: Dict[str, SummaryWithErrorDict]
    calibration: Dict[str, SummaryWithErrorDict]
    coverage: Dict[str, SummaryWithErrorDict]
    rejection: Dict[str, SummaryWithErrorDict]
    inference_se: SEKind
    oracle_se: Optional[float]


class MCReportDict(TypedDict):
    """Structure of a serialized Monte Carlo report."""

    scenario: str
    true_tau: float
    replications: int
    seed: int
    alpha: float
    methods: List[MCMethodSummaryDict]


class OracleRowDict(TypedDict):
    """Structure of one row of the analytic efficiency table."""

    method: str
    variance: Optional[float]
    se: Optional[float]
    gap_to_best: Optional[float]
    note: Optional[str]
