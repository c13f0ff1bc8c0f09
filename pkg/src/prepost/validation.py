"""JSON schemas and validation of emitted report documents."""

from typing import Any, Dict

import jsonschema

_NUMBER = {"type": ["number", "null"]}

_COV = {
    "type": ["object", "null"],
    "properties": {"v00": _NUMBER, "v01": _NUMBER, "v11": _NUMBER},
    "required": ["v00", "v01", "v11"],
}

_ARM_SUMMARY = {
    "type": "object",
    "properties": {
        "n": {"type": "integer", "minimum": 2},
        "mean_pre": _NUMBER,
        "mean_post": _NUMBER,
        "sd_pre": _NUMBER,
        "sd_post": _NUMBER,
        "correlation": _NUMBER,
    },
    "required": ["n", "mean_pre", "mean_post", "sd_pre", "sd_post", "correlation"],
}

GLS_COV_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "properties": {
        "structure": {"enum": ["pooled", "grouped"]},
        "pooled": _COV,
        "control": _COV,
        "treatment": _COV,
        "iterations": {"type": "integer", "minimum": 0},
        "converged": {"type": "boolean"},
    },
    "required": ["structure", "iterations", "converged"],
}

REPORT_ROW_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "properties": {
        "method": {
            "enum": [
                "anova-post",
                "ancova-main",
                "ancova-interaction",
                "anova-change",
                "rm",
                "crm",
                "crm-grouped",
            ]
        },
        "estimate": _NUMBER,
        "se_model": _NUMBER,
        "se_hc": _NUMBER,
        "se_adjusted_hc": _NUMBER,
        "se_bootstrap": _NUMBER,
        "df": _NUMBER,
        "t": _NUMBER,
        "p": {"type": ["number", "null"], "minimum": 0, "maximum": 1},
        "ci95": {
            "type": ["array", "null"],
            "items": _NUMBER,
            "minItems": 2,
            "maxItems": 2,
        },
        "inference_se": {"enum": ["model", "hc", "adjusted_hc", "bootstrap", None]},
        "hc_kind": {"enum": ["HC0", "HC1", "HC2", "HC3", None]},
        "nuisance": {"type": "object", "properties": {"covariance": GLS_COV_SCHEMA}},
        "error": {"type": ["string", "null"]},
    },
    "required": [
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
    ],
}

_ARM_RESIDUALS = {
    "type": "object",
    "properties": {
        "arm0": {"type": "array", "items": {"type": "number"}},
        "arm1": {"type": "array", "items": {"type": "number"}},
    },
    "required": ["arm0", "arm1"],
}

COMPARISON_REPORT_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "properties": {
        "dataset_summary": {
            "type": "object",
            "properties": {
                "n0": {"type": "integer", "minimum": 2},
                "n1": {"type": "integer", "minimum": 2},
                "grand_mean_pre": _NUMBER,
                "var_pre": _NUMBER,
                "p0": _NUMBER,
                "p1": _NUMBER,
                "control": _ARM_SUMMARY,
                "treatment": _ARM_SUMMARY,
                "percent_change": {
                    "type": ["object", "null"],
                    "properties": {"descriptive_only": {"const": True}},
                },
            },
            "required": ["n0", "n1", "control", "treatment"],
        },
        "rows": {"type": "array", "items": REPORT_ROW_SCHEMA},
        "residuals": {
            "type": "object",
            "properties": {
                "ancova_main": _ARM_RESIDUALS,
                "ancova_interaction": _ARM_RESIDUALS,
            },
            "additionalProperties": False,
        },
    },
    "required": ["dataset_summary", "rows", "residuals"],
}

_SUMMARY_VALUE = {
    "type": "object",
    "properties": {"value": _NUMBER, "mcse": _NUMBER},
    "required": ["value", "mcse"],
}

_RATE = {
    "type": "object",
    "properties": {
        "value": {"type": ["number", "null"], "minimum": 0, "maximum": 1},
        "mcse": _NUMBER,
    },
    "required": ["value", "mcse"],
}

MC_REPORT_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "properties": {
        "scenario": {"type": "string"},
        "true_tau": {"type": "number"},
        "replications": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer"},
        "alpha": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "methods": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "method": {"type": "string"},
                    "replications": {"type": "integer"},
                    "failures": {"type": "integer", "minimum": 0},
                    "mean_estimate": _SUMMARY_VALUE,
                    "bias": _SUMMARY_VALUE,
                    "empirical_sd": _SUMMARY_VALUE,
                    "mean_se": {
                        "type": "object",
                        "additionalProperties": _SUMMARY_VALUE,
                    },
                    "calibration": {
                        "type": "object",
                        "additionalProperties": _SUMMARY_VALUE,
                    },
                    "coverage": {"type": "object", "additionalProperties": _RATE},
                    "rejection": {"type": "object", "additionalProperties": _RATE},
                    "inference_se": {"type": "string"},
                    "oracle_se": _NUMBER,
                },
                "required": [
                    "method",
                    "replications",
                    "failures",
                    "mean_estimate",
                    "bias",
                    "empirical_sd",
                    "mean_se",
                    "coverage",
                    "rejection",
                ],
            },
        },
    },
    "required": ["scenario", "true_tau", "replications", "seed", "alpha", "methods"],
}


def validate_document(document: Dict[str, Any], schema: Dict[str, Any]) -> None:
    """Validate a report document against its schema.

    Args:
        document: JSON-compatible document
        schema: JSON schema

    Raises:
        ValueError: If the document does not conform, with a one-line message
    """
    try:
        jsonschema.validate(instance=document, schema=schema)
    except jsonschema.exceptions.ValidationError as e:
        path = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise ValueError(f"Invalid report at {path}: {e.message}") from e
