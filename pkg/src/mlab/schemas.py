"""JSON schemas for experiment configs and report records.

The schema files shipped under ``schema/`` are generated from these dicts;
a test pins file and dict together so they cannot drift.
"""

from __future__ import annotations

import json
from pathlib import Path

import jsonschema

__all__ = [
    "CONFIG_SCHEMA",
    "RECORD_SCHEMA",
    "validate_config",
    "validate_record",
    "write_schema_files",
]

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "$id": "mlab/experiment.schema.json",
    "title": "ExperimentConfig",
    "type": "object",
    "properties": {
        "experiment": {"type": "string", "minLength": 1},
        "d": {"type": "integer", "minimum": 1},
        "n": {"type": "integer", "minimum": 4},
        "period": {"type": "number", "exclusiveMinimum": 0},
        "symbol": {"type": "string", "minLength": 1},
        "p": {
            "type": "array",
            "items": {"type": "number", "exclusiveMinimum": 1},
            "minItems": 1,
        },
        "r": {"type": "number", "exclusiveMinimum": 0},
        "s": {"type": ["number", "null"]},
        "k": {"type": "integer", "minimum": 0},
        "gamma": {"type": "number", "minimum": 0},
        "cutoff": {"type": ["number", "null"], "exclusiveMinimum": 0},
        "seed": {"type": "integer"},
        "family": {"type": "integer", "minimum": 1},
        "t_min": {"type": "integer", "minimum": 0},
        "t_max": {"type": "integer", "minimum": 0},
        "strategy": {"enum": ["direct", "separable"]},
        "rank": {"type": "integer", "minimum": 1},
        "sweep_tolerance": {"type": ["number", "null"], "exclusiveMinimum": 0},
        "out_dir": {"type": ["string", "null"]},
    },
    "required": ["experiment", "d", "n", "symbol", "p", "r"],
    "additionalProperties": False,
}

_SWEEP_ROW = {
    "type": "object",
    "properties": {
        "t": {"type": "integer", "minimum": 0},
        "ratios": {"type": "array", "items": {"type": "number", "minimum": 0}},
    },
    "required": ["t", "ratios"],
    "additionalProperties": False,
}

RECORD_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "$id": "mlab/record.schema.json",
    "title": "ReportRecord",
    "type": "object",
    "properties": {
        "config_hash": {"type": "string", "pattern": "^[0-9a-f]{16}$"},
        "experiment": {"type": "string"},
        "kind": {"enum": ["boundedness", "transfer", "jacobian", "hessian"]},
        "ratios": {"type": "array", "items": {"type": "number", "minimum": 0}},
        "max_ratio": {"type": "number", "minimum": 0},
        "median_ratio": {"type": "number", "minimum": 0},
        "min_ratio": {"type": "number", "minimum": 0},
        "sweep": {"type": "array", "items": _SWEEP_ROW, "minItems": 1},
        "thresholds": {
            "type": "object",
            "additionalProperties": {"type": "number"},
        },
        "passed": {"type": "boolean"},
        "runtime_seconds": {"type": "number", "minimum": 0},
        "extra": {"type": "object"},
    },
    "required": [
        "config_hash",
        "experiment",
        "kind",
        "ratios",
        "max_ratio",
        "median_ratio",
        "min_ratio",
        "sweep",
        "thresholds",
        "passed",
        "runtime_seconds",
    ],
    "additionalProperties": False,
}


def validate_config(payload: dict) -> None:
    """Raise ``jsonschema.ValidationError`` on a malformed config dict."""
    jsonschema.validate(payload, CONFIG_SCHEMA)


def validate_record(payload: dict) -> None:
    jsonschema.validate(payload, RECORD_SCHEMA)


def write_schema_files(root: str | Path) -> list[Path]:
    """Write both schema files under ``root`` and return their paths."""
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    out = []
    for name, schema in (
        ("experiment.schema.json", CONFIG_SCHEMA),
        ("record.schema.json", RECORD_SCHEMA),
    ):
        path = root / name
        path.write_text(json.dumps(schema, indent=2, sort_keys=True) + "\n")
        out.append(path)
    return out
