"""JSON verification report and its schema."""

from __future__ import annotations

import json
from datetime import datetime, timezone
from importlib.metadata import PackageNotFoundError, version

from .suite import CheckRecord, RunInput, config_dict

REPORT_SCHEMA: dict = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "VerificationReport",
    "type": "object",
    "required": ["artifact_version", "input", "config", "records", "summary", "generated_at"],
    "additionalProperties": False,
    "properties": {
        "artifact_version": {"type": "string"},
        "generated_at": {"type": "string"},
        "input": {
            "type": "object",
            "required": ["form", "level", "weight", "truncation", "provenance"],
            "properties": {
                "form": {"type": "string"},
                "level": {"type": "integer", "minimum": 1},
                "weight": {"type": "integer", "minimum": 1},
                "truncation": {"type": "integer", "minimum": 1},
                "provenance": {"type": "string"},
            },
        },
        "config": {"type": "object"},
        "records": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "anchor", "parameters", "residual", "tolerance", "status", "wall_time"],
                "additionalProperties": False,
                "properties": {
                    "name": {"type": "string"},
                    "anchor": {"type": "string", "minLength": 1},
                    "parameters": {"type": "object"},
                    "residual": {"type": ["string", "null"]},
                    "tolerance": {"type": ["string", "null"]},
                    "status": {"enum": ["pass", "fail", "reported", "error"]},
                    "wall_time": {"type": "number", "minimum": 0},
                    "detail": {"type": "string"},
                },
            },
        },
        "summary": {
            "type": "object",
            "required": ["total", "pass", "fail", "reported", "error"],
            "additionalProperties": False,
            "properties": {k: {"type": "integer", "minimum": 0} for k in ("total", "pass", "fail", "reported", "error")},
        },
    },
}

# parameters holding volatile values are excluded from the deterministic part of a report
VOLATILE_KEYS = ("generated_at", "wall_time")


def artifact_version() -> str:
    try:
        return version("artifact")
    except PackageNotFoundError:
        return "0+unknown"


def decimal_string(x: float | None) -> str | None:
    """17 significant digits, enough to round-trip a double."""
    return None if x is None else format(x, ".17g")


def record_dict(r: CheckRecord) -> dict:
    return {
        "name": r.name,
        "anchor": r.anchor,
        "parameters": r.parameters,
        "residual": decimal_string(r.residual),
        "tolerance": decimal_string(r.tolerance),
        "status": r.status,
        "wall_time": r.wall_time,
        "detail": r.detail,
    }


def summarize(records: list[CheckRecord]) -> dict:
    out = {"total": len(records), "pass": 0, "fail": 0, "reported": 0, "error": 0}
    for r in records:
        out[r.status] += 1
    return out


def build_report(run: RunInput, records: list[CheckRecord]) -> dict:
    s = run.series
    return {
        "artifact_version": artifact_version(),
        "generated_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "input": {
            "form": run.config.form,
            "level": s.level,
            "weight": s.weight,
            "truncation": s.length,
            "provenance": s.provenance,
        },
        "config": config_dict(run.config),
        "records": [record_dict(r) for r in records],
        "summary": summarize(records),
    }


def all_passed(report: dict) -> bool:
    summ = report["summary"]
    return summ["fail"] == 0 and summ["error"] == 0


def strip_volatile(report: dict) -> dict:
    out = {k: v for k, v in report.items() if k != "generated_at"}
    out["records"] = [{k: v for k, v in r.items() if k != "wall_time"} for r in report["records"]]
    return out


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=False) + "\n"
