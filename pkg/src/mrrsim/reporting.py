"""Deterministic CSV / JSON report serialization.

Floats are written with 12 significant digits; line endings are ``\\n``.
Every report carries a provenance block with the fully resolved run
configuration: a ``# config:`` comment line ahead of the CSV header, or a
``provenance`` object in JSON.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import jsonschema

FLOAT_FORMAT = ".12g"

REPORT_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["provenance", "columns", "rows"],
    "properties": {
        "provenance": {
            "type": "object",
            "required": ["command", "seed"],
            "properties": {"command": {"type": "string"}, "seed": {"type": "integer"}},
        },
        "columns": {"type": "array", "items": {"type": "string"}},
        "rows": {"type": "array", "items": {"type": "object"}},
        "extra": {"type": "object"},
    },
    "additionalProperties": False,
}

DECISION_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["layers"],
    "properties": {
        "layers": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["name", "chosen", "alpha", "m_is", "m_ws", "d_is", "d_ws", "e_is", "e_ws"],
                "properties": {
                    "name": {"type": "string"},
                    "chosen": {"enum": ["is", "ws"]},
                    "alpha": {"type": "number", "minimum": 0, "maximum": 1},
                    **{k: {"type": "number", "minimum": 0} for k in ("m_is", "m_ws", "d_is", "d_ws", "e_is", "e_ws")},
                },
                "additionalProperties": False,
            },
        }
    },
}


@dataclass
class Report:
    command: str
    provenance: dict[str, Any]
    columns: list[str]
    rows: list[list[Any]]
    extra: dict[str, Any] = field(default_factory=dict)
    comments: list[str] = field(default_factory=list)


def fmt_value(x: Any) -> Any:
    """Round floats to 12 significant digits (recursively through containers)."""
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, float):
        return float(format(x, FLOAT_FORMAT))
    if isinstance(x, dict):
        return {str(k): fmt_value(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [fmt_value(v) for v in x]
    if hasattr(x, "item"):  # numpy scalar
        return fmt_value(x.item())
    return str(x)


def _csv_cell(x: Any) -> str:
    if isinstance(x, float):
        return format(x, FLOAT_FORMAT)
    if hasattr(x, "item"):
        return _csv_cell(x.item())
    return str(x)


def render(report: Report, fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        buf.write(f"# config: {json.dumps(fmt_value(report.provenance), sort_keys=True)}\n")
        for c in report.comments:
            buf.write(f"# {c}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(report.columns)
        for row in report.rows:
            w.writerow([_csv_cell(v) for v in row])
        return buf.getvalue()
    if fmt == "json":
        doc = to_document(report)
        validate_report(doc)
        return json.dumps(doc, indent=1, sort_keys=False) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def to_document(report: Report) -> dict[str, Any]:
    doc = {
        "provenance": fmt_value(report.provenance),
        "columns": list(report.columns),
        "rows": [dict(zip(report.columns, fmt_value(list(r)))) for r in report.rows],
    }
    if report.extra:
        doc["extra"] = fmt_value(report.extra)
    return doc


def validate_report(doc: dict[str, Any]) -> None:
    jsonschema.validate(doc, REPORT_SCHEMA)
    if "extra" in doc and "decision" in doc["extra"]:
        jsonschema.validate(doc["extra"]["decision"], DECISION_SCHEMA)


def emit_report(report: Report, fmt: str, path: str | Path | None = None, stream=None) -> None:
    """Write the rendered report to ``path``, or to ``stream`` when no path is given."""
    text = render(report, fmt)
    if path is None:
        stream.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
