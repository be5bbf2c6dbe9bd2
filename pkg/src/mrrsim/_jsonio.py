from __future__ import annotations

import dataclasses
import json
from pathlib import Path
from typing import Any, TypeVar

from .errors import ValidationError

T = TypeVar("T")


def read_json(path: str | Path) -> Any:
    """Parse a UTF-8 JSON file, reporting line/column on syntax errors."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc


def from_mapping(cls: type[T], data: Any, where: str = "") -> T:
    """Build a dataclass from a mapping, rejecting unknown or mistyped fields."""
    if not isinstance(data, dict):
        raise ValidationError(f"{where or cls.__name__}: expected a JSON object")
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - names)
    if unknown:
        raise ValidationError(f"{where or cls.__name__}: unknown field(s) {unknown}")
    for key, value in data.items():
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValidationError(f"{where or cls.__name__}: field {key!r} must be a number")
    try:
        return cls(**data)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{where or cls.__name__}: {exc}") from exc
