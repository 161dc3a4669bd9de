"""Deterministic CSV and JSON writers.

Doubles are rendered with 17 significant digits (round-trip exact),
locale-independent, with \\n line endings.  CSV cells never need quoting
by construction; missing values are empty cells in CSV and null in JSON.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Iterable, Sequence

__all__ = ["fmt_float", "csv_cell", "write_csv", "write_json"]


def fmt_float(value: float) -> str:
    if not math.isfinite(value):
        raise ValueError(f"non-finite value in output: {value}")
    return "%.17g" % value


def csv_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return fmt_float(value)
    text = str(value)
    if any(c in text for c in ",\"\n"):
        raise ValueError(f"CSV cell would need quoting: {text!r}")
    return text


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(csv_cell(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="ascii", newline="")
    return path


def _emit(obj: Any, indent: int) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = (f"{inner}{json.dumps(str(k))}: {_emit(v, indent + 1)}" for k, v in obj.items())
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        seq = list(obj)
        if not seq:
            return "[]"
        items = (f"{inner}{_emit(v, indent + 1)}" for v in seq)
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    # numpy scalars and arrays
    if hasattr(obj, "tolist"):
        return _emit(obj.tolist(), indent)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_json(path: Path, obj: Any) -> Path:
    path.write_text(_emit(obj, 0) + "\n", encoding="ascii", newline="")
    return path
