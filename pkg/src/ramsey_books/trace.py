"""JSON-lines traces shared by every algorithm.

Line 1 is a header object (``"type": "header"``); each following line is one
step record.  Exact rationals are written twice: as a float for plotting and
as an ``"a/b"`` string for exact replay.  Keys are emitted in a fixed order
and floats use ``repr``, so equal runs produce byte-identical files.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable


def encode(value: Any) -> Any:
    if isinstance(value, Fraction):
        return float(value)
    if isinstance(value, dict):
        return {k: encode(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [encode(v) for v in value]
    if hasattr(value, "value") and isinstance(getattr(value, "value"), str):
        return value.value  # enums
    return value


def exact(value: "Fraction | None") -> "str | None":
    if value is None:
        return None
    return f"{value.numerator}/{value.denominator}"


def parse_exact(text: "str | None") -> "Fraction | None":
    return None if text is None else Fraction(text)


def dumps_line(obj: dict) -> str:
    return json.dumps(encode(obj), separators=(",", ":"), allow_nan=True)


def write_trace(path: "str | Path", header: dict, records: Iterable[dict]) -> None:
    lines = [dumps_line({"type": "header", **header})]
    lines.extend(dumps_line(r) for r in records)
    Path(path).write_text("\n".join(lines) + "\n")


def read_trace(path: "str | Path") -> tuple[dict, list[dict]]:
    rows = [json.loads(line) for line in Path(path).read_text().splitlines() if line.strip()]
    if not rows or rows[0].get("type") != "header":
        raise ValueError("trace file has no header line")
    return rows[0], rows[1:]
