"""Deterministic JSON and CSV emitters.

Floats are written with 17 significant digits so that a report read back
reproduces the exact binary values; non-finite floats become ``null``.
Key order is insertion order and nothing time-dependent is recorded.
"""

from __future__ import annotations

import json
import math

import numpy as np

CSV_COLUMNS = ("s", "I", "s_times_I", "est_error")


def format_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    text = format(x, ".17g")
    if "e" not in text and "." not in text:
        text += ".0"
    return text


def _dump(obj, indent, level, out):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        out.append("null")
    elif isinstance(obj, (bool, np.bool_)):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(format_float(float(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (k, v) in enumerate(obj.items()):
            out.append(f"{pad}{json.dumps(str(k), ensure_ascii=False)}: ")
            _dump(v, indent, level + 1, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(end + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            out.append("[]")
            return
        out.append("[\n")
        for i, v in enumerate(seq):
            out.append(pad)
            _dump(v, indent, level + 1, out)
            out.append(",\n" if i < len(seq) - 1 else "\n")
        out.append(end + "]")
    else:
        raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    out = []
    _dump(obj, indent, 0, out)
    return "".join(out) + "\n"


def write_json(path, obj):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(obj))


def csv_text(rows) -> str:
    """CSV with header ``s,I,s_times_I,est_error`` ('.' decimal, no locale)."""
    lines = [",".join(CSV_COLUMNS)]
    for r in rows:
        vals = [r[c] if isinstance(r, dict) else getattr(r, c) for c in CSV_COLUMNS]
        lines.append(",".join("nan" if not math.isfinite(v) else format(float(v), ".17g")
                              for v in vals))
    return "\n".join(lines) + "\n"


def write_csv(path, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(csv_text(rows))
