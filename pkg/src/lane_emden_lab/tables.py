"""Delimited and JSON output shared by the library exports and the CLI.

Floats are written with 17 significant digits so they round-trip, and
non-finite values use the literals inf, -inf and nan.
"""

from __future__ import annotations

import csv
import io
import json
import math
from contextlib import contextmanager

import numpy as np

__all__ = ["fmt_float", "fmt_cell", "write_csv", "csv_text", "to_jsonable", "dump_json"]


def fmt_float(v):
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.17g}"


def fmt_cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return fmt_float(v)
    return str(v)


@contextmanager
def _sink(dest):
    if hasattr(dest, "write"):
        yield dest
    else:
        with open(dest, "w", newline="", encoding="utf-8") as fh:
            yield fh


def write_csv(header, rows, dest):
    """Write a header row and data rows to a path or text stream."""
    with _sink(dest) as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(header)
        for row in rows:
            wr.writerow([fmt_cell(v) for v in row])


def csv_text(header, rows):
    buf = io.StringIO()
    write_csv(header, rows, buf)
    return buf.getvalue()


def to_jsonable(obj):
    """Recursively convert arrays, numpy scalars and non-finite floats."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    return obj


def dump_json(obj, dest):
    """Deterministic JSON (sorted keys, fixed indent) to a path or stream."""
    text = json.dumps(to_jsonable(obj), indent=2, sort_keys=True) + "\n"
    with _sink(dest) as fh:
        fh.write(text)
