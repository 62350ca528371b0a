"""Deterministic JSON and CSV emission for run artifacts.

Reports never contain timestamps or timings, so identical configurations
produce byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__

__all__ = ["jsonable", "dumps", "write_json", "write_csv", "manifest"]


def jsonable(obj):
    """Recursively convert report values to JSON-stable types."""
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted(jsonable(v) for v in obj)
    if hasattr(obj, "to_jsonable"):
        return jsonable(obj.to_jsonable())
    return obj


def dumps(data):
    return json.dumps(jsonable(data), sort_keys=True, indent=2) + "\n"


def write_json(path, data):
    Path(path).write_text(dumps(data), encoding="utf-8")


def write_csv(path, rows, columns=None):
    if columns is None:
        columns = sorted({k for row in rows for k in row})
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_csv_cell(row.get(c, "")) for c in columns])
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def _csv_cell(value):
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    return value


def manifest(command, config, **extra):
    """Run manifest: inputs, version, seed and derived constants."""
    data = {
        "command": command,
        "config": jsonable(config),
        "package": "hypercomb",
        "version": __version__,
    }
    data.update(jsonable(extra))
    return data
