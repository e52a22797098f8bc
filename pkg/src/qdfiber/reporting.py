"""Deterministic CSV/JSON artifact writing.

Artifacts must be byte-identical across runs and platforms: floats are
written with ``repr`` (shortest round-trip form), keys are sorted, newlines
are LF, and no timestamps are embedded.
"""

import csv
import hashlib
import io
import json
import math
from pathlib import Path

import numpy as np


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return None
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return obj


def dumps_json(obj):
    """Canonical JSON: sorted keys, 2-space indent, LF newline, inf as strings."""
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def config_hash(cfg):
    """SHA-256 of the canonical JSON form of a configuration mapping."""
    return hashlib.sha256(dumps_json(cfg).encode("utf-8")).hexdigest()


def format_cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format_cell(v) for v in row])
    return buf.getvalue()


def write_csv(path, header, rows):
    Path(path).write_bytes(csv_text(header, rows).encode("utf-8"))


def write_json(path, obj):
    Path(path).write_bytes(dumps_json(obj).encode("utf-8"))
