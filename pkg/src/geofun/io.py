"""Deterministic JSON/CSV artifacts written atomically (temp file + rename)."""

from __future__ import annotations

import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

SCHEMA_VERSION = "1.0"


def _plain(obj):
    """Convert numpy types and non-finite floats into JSON-safe values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


def envelope(config: dict, results, witnesses=None) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "config": _plain(config),
        "results": _plain(results),
        "witnesses": _plain(witnesses or {}),
    }


def atomic_write_text(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def write_json(path, payload: dict) -> Path:
    return atomic_write_text(path, json.dumps(_plain(payload), indent=2, sort_keys=True) + "\n")


def format_number(x) -> str:
    return f"{float(x):.17g}"


def write_csv(path, header, rows) -> Path:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_number(v) for v in row))
    return atomic_write_text(path, "\n".join(lines) + "\n")


def write_curve_csv(path, curve) -> Path:
    """Header ``t,x1,...,xn`` and one row per grid point at 17 significant digits."""
    n = curve.points.shape[1]
    header = ["t"] + [f"x{i + 1}" for i in range(n)]
    rows = (np.concatenate([[t], p]) for t, p in zip(curve.params, curve.points))
    return write_csv(path, header, rows)


def safe_name(solution_id: str) -> str:
    return solution_id.replace(":", "-")
