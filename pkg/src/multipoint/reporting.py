"""Deterministic JSON/CSV writers (17 significant digits) and run manifests."""

from __future__ import annotations

import datetime as _dt
import io
import json
import math

import numpy as np

from . import __version__


def fmt(x) -> str:
    """Format a real number at 17 significant digits; ``nan``/``inf`` spelled out."""
    x = float(x) + 0.0  # folds -0.0 into 0.0
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def dumps(obj, indent: int = 2) -> str:
    """JSON with every float at 17 significant digits.

    Non-finite floats become ``null`` so the output stays valid JSON.
    """
    return _dump(obj, 0, indent) + "\n"


def _dump(obj, level, indent):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_dump(v, level + 1, indent)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.number)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(_dump(v, level + 1, indent) for v in obj) + "]"
        items = [pad + _dump(v, level + 1, indent) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def csv_text(header, rows) -> str:
    out = io.StringIO()
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(str(v) if isinstance(v, (int, np.integer)) else fmt(v) for v in row) + "\n")
    return out.getvalue()


def manifest(command: str, params: dict, rtol=None, timestamp: bool = False) -> dict:
    """Run manifest.

    The timestamp is only included on request: manifests embedded in reports
    omit it so that repeated runs stay byte-identical.
    """
    m = {"command": command, "parameters": params, "version": __version__, "rank_tolerance": rtol}
    if timestamp:
        m["timestamp"] = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    return m
