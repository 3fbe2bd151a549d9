"""Deterministic JSON and CSV writers (17 significant digits, LF line endings)."""

import csv
import json
import math
import os
from pathlib import Path

import numpy as np

OUTPUT_ENV = "SPIRALMIN_OUTPUT_DIR"


def fmt_float(x):
    x = float(x)
    if not math.isfinite(x):
        return "null"
    return format(x, ".17g")


def _plain(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, tuple):
        return list(obj)
    if hasattr(obj, "to_json"):
        return obj.to_json()
    return obj


def _encode(obj, indent, level):
    obj = _plain(obj)
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(isinstance(_plain(v), (int, float)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent=2):
    """JSON text with every float written as ``format(x, '.17g')``.

    Key order is preserved, so identical inputs give byte-identical output.
    Non-finite floats become ``null``.
    """
    return _encode(obj, indent, 0) + "\n"


def write_json(path, obj):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(dumps(obj))
    return path


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "" if not math.isfinite(float(v)) else format(float(v), ".17g")
    return "" if v is None else str(v)


def write_csv(path, columns, rows=None):
    """Write a CSV with a header row.

    Either ``columns`` is a mapping of equal-length columns, or it is a list
    of header names and ``rows`` an iterable of sequences.
    """
    if rows is None:
        header = list(columns)
        data = zip(*[np.asarray(columns[c]).tolist() for c in header])
    else:
        header, data = list(columns), rows
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in data:
            w.writerow([_cell(v) for v in r])
    return path


def output_dir(explicit=None):
    """Explicit directory, else ``$SPIRALMIN_OUTPUT_DIR``, else the working directory."""
    return Path(explicit or os.environ.get(OUTPUT_ENV) or ".")
