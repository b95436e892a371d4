"""JSON and CSV readers/writers for models, data, graphs and results."""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .ldim import LdimModel, validate

SIG_DIGITS = 12


def fmt(x) -> str:
    return f"{float(x):.{SIG_DIGITS}g}"


def rounded(obj):
    """Round every float in a JSON-like structure to 12 significant digits."""
    if isinstance(obj, float):
        return float(fmt(obj)) if np.isfinite(obj) else obj
    if isinstance(obj, (np.floating,)):
        return rounded(float(obj))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, dict):
        return {k: rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [rounded(v) for v in obj]
    return obj


def write_json(obj, path, *, round_floats: bool = True):
    data = rounded(obj) if round_floats else obj
    text = json.dumps(data, indent=2, sort_keys=True)
    Path(path).write_text(text + "\n")


def read_json(path):
    return json.loads(Path(path).read_text())


def load_model(path) -> LdimModel:
    m = LdimModel.from_dict(read_json(path))
    validate(m).raise_if_failed()
    return m


def save_model(m: LdimModel, path):
    write_json(m.to_dict(), path, round_floats=False)


def write_data_csv(data: np.ndarray, path):
    """Write an ``n x T`` array as CSV: one row per time step, header ``y_1..y_n``."""
    data = np.asarray(data)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"y_{k}" for k in range(1, data.shape[0] + 1)])
        for row in data.T:
            w.writerow([fmt(v) for v in row])


def read_data_csv(path) -> np.ndarray:
    """Inverse of :func:`write_data_csv`; returns an ``n x T`` array."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(v) for v in r] for r in reader if r]
    arr = np.asarray(rows, dtype=float).reshape(-1, len(header))
    return arr.T.copy()


def write_rows_csv(rows: list[dict], columns: list[str], path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(columns)
        for r in rows:
            w.writerow([fmt(r[c]) if isinstance(r[c], (float, np.floating)) else r[c]
                        for c in columns])
