"""CSV and JSON persistence.

Floats are written with ``repr`` so that identical inputs give
byte-identical files. Trace columns carry field amplitudes in
sqrt(photon flux) (``s_in``, ``s_out``) or sqrt(photon) (``a_c``, ``b_j``);
time is in seconds.
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .dynamics import SimulationResult
from .metrics import FidelityReport


def _num(x) -> str:
    return repr(float(x))


def trace_header(n_internal: int) -> list[str]:
    cols = ["t"]
    for name in ["s_in", "s_out", "a_c"] + [f"b{j}" for j in range(n_internal)]:
        cols += [f"re_{name}", f"im_{name}"]
    return cols


def write_trace_csv(result: SimulationResult, path) -> None:
    """One row per time sample: ``t`` then real/imaginary parts of every field."""
    cols = [result.t, result.input.samples, result.output.samples, result.a_c] + list(result.b.T)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(trace_header(result.b.shape[1]))
        for k in range(len(result.t)):
            row = [_num(result.t[k])]
            for c in cols[1:]:
                row += [_num(c[k].real), _num(c[k].imag)]
            w.writerow(row)


def read_trace_csv(path) -> dict[str, np.ndarray]:
    """Read a trace CSV back into complex arrays keyed by field name (plus ``t``)."""
    data = np.genfromtxt(path, delimiter=",", names=True)
    out = {"t": np.asarray(data["t"])}
    for name in data.dtype.names:
        if name.startswith("re_"):
            key = name[3:]
            out[key] = data[name] + 1j * data["im_" + key]
    return out


def write_matrix_csv(path, row_name: str, rows, col_name: str, cols, values) -> None:
    """Real matrix with a header row of column-axis values.

    The corner cell reads ``row_name\\col_name``; every later row starts with
    its row-axis value.
    """
    values = np.asarray(values, dtype=float)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"{row_name}\\{col_name}"] + [_num(c) for c in cols])
        for r, line in zip(rows, values):
            w.writerow([_num(r)] + [_num(v) for v in line])


def read_matrix_csv(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return ``(rows, cols, values)`` from :func:`write_matrix_csv` output."""
    with open(path, newline="", encoding="utf-8") as fh:
        lines = list(csv.reader(fh))
    cols = np.array([float(x) for x in lines[0][1:]])
    body = np.array([[float(x) for x in line] for line in lines[1:]])
    return body[:, 0], cols, body[:, 1:]


def write_complex_matrix(stem, row_name, rows, col_name, cols, values) -> list[Path]:
    """Write ``<stem>_re.csv`` and ``<stem>_im.csv``; returns the two paths."""
    values = np.asarray(values, dtype=complex)
    stem = Path(stem)
    paths = [stem.with_name(stem.name + "_re.csv"), stem.with_name(stem.name + "_im.csv")]
    write_matrix_csv(paths[0], row_name, rows, col_name, cols, values.real)
    write_matrix_csv(paths[1], row_name, rows, col_name, cols, values.imag)
    return paths


def write_columns_csv(path, header: list[str], columns) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in zip(*columns):
            w.writerow([_num(x) for x in row])


def write_correlation_csv(report: FidelityReport, path) -> None:
    write_columns_csv(path, ["lag_s", "C"], [report.lags, report.correlation])


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def write_json(path, obj) -> None:
    """Deterministic JSON (sorted keys); non-finite floats become ``null``."""
    Path(path).write_text(json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n", encoding="utf-8")


def read_columns(path) -> dict[str, np.ndarray]:
    """Read a headed numeric CSV into arrays keyed by column name."""
    with open(path, newline="", encoding="utf-8") as fh:
        lines = [line for line in csv.reader(fh) if line]
    if len(lines) < 2:
        raise ValueError(f"{path}: no data rows")
    header = [h.strip() for h in lines[0]]
    body = np.array([[float(x) for x in line] for line in lines[1:]])
    return {h: body[:, i] for i, h in enumerate(header)}
