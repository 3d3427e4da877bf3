"""CSV reading and writing.

Schemas:

* dataset: feature columns (any names, default ``f1..fl``), then ``y``, ``t``.
  The constant feature is dropped on write and re-appended on read.
* regression trials: ``trial,m,algo,outcome,theta1..thetaK,true_d,true_mse,wall_ms``
* RL episodes: ``p1,p2,r,r1..rn``
* RL trials: ``trial,m,algo,outcome,choice,true_r,true_r1,violation,wall_ms``

Floats are written with ``repr`` so a write/read round trip is exact.
"""
from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from ..data import Dataset
from ..rl import Episodes


class CSVParseError(ValueError):
    def __init__(self, path, row, column, message):
        self.path, self.row, self.column = str(path), row, column
        where = f"row {row}" if row is not None else "header"
        if column is not None:
            where += f", column {column!r}"
        super().__init__(f"{path}: {where}: {message}")


def fmt(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return "nan" if math.isnan(v) else repr(v)
    return str(v)


def write_rows(path, header, rows):
    """Write a CSV to ``path`` (a path or an open text file)."""
    if hasattr(path, "write"):
        _write(path, header, rows)
        return
    with open(path, "w", newline="") as fh:
        _write(fh, header, rows)


def _write(fh, header, rows):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])


def _read_table(path):
    path = Path(path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or not any(cell.strip() for cell in rows[0]):
        raise CSVParseError(path, None, None, "file is empty")
    header = [h.strip() for h in rows[0]]
    body = [r for r in rows[1:] if any(cell.strip() for cell in r)]
    for i, r in enumerate(body, start=2):
        if len(r) != len(header):
            raise CSVParseError(path, i, None, f"expected {len(header)} cells, found {len(r)}")
    return path, header, body


def _float_matrix(path, header, body, cols):
    out = np.empty((len(body), len(cols)))
    for i, r in enumerate(body):
        for j, c in enumerate(cols):
            cell = r[c].strip()
            try:
                out[i, j] = float(cell)
            except ValueError:
                raise CSVParseError(path, i + 2, header[c], f"not a number: {cell!r}") from None
    return out


def _require(path, header, names):
    for n in names:
        if n not in header:
            raise CSVParseError(path, None, n, "missing column")
    return [header.index(n) for n in names]


# -- datasets --------------------------------------------------------------------


def write_dataset(path, D: Dataset):
    names = list(D.feature_names) if D.feature_names else [f"f{i + 1}" for i in range(D.n_features - 1)]
    rows = (list(x) + [y, int(t)] for x, y, t in zip(D.features, D.y, D.t))
    write_rows(path, names + ["y", "t"], rows)


def read_dataset(path) -> Dataset:
    """Read a dataset CSV; every column other than ``y`` and ``t`` is a feature."""
    path, header, body = _read_table(path)
    if not body:
        raise CSVParseError(path, None, None, "no data rows")
    iy, it = _require(path, header, ["y", "t"])
    feat = [i for i in range(len(header)) if i not in (iy, it)]
    F = _float_matrix(path, header, body, feat)
    y = _float_matrix(path, header, body, [iy])[:, 0]
    t = _float_matrix(path, header, body, [it])[:, 0]
    for i, v in enumerate(t):
        if v not in (0.0, 1.0):
            raise CSVParseError(path, i + 2, "t", f"type must be 0 or 1, got {body[i][it].strip()!r}")
    for i in range(len(body)):
        if not np.all(np.isfinite(F[i])) or not math.isfinite(y[i]):
            raise CSVParseError(path, i + 2, None, "non-finite value")
    return Dataset.from_features(F, y, t.astype(np.int8), feature_names=tuple(header[i] for i in feat))


# -- RL episodes -----------------------------------------------------------------


def write_episodes(path, E: Episodes):
    P = np.atleast_2d(E.P)
    dims = [f"p{i + 1}" for i in range(P.shape[1])]
    cons = [f"r{j + 1}" for j in range(E.R.shape[1])]
    rows = (list(p) + [r] + list(R) for p, r, R in zip(P, E.r, E.R))
    write_rows(path, dims + ["r"] + cons, rows)


def read_episodes(path) -> Episodes:
    path, header, body = _read_table(path)
    (ir,) = _require(path, header, ["r"])
    pcols = [i for i, h in enumerate(header) if h.startswith("p") and h[1:].isdigit()]
    rcols = [i for i, h in enumerate(header) if h.startswith("r") and h[1:].isdigit()]
    if not pcols:
        raise CSVParseError(path, None, "p1", "missing column")
    pcols.sort(key=lambda i: int(header[i][1:]))
    rcols.sort(key=lambda i: int(header[i][1:]))
    P = _float_matrix(path, header, body, pcols)
    r = _float_matrix(path, header, body, [ir])[:, 0]
    R = _float_matrix(path, header, body, rcols)
    return Episodes(P, r, R)


# -- trial records ---------------------------------------------------------------

REGRESSION_TAIL = ["true_d", "true_mse", "wall_ms"]
RL_COLUMNS = ["trial", "m", "algo", "outcome", "choice", "true_r", "true_r1", "violation", "wall_ms"]


def regression_header(n_theta):
    return ["trial", "m", "algo", "outcome"] + [f"theta{i + 1}" for i in range(n_theta)] + REGRESSION_TAIL


def read_records(path):
    """Trial or summary rows as a list of dicts; numeric cells become floats, blanks ``None``."""
    path, header, body = _read_table(path)
    out = []
    for i, r in enumerate(body, start=2):
        row = {}
        for h, cell in zip(header, r):
            cell = cell.strip()
            if h in ("algo", "outcome"):
                row[h] = cell
            elif cell == "":
                row[h] = None
            else:
                try:
                    row[h] = float(cell)
                except ValueError:
                    raise CSVParseError(path, i, h, f"not a number: {cell!r}") from None
        out.append(row)
    return out
