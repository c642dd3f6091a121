"""Plain-text file formats: data CSV, chain CSV and ``key = value`` summaries."""

from __future__ import annotations

import csv
import hashlib
import math
from pathlib import Path
from typing import Mapping, Optional

import numpy as np

from .errors import DataValidationError
from .model import NORM_EXACT_TOL

FLOAT_FMT = "%.17g"
UNIT_TOL = 1e-8


def _read_rows(path, ncols: Optional[int], what: str) -> np.ndarray:
    rows = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if ncols is None:
                ncols = len(row)
            if len(row) != ncols:
                raise DataValidationError(
                    f"{path}: row {lineno} has {len(row)} columns, expected {ncols}"
                )
            try:
                vals = [float(c) for c in row]
            except ValueError:
                raise DataValidationError(f"{path}: row {lineno} is not numeric: {row}") from None
            if not all(math.isfinite(v) for v in vals):
                raise DataValidationError(f"{path}: row {lineno} has non-finite values")
            rows.append(vals)
    if not rows:
        raise DataValidationError(f"{path}: no {what} rows")
    return np.array(rows, dtype=float)


def read_data(path, q: Optional[int] = None) -> np.ndarray:
    """Unit vectors, one per row. Norms must be within 1e-8 of one; rows are then renormalised."""
    x = _read_rows(path, q, "data")
    if x.shape[1] < 2:
        raise DataValidationError(f"{path}: need at least two columns")
    norms = np.sqrt(np.sum(x * x, axis=1))
    bad = np.flatnonzero(np.abs(norms - 1.0) > UNIT_TOL)
    if bad.size:
        i = int(bad[0])
        raise DataValidationError(f"{path}: row {i + 1} has norm {norms[i]:.12g}, not a unit vector")
    fix = np.abs(norms - 1.0) > NORM_EXACT_TOL
    x[fix] /= norms[fix, None]
    return x


def write_data(path, x: np.ndarray) -> None:
    np.savetxt(path, x, fmt=FLOAT_FMT, delimiter=",")


def read_chain(path) -> np.ndarray:
    return _read_rows(path, None, "chain")


def write_chain(path, draws: np.ndarray) -> None:
    np.savetxt(path, draws, fmt=FLOAT_FMT, delimiter=",")


def format_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (list, tuple, np.ndarray)):
        return ",".join(format_value(e) for e in v)
    return str(v)


def format_kv(items: Mapping[str, object]) -> str:
    return "".join(f"{k} = {format_value(v)}\n" for k, v in items.items())


def read_kv(path) -> dict:
    out = {}
    for line in Path(path).read_text().splitlines():
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise DataValidationError(f"{path}: malformed summary line {line!r}")
        out[key.strip()] = value.strip()
    return out


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()
