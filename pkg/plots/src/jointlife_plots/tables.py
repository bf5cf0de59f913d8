"""CSV loading and validation for the figure renderer.

The renderer never computes mathematics: every plotted number comes from one
of the documented CSV artifacts.  Loading validates the header against the
documented schema and fails with the offending column name.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

SCHEMAS = {
    "sweep": ("contract", "measure", "norm", "epsilon", "lower", "upper"),
    "hlines": ("contract", "measure", "label", "value"),
    "rcurve": ("contract", "copula", "m", "r_m"),
    "calibration": ("contract", "level", "price_at_pi"),
}


class SchemaError(ValueError):
    """A CSV artifact does not match its documented schema."""


def load_table(path: Path, name: str) -> list:
    expected = SCHEMAS[name]
    if not path.exists():
        raise SchemaError(f"{name}: missing input file {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader, ()))
        if header != expected:
            missing = [c for c in expected if c not in header]
            extra = [c for c in header if c not in expected]
            detail = []
            if missing:
                detail.append(f"missing columns: {', '.join(missing)}")
            if extra:
                detail.append(f"unexpected columns: {', '.join(extra)}")
            raise SchemaError(f"{name}: header mismatch ({'; '.join(detail) or header})")
        rows = [dict(zip(expected, row)) for row in reader]
    for row in rows:
        for col in expected:
            if col in ("epsilon", "lower", "upper", "value", "r_m", "level",
                       "price_at_pi"):
                row[col] = float(row[col])
            elif col == "m":
                row[col] = int(row[col])
    return rows


def load_samples(path: Path) -> np.ndarray:
    if not path.exists():
        raise SchemaError(f"samples: missing input file {path}")
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "payoff":
            raise SchemaError(f"samples: header mismatch (expected 'payoff', "
                              f"got {header!r})")
        return np.loadtxt(fh, dtype=float, ndmin=1)


def group_by(rows: list, *keys: str) -> dict:
    out: dict = {}
    for row in rows:
        out.setdefault(tuple(row[k] for k in keys), []).append(row)
    return out


def hline_value(hlines: list, contract: str, measure: str, label: str) -> float:
    for row in hlines:
        if (row["contract"], row["measure"], row["label"]) == (contract, measure, label):
            return row["value"]
    raise SchemaError(f"hlines: no value for ({contract}, {measure}, {label})")


def assert_row_ordering(sweep_rows: list, hlines: list, tol: float = 1e-9) -> None:
    """Pre-draw invariant: lower <= reference <= upper on every sweep row."""
    for row in sweep_rows:
        if row["lower"] > row["upper"] + tol:
            raise SchemaError(
                f"sweep: lower exceeds upper at {row['contract']}/"
                f"{row['measure']}/eps={row['epsilon']}")
        ref = hline_value(hlines, row["contract"], row["measure"], "cref")
        if not (row["lower"] - tol <= ref <= row["upper"] + tol):
            raise SchemaError(
                f"sweep: reference value {ref} outside "
                f"[{row['lower']}, {row['upper']}] at {row['contract']}/"
                f"{row['measure']}/eps={row['epsilon']}")
