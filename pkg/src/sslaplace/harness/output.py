"""Flat-file writers. Column names and JSON keys are part of the schema-1 contract.

field.csv        x,y[,z],region,psi_ss,psi_bem,psi_exact,abs_err_ss,abs_err_bem
scan.csv         k,C1,C2,rms_residual,predicted_C1
convergence.csv  N,max_err_<tag>,rms_err_<tag>,t_<phase>_<tag>,...
report.json      deterministic results (no wall-clock data)
timings.json     wall-clock seconds per solver phase

Floats are written with 17 significant digits; empty cells mean "not
applicable" (solver undefined there, or no oracle).
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ..geometry import FieldGrid


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    x = float(value)
    if math.isnan(x):
        return ""
    return "%.17g" % x


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([v if isinstance(v, str) else fmt(v) for v in row])


def read_csv(path: Path) -> tuple[list[str], list[dict]]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        rows = list(reader)
        return list(reader.fieldnames or []), rows


def write_json(path: Path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")


def field_columns(grid: FieldGrid) -> list[str]:
    coords = ["x", "y"] if grid.points.shape[1] == 2 else ["x", "y", "z"]
    cols = coords + ["region"]
    for tag in ("ss", "bem"):
        if tag in grid.values:
            cols.append(f"psi_{tag}")
    if grid.exact is not None:
        cols.append("psi_exact")
        for tag in ("ss", "bem"):
            if tag in grid.values:
                cols.append(f"abs_err_{tag}")
    return cols


def write_field(path: Path, grid: FieldGrid) -> None:
    cols = field_columns(grid)
    errors = {tag: grid.errors(tag) for tag in grid.values}
    exact = None
    if grid.exact is not None:
        exact = np.where(grid.inside_mask(), grid.exact, np.nan)

    def rows():
        for i, p in enumerate(grid.points):
            row = list(p) + [grid.labels[i].value]
            for tag in ("ss", "bem"):
                if tag in grid.values:
                    row.append(grid.values[tag][i])
            if exact is not None:
                row.append(exact[i])
                for tag in ("ss", "bem"):
                    if tag in grid.values:
                        row.append(errors[tag][i])
            yield row

    write_csv(path, cols, rows())
