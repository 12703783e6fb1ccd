"""Operator dumps as ``i,j,value`` triples in row-major order."""

from __future__ import annotations

import csv
from pathlib import Path

from gfdmlab.core.mls.schemas import OperatorMatrix
from gfdmlab.core.pointcloud.io import format_float


def save_operator(operator: OperatorMatrix, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["i", "j", "value"])
        for i, j, value in zip(
            operator.row_of_entry.tolist(),
            operator.indices.tolist(),
            operator.data.tolist(),
            strict=True,
        ):
            writer.writerow([i, j, format_float(value)])
