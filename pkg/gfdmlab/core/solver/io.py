"""Solution dumps: ``id,x,y,u_h,u_ref,abs_err``."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from gfdmlab.core.pointcloud.io import format_float
from gfdmlab.core.pointcloud.schemas import PointCloud


def save_solution(cloud: PointCloud, u_h: np.ndarray, u_ref: np.ndarray, path: str | Path) -> None:
    errors = np.abs(np.asarray(u_h) - np.asarray(u_ref))
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["id", "x", "y", "u_h", "u_ref", "abs_err"])
        for i in range(cloud.n_points):
            x, y = cloud.points[i]
            writer.writerow(
                [i]
                + [format_float(v) for v in (x, y, u_h[i], u_ref[i], errors[i])]
            )
