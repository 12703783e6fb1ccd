"""Cloud files: UTF-8 CSV with header ``id,x,y,h,is_boundary``."""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from gfdmlab.common.exceptions import FormatError
from gfdmlab.common.logging import get_logger
from gfdmlab.core.pointcloud.schemas import PointCloud, on_square_edge

logger = get_logger("pointcloud.io")

CLOUD_HEADER = ["id", "x", "y", "h", "is_boundary"]


def format_float(value: float) -> str:
    return f"{value:.17g}"


def save_cloud(cloud: PointCloud, path: str | Path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CLOUD_HEADER)
        for i in range(cloud.n_points):
            x, y = cloud.points[i]
            writer.writerow(
                [
                    i,
                    format_float(x),
                    format_float(y),
                    format_float(cloud.h[i]),
                    int(cloud.is_boundary[i]),
                ]
            )
    logger.info("Cloud saved | path=%s | N=%d", path, cloud.n_points)


def _parse_row(row: list[str], line: int, expected_id: int) -> tuple[float, float, float, bool]:
    if len(row) != len(CLOUD_HEADER):
        raise FormatError(f"expected {len(CLOUD_HEADER)} fields, got {len(row)}", line=line)
    try:
        point_id = int(row[0])
        x, y, h = (float(v) for v in row[1:4])
        flag = int(row[4])
    except ValueError as exc:
        raise FormatError(f"unparsable value ({exc})", line=line) from exc

    if point_id != expected_id:
        raise FormatError(f"id {point_id} out of sequence, expected {expected_id}", line=line)
    if not all(math.isfinite(v) for v in (x, y, h)):
        raise FormatError("non-finite value", line=line)
    if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
        raise FormatError(f"point ({x}, {y}) outside the unit square", line=line)
    if h <= 0.0:
        raise FormatError(f"non-positive smoothing length h={h}", line=line)
    if flag not in (0, 1):
        raise FormatError(f"is_boundary must be 0 or 1, got {flag}", line=line)
    if flag and not on_square_edge(np.array([[x, y]]))[0]:
        raise FormatError(f"boundary point ({x}, {y}) is not on the square's edge", line=line)
    return x, y, h, bool(flag)


def load_cloud(path: str | Path) -> PointCloud:
    """Read a cloud file, naming the offending line on any malformed row."""
    path = Path(path)
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [c.strip() for c in header] != CLOUD_HEADER:
            raise FormatError(f"header must be {','.join(CLOUD_HEADER)}", line=1)

        rows: list[tuple[float, float, float, bool]] = []
        for line, row in enumerate(reader, start=2):
            if not row:
                continue
            rows.append(_parse_row(row, line, expected_id=len(rows)))

    if rows:
        x, y, h, flags = (np.array(col) for col in zip(*rows, strict=True))
        points = np.column_stack([x, y])
    else:
        points, h, flags = np.zeros((0, 2)), np.zeros(0), np.zeros(0, dtype=bool)

    logger.info("Cloud loaded | path=%s | N=%d", path, len(points))
    return PointCloud(points=points, h=h, is_boundary=flags)
