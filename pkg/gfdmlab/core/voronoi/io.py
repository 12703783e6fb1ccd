"""Debug dumps of a Voronoi diagram: ``i,volume`` and ``i,j,face_measure``."""

from __future__ import annotations

import csv
from pathlib import Path

from gfdmlab.core.pointcloud.io import format_float
from gfdmlab.core.voronoi.schemas import VoronoiDiagram


def save_volumes(diagram: VoronoiDiagram, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["i", "volume"])
        for i, volume in enumerate(diagram.volumes.tolist()):
            writer.writerow([i, format_float(volume)])


def save_faces(diagram: VoronoiDiagram, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["i", "j", "face_measure"])
        for i, j, measure in diagram.faces():
            writer.writerow([i, j, format_float(measure)])
