from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

DOMAIN_EDGE = -1


@dataclass(frozen=True, eq=False)
class VoronoiCell:
    """Clipped cell of one point.

    ``labels[k]`` names what the edge from ``vertices[k]`` to
    ``vertices[k + 1]`` lies on: the index of the neighbor whose bisector it
    is, or ``DOMAIN_EDGE`` for the square's boundary.
    """

    index: int
    vertices: np.ndarray
    labels: np.ndarray

    @property
    def area(self) -> float:
        if len(self.vertices) < 3:
            return 0.0
        x, y = self.vertices[:, 0], self.vertices[:, 1]
        return 0.5 * float(abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))

    @property
    def edge_lengths(self) -> np.ndarray:
        return np.linalg.norm(np.roll(self.vertices, -1, axis=0) - self.vertices, axis=1)

    @property
    def perimeter(self) -> float:
        return float(self.edge_lengths.sum())

    def circumradius(self, center: np.ndarray) -> float:
        if len(self.vertices) == 0:
            return 0.0
        return float(np.max(np.linalg.norm(self.vertices - center, axis=1)))

    def faces(self) -> dict[int, float]:
        """Total edge length per neighboring point."""
        lengths = self.edge_lengths
        out: dict[int, float] = {}
        for label, length in zip(self.labels.tolist(), lengths.tolist(), strict=True):
            if label != DOMAIN_EDGE:
                out[label] = out.get(label, 0.0) + length
        return out


@dataclass(frozen=True, eq=False)
class VoronoiDiagram:
    """Bounded Voronoi diagram of a cloud clipped to the unit square.

    Faces are stored once per unordered pair with ``face_pairs[f, 0] <
    face_pairs[f, 1]``.
    """

    volumes: np.ndarray
    face_pairs: np.ndarray
    face_measures: np.ndarray
    cells: tuple[VoronoiCell, ...] = ()

    @property
    def n_points(self) -> int:
        return len(self.volumes)

    @property
    def n_faces(self) -> int:
        return len(self.face_measures)

    @cached_property
    def _face_index(self) -> dict[tuple[int, int], float]:
        return {
            (int(i), int(j)): float(m)
            for (i, j), m in zip(self.face_pairs, self.face_measures, strict=True)
        }

    @cached_property
    def _adjacency(self) -> tuple[np.ndarray, np.ndarray]:
        if self.n_faces == 0:
            return np.zeros(self.n_points + 1, dtype=np.int64), np.zeros(0, dtype=np.int64)
        rows = np.concatenate([self.face_pairs[:, 0], self.face_pairs[:, 1]])
        cols = np.concatenate([self.face_pairs[:, 1], self.face_pairs[:, 0]])
        order = np.lexsort((cols, rows))
        counts = np.bincount(rows, minlength=self.n_points)
        return np.concatenate([[0], np.cumsum(counts)]), cols[order]

    def face_measure(self, i: int, j: int) -> float:
        """|Gamma_ij|, zero when the cells do not touch."""
        key = (i, j) if i < j else (j, i)
        return self._face_index.get(key, 0.0)

    def adjacency(self, i: int) -> np.ndarray:
        indptr, indices = self._adjacency
        return indices[indptr[i] : indptr[i + 1]]

    def faces(self) -> list[tuple[int, int, float]]:
        return [
            (int(i), int(j), float(m))
            for (i, j), m in zip(self.face_pairs, self.face_measures, strict=True)
        ]
