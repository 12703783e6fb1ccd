"""Data structures for discretized domains.

``PointCloud`` holds the points of the unit square together with their
smoothing lengths and boundary flags; ``StencilSet`` holds the radius-based
neighborhoods built on top of a cloud.  Both are immutable once built so
operator assembly can read them from any number of workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from gfdmlab.common.exceptions import ParameterError

BOUNDARY_TOLERANCE = 1e-12


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


def on_square_edge(points: np.ndarray) -> np.ndarray:
    """Points with a coordinate equal to 0 or 1 within ``BOUNDARY_TOLERANCE``."""
    near_zero = np.abs(points) <= BOUNDARY_TOLERANCE
    near_one = np.abs(points - 1.0) <= BOUNDARY_TOLERANCE
    return np.any(near_zero | near_one, axis=1)


# ---------------------------------------------------------------------------
# Point cloud
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PointCloud:
    """Points in the closed unit square with per-point smoothing lengths.

    Attributes
    ----------
    points:
        Coordinates, shape ``(N, 2)``.
    h:
        Smoothing length per point, shape ``(N,)``, strictly positive.
    is_boundary:
        Boolean flag per point; flagged points lie on the square's edges.
    """

    points: np.ndarray
    h: np.ndarray
    is_boundary: np.ndarray

    def __post_init__(self) -> None:
        points = np.ascontiguousarray(self.points, dtype=float).reshape(-1, 2)
        h = np.ascontiguousarray(self.h, dtype=float).reshape(-1)
        flags = np.ascontiguousarray(self.is_boundary, dtype=bool).reshape(-1)

        if not (len(points) == len(h) == len(flags)):
            raise ParameterError(
                f"Field lengths differ: points={len(points)}, h={len(h)}, "
                f"is_boundary={len(flags)}"
            )
        if len(points):
            if np.any(points < 0.0) or np.any(points > 1.0):
                bad = int(np.flatnonzero(np.any((points < 0.0) | (points > 1.0), axis=1))[0])
                raise ParameterError(f"Point {bad} lies outside the unit square")
            if np.any(h <= 0.0) or not np.all(np.isfinite(h)):
                bad = int(np.flatnonzero(~(h > 0.0))[0])
                raise ParameterError(f"Point {bad} has non-positive smoothing length")
            on_edge = on_square_edge(points)
            if np.any(flags & ~on_edge):
                bad = int(np.flatnonzero(flags & ~on_edge)[0])
                raise ParameterError(f"Point {bad} is flagged boundary but lies off the boundary")

        object.__setattr__(self, "points", _frozen(points))
        object.__setattr__(self, "h", _frozen(h))
        object.__setattr__(self, "is_boundary", _frozen(flags))

    @property
    def n_points(self) -> int:
        return len(self.points)

    # Conventional name for the cloud size
    @property
    def N(self) -> int:  # noqa: N802
        return self.n_points

    @property
    def interior(self) -> np.ndarray:
        return ~self.is_boundary

    def scaled(self, factor: float) -> PointCloud:
        """Return a copy with coordinates and smoothing lengths multiplied by ``factor``.

        The result is only valid for ``0 < factor <= 1``; used to check
        scaling behavior of operators.
        """
        return PointCloud(
            points=self.points * factor,
            h=self.h * factor,
            is_boundary=np.zeros(self.n_points, dtype=bool),
        )

    def equals(self, other: PointCloud) -> bool:
        return (
            np.array_equal(self.points, other.points)
            and np.array_equal(self.h, other.h)
            and np.array_equal(self.is_boundary, other.is_boundary)
        )


# ---------------------------------------------------------------------------
# Stencils
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class StencilSet:
    """Neighborhoods ``S_i`` stored in compressed row form.

    ``indices[indptr[i]:indptr[i + 1]]`` lists the members of ``S_i`` in
    ascending order (``i`` included) and ``distances`` the matching
    ``|x_j - x_i|``.  ``radii`` is the effective smoothing length used for
    each point after any growth.
    """

    indptr: np.ndarray
    indices: np.ndarray
    distances: np.ndarray
    radii: np.ndarray
    grown: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))

    def __post_init__(self) -> None:
        grown = self.grown if len(self.grown) else np.zeros(len(self.radii), dtype=bool)
        object.__setattr__(self, "indptr", _frozen(np.asarray(self.indptr, dtype=np.int64)))
        object.__setattr__(self, "indices", _frozen(np.asarray(self.indices, dtype=np.int64)))
        object.__setattr__(self, "distances", _frozen(np.asarray(self.distances, dtype=float)))
        object.__setattr__(self, "radii", _frozen(np.asarray(self.radii, dtype=float)))
        object.__setattr__(self, "grown", _frozen(np.asarray(grown, dtype=bool)))

    @property
    def n_points(self) -> int:
        return len(self.indptr) - 1

    @property
    def sizes(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i] : self.indptr[i + 1]]

    def neighbor_distances(self, i: int) -> np.ndarray:
        return self.distances[self.indptr[i] : self.indptr[i + 1]]

    def size(self, i: int) -> int:
        return int(self.indptr[i + 1] - self.indptr[i])

    def local(self, i: int, cloud: PointCloud) -> LocalStencil:
        indices = self.neighbors(i)
        return LocalStencil(
            center=i,
            indices=indices,
            offsets=cloud.points[indices] - cloud.points[i],
            distances=self.neighbor_distances(i),
            radius=float(self.radii[i]),
        )


@dataclass(frozen=True, eq=False)
class LocalStencil:
    """One neighborhood with offsets ``x_j - x_i`` relative to its center."""

    center: int
    indices: np.ndarray
    offsets: np.ndarray
    distances: np.ndarray
    radius: float

    @classmethod
    def from_points(cls, points: np.ndarray, center: int, radius: float) -> LocalStencil:
        """Stencil made of every given point, indexed in input order."""
        points = np.asarray(points, dtype=float).reshape(-1, 2)
        offsets = points - points[center]
        return cls(
            center=center,
            indices=np.arange(len(points), dtype=np.int64),
            offsets=offsets,
            distances=np.linalg.norm(offsets, axis=1),
            radius=radius,
        )

    @property
    def size(self) -> int:
        return len(self.indices)

    @property
    def center_position(self) -> int:
        hits = np.flatnonzero(self.indices == self.center)
        if len(hits) == 0:
            raise ParameterError(f"Stencil of point {self.center} does not contain the point")
        return int(hits[0])
