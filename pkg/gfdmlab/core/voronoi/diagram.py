"""Bounded Voronoi cells by half-plane clipping of the unit square.

Every cell starts as the square and is cut, in order of increasing distance,
by the perpendicular bisectors between its point and the candidate
neighbors.  Candidates come from a kd-tree radius query that starts at
``2 h_i`` and doubles until the cell's circumradius is at most half the query
radius, at which point no farther bisector can reach the cell.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.spatial import cKDTree

from gfdmlab.common.exceptions import DegenerateInputError
from gfdmlab.common.logging import get_logger
from gfdmlab.core.pointcloud.schemas import PointCloud
from gfdmlab.core.voronoi.schemas import DOMAIN_EDGE, VoronoiCell, VoronoiDiagram

logger = get_logger("voronoi.diagram")

EDGE_TOLERANCE = 1e-12
DOMAIN_DIAMETER = math.sqrt(2.0)

_UNIT_SQUARE = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


# ---------------------------------------------------------------------------
# Clipping
# ---------------------------------------------------------------------------


def clip_half_plane(
    vertices: list[np.ndarray],
    labels: list[int],
    normal: np.ndarray,
    offset: float,
    label: int,
) -> tuple[list[np.ndarray], list[int]]:
    """Keep the part of a convex polygon with ``x . normal <= offset``.

    The edge created along the cut line carries ``label``; surviving edges
    keep their own.
    """
    out_vertices: list[np.ndarray] = []
    out_labels: list[int] = []
    n = len(vertices)
    sides = [float(np.dot(v, normal)) - offset for v in vertices]
    for k in range(n):
        p, q = vertices[k], vertices[(k + 1) % n]
        sp, sq = sides[k], sides[(k + 1) % n]
        p_in, q_in = sp <= 0.0, sq <= 0.0
        if p_in:
            out_vertices.append(p)
            out_labels.append(labels[k])
            if not q_in:
                out_vertices.append(p + (sp / (sp - sq)) * (q - p))
                out_labels.append(label)
        elif q_in:
            out_vertices.append(p + (sp / (sp - sq)) * (q - p))
            out_labels.append(labels[k])
    return out_vertices, out_labels


def _prune_short_edges(vertices: np.ndarray, labels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if len(vertices) == 0:
        return vertices, labels
    lengths = np.linalg.norm(np.roll(vertices, -1, axis=0) - vertices, axis=1)
    keep = lengths >= EDGE_TOLERANCE
    return vertices[keep], labels[keep]


def compute_cell(
    index: int,
    points: np.ndarray,
    candidates: np.ndarray,
) -> VoronoiCell:
    """Clip the unit square against the bisectors with ``candidates``.

    ``candidates`` must be sorted by increasing distance to ``points[index]``.
    Clipping stops early once a candidate is farther than twice the current
    circumradius.
    """
    center = points[index]
    center_sq = float(np.dot(center, center))
    vertices = [v.copy() for v in _UNIT_SQUARE]
    labels = [DOMAIN_EDGE] * 4
    radius = max(float(np.linalg.norm(v - center)) for v in vertices)

    for j in candidates.tolist():
        other = points[j]
        if float(np.linalg.norm(other - center)) > 2.0 * radius:
            break
        normal = other - center
        offset = 0.5 * (float(np.dot(other, other)) - center_sq)
        vertices, labels = clip_half_plane(vertices, labels, normal, offset, j)
        if not vertices:
            break
        radius = max(float(np.linalg.norm(v - center)) for v in vertices)

    vertex_array = np.array(vertices, dtype=float).reshape(-1, 2)
    label_array = np.array(labels, dtype=np.int64)
    vertex_array, label_array = _prune_short_edges(vertex_array, label_array)
    return VoronoiCell(index=index, vertices=vertex_array, labels=label_array)


def _check_distinct(tree: cKDTree, points: np.ndarray) -> None:
    if len(points) < 2:
        return
    distances, neighbors = tree.query(points, k=2)
    coincident = np.flatnonzero(distances[:, 1] == 0.0)
    if len(coincident):
        i = int(coincident[0])
        # with duplicates the nearest hit may be the point itself
        j = int(neighbors[i, 1]) if int(neighbors[i, 1]) != i else int(neighbors[i, 0])
        first, second = sorted((i, j))
        raise DegenerateInputError(first, second)


def _cell_with_doubling(i: int, cloud: PointCloud, tree: cKDTree) -> VoronoiCell:
    center = cloud.points[i]
    query_radius = 2.0 * float(cloud.h[i])
    while True:
        found = np.asarray(tree.query_ball_point(center, r=query_radius), dtype=np.int64)
        found = found[found != i]
        dist = np.linalg.norm(cloud.points[found] - center, axis=1)
        order = np.lexsort((found, dist))
        cell = compute_cell(i, cloud.points, found[order])
        if cell.circumradius(center) <= 0.5 * query_radius or query_radius >= 2.0 * DOMAIN_DIAMETER:
            return cell
        query_radius *= 2.0


# ---------------------------------------------------------------------------
# Public API
# ---------------------------------------------------------------------------


def compute_voronoi(cloud: PointCloud) -> VoronoiDiagram:
    """Voronoi diagram of ``cloud`` clipped to the unit square.

    Raises :class:`DegenerateInputError` naming both indices when two points
    coincide.
    """
    tree = cKDTree(cloud.points)
    _check_distinct(tree, cloud.points)

    cells = tuple(_cell_with_doubling(i, cloud, tree) for i in range(cloud.n_points))
    volumes = np.array([cell.area for cell in cells], dtype=float)

    sides: dict[tuple[int, int], list[float]] = {}
    for cell in cells:
        for j, length in cell.faces().items():
            key = (cell.index, j) if cell.index < j else (j, cell.index)
            sides.setdefault(key, []).append(length)

    pairs = sorted(sides)
    face_pairs = np.array(pairs, dtype=np.int64).reshape(-1, 2)
    face_measures = np.array([float(np.mean(sides[key])) for key in pairs], dtype=float)
    keep = face_measures > 0.0
    face_pairs, face_measures = face_pairs[keep], face_measures[keep]

    diagram = VoronoiDiagram(
        volumes=volumes, face_pairs=face_pairs, face_measures=face_measures, cells=cells
    )
    nesting_violations(cloud, diagram)
    logger.info(
        "Voronoi diagram built | N=%d | faces=%d | total_volume=%.12f",
        cloud.n_points,
        diagram.n_faces,
        float(volumes.sum()),
    )
    return diagram


def nesting_violations(cloud: PointCloud, diagram: VoronoiDiagram) -> int:
    """Number of faces whose endpoints are farther apart than ``2 max(h_i, h_j)``."""
    if diagram.n_faces == 0:
        return 0
    i, j = diagram.face_pairs[:, 0], diagram.face_pairs[:, 1]
    dist = np.linalg.norm(cloud.points[j] - cloud.points[i], axis=1)
    reach = 2.0 * np.maximum(cloud.h[i], cloud.h[j])
    violations = int(np.sum(dist > reach))
    if violations:
        logger.warning("Voronoi faces beyond stencil reach | faces=%d", violations)
    return violations


def norm_weights(diagram: VoronoiDiagram) -> np.ndarray:
    """Quadrature weights ``v_i = |Omega_i|`` for the discrete L2 norm."""
    return diagram.volumes.copy()
