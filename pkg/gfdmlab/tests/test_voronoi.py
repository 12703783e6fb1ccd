import numpy as np
import pytest
from scipy.spatial import cKDTree

from gfdmlab.common.exceptions import DegenerateInputError
from gfdmlab.core.pointcloud.schemas import PointCloud
from gfdmlab.core.voronoi.diagram import (
    clip_half_plane,
    compute_voronoi,
    nesting_violations,
    norm_weights,
)
from gfdmlab.core.voronoi.schemas import DOMAIN_EDGE


def _interior_cloud(points: np.ndarray, h: float) -> PointCloud:
    return PointCloud(points=points, h=np.full(len(points), h), is_boundary=np.zeros(len(points)))


def _cell_centers(n: int) -> np.ndarray:
    ticks = (np.arange(n) + 0.5) / n
    xx, yy = np.meshgrid(ticks, ticks, indexing="ij")
    return np.column_stack([xx.ravel(), yy.ravel()])


def test_clip_half_plane_labels_the_cut():
    square = [np.array(v, dtype=float) for v in [(0, 0), (1, 0), (1, 1), (0, 1)]]
    labels = [DOMAIN_EDGE] * 4
    vertices, new_labels = clip_half_plane(square, labels, np.array([1.0, 0.0]), 0.5, 7)
    assert len(vertices) == 4
    assert sorted(new_labels).count(7) == 1
    xs = [v[0] for v in vertices]
    assert max(xs) == pytest.approx(0.5)


def test_grid_cells_are_equal_squares():
    diagram = compute_voronoi(_interior_cloud(_cell_centers(4), 0.25))
    assert np.allclose(diagram.volumes, 1.0 / 16.0)
    # 3 shared edges per row and column, 4 rows and 4 columns
    assert diagram.n_faces == 24
    assert np.allclose(diagram.face_measures, 0.25)
    assert np.all(diagram.face_pairs[:, 0] < diagram.face_pairs[:, 1])


def test_grid_diagonal_neighbors_share_no_face():
    diagram = compute_voronoi(_interior_cloud(_cell_centers(4), 0.25))
    # points 0 and 5 are diagonal neighbors (row-major 4x4 layout)
    assert diagram.face_measure(0, 5) == 0.0
    assert diagram.face_measure(0, 1) == pytest.approx(0.25)
    assert diagram.face_measure(1, 0) == diagram.face_measure(0, 1)
    assert sorted(diagram.adjacency(0).tolist()) == [1, 4]


def _corner_grid() -> np.ndarray:
    """4 x 4 grid with spacing 1/3 from the origin, corners included."""
    ticks = np.linspace(0.0, 1.0, 4)
    xx, yy = np.meshgrid(ticks, ticks, indexing="ij")
    return np.column_stack([xx.ravel(), yy.ravel()])


def _raster_volumes(points: np.ndarray, resolution: int = 4096, chunk: int = 256) -> np.ndarray:
    """Fraction of pixel centers nearest to each point."""
    tree = cKDTree(points)
    ticks = (np.arange(resolution) + 0.5) / resolution
    counts = np.zeros(len(points), dtype=np.int64)
    for start in range(0, resolution, chunk):
        xx, yy = np.meshgrid(ticks[start : start + chunk], ticks, indexing="ij")
        _, owner = tree.query(np.column_stack([xx.ravel(), yy.ravel()]))
        counts += np.bincount(owner, minlength=len(points))
    return counts / resolution**2


@pytest.mark.slow
def test_volumes_match_a_raster_count():
    points = np.random.default_rng(5).random((16, 2))
    diagram = compute_voronoi(_interior_cloud(points, 0.3))
    assert np.all(np.abs(diagram.volumes - _raster_volumes(points)) <= 1e-4)


@pytest.mark.slow
def test_corner_grid_volumes_match_a_raster_count():
    points = _corner_grid()
    diagram = compute_voronoi(_interior_cloud(points, 1.0 / 3.0))
    assert np.all(np.abs(diagram.volumes - _raster_volumes(points)) <= 1e-4)


def test_corner_grid_cells_are_exact_rectangles():
    ticks = np.linspace(0.0, 1.0, 4)
    diagram = compute_voronoi(_interior_cloud(_corner_grid(), 1.0 / 3.0))
    # corners own 1/6 x 1/6, edge points 1/6 x 1/3, inner points 1/3 x 1/3
    widths = np.where((ticks == 0.0) | (ticks == 1.0), 1.0 / 6.0, 1.0 / 3.0)
    expected = np.outer(widths, widths).ravel()
    assert np.allclose(diagram.volumes, expected, rtol=0.0, atol=1e-12)


def test_generated_cloud_volumes_tile_the_square(cloud):
    diagram = compute_voronoi(cloud)
    assert diagram.n_points == cloud.n_points
    assert np.all(diagram.volumes > 0.0)
    assert diagram.volumes.sum() == pytest.approx(1.0, abs=1e-10)


def test_closed_cells_have_balanced_face_normals(cloud):
    diagram = compute_voronoi(cloud)
    checked = 0
    for cell in diagram.cells:
        if DOMAIN_EDGE in cell.labels.tolist():
            continue
        i = cell.index
        neighbors = diagram.adjacency(i)
        directions = cloud.points[neighbors] - cloud.points[i]
        normals = directions / np.linalg.norm(directions, axis=1)[:, None]
        measures = np.array([diagram.face_measure(i, int(j)) for j in neighbors])
        assert np.allclose(measures @ normals, 0.0, atol=1e-12)
        checked += 1
    assert checked > 0


def test_faces_stay_within_stencil_reach(cloud):
    diagram = compute_voronoi(cloud)
    assert nesting_violations(cloud, diagram) == 0


def test_norm_weights_is_a_copy(cloud):
    diagram = compute_voronoi(cloud)
    weights = norm_weights(diagram)
    weights[0] = -1.0
    assert diagram.volumes[0] > 0.0


def test_coincident_points_are_rejected():
    points = np.array([[0.1, 0.1], [0.5, 0.5], [0.9, 0.2], [0.5, 0.5]])
    with pytest.raises(DegenerateInputError) as exc_info:
        compute_voronoi(_interior_cloud(points, 0.2))
    assert exc_info.value.indices == (1, 3)
