from __future__ import annotations

import math

import numpy as np
from scipy.spatial import cKDTree

from gfdmlab.common.exceptions import DegenerateCloudError, ParameterError
from gfdmlab.common.logging import get_logger
from gfdmlab.config import settings
from gfdmlab.core.pointcloud.schemas import PointCloud, StencilSet

logger = get_logger("pointcloud.stencils")

DOMAIN_DIAMETER = math.sqrt(2.0)


def build_stencils(
    cloud: PointCloud,
    min_neighbors: int | None = None,
    growth: float | None = None,
) -> StencilSet:
    """Radius stencils ``S_i = {j : |x_j - x_i| <= h_i}``, grown per point when short.

    A point whose stencil holds fewer than ``min_neighbors`` members has its
    radius multiplied by ``growth`` until the count is met; the final radius
    is recorded as the point's effective smoothing length.
    """
    required = settings.MIN_NEIGHBORS if min_neighbors is None else min_neighbors
    factor = settings.STENCIL_GROWTH if growth is None else growth
    if cloud.n_points == 0:
        raise ParameterError("Cannot build stencils on an empty cloud")
    if required < 1:
        raise ParameterError(f"min_neighbors must be >= 1, got {required}")
    if factor <= 1.0:
        raise ParameterError(f"Stencil growth factor must exceed 1, got {factor}")

    tree = cKDTree(cloud.points)
    radii = cloud.h.copy()
    members = tree.query_ball_point(cloud.points, r=radii, return_sorted=True)

    grown = np.zeros(cloud.n_points, dtype=bool)
    for i in range(cloud.n_points):
        while len(members[i]) < required:
            if radii[i] > DOMAIN_DIAMETER:
                raise DegenerateCloudError(i, float(radii[i]), len(members[i]), required)
            radii[i] *= factor
            members[i] = tree.query_ball_point(cloud.points[i], r=radii[i], return_sorted=True)
            grown[i] = True

    sizes = np.fromiter((len(m) for m in members), dtype=np.int64, count=cloud.n_points)
    indptr = np.concatenate([[0], np.cumsum(sizes)])
    indices = np.concatenate([np.asarray(m, dtype=np.int64) for m in members])
    owners = np.repeat(np.arange(cloud.n_points), sizes)
    distances = np.linalg.norm(cloud.points[indices] - cloud.points[owners], axis=1)

    n_grown = int(grown.sum())
    if n_grown:
        logger.warning(
            "Stencil radius grown | points=%d | interior=%d | max_factor=%.3g",
            n_grown,
            int(np.sum(grown & cloud.interior)),
            float(np.max(radii / cloud.h)),
        )
    logger.info(
        "Stencils built | N=%d | min_size=%d | mean_size=%.1f",
        cloud.n_points,
        int(sizes.min()),
        float(sizes.mean()),
    )
    return StencilSet(
        indptr=indptr, indices=indices, distances=distances, radii=radii, grown=grown
    )


def min_point_distance(cloud: PointCloud) -> float:
    """Smallest pairwise distance, via nearest-neighbor queries on a kd-tree."""
    if cloud.n_points < 2:
        raise ParameterError(f"min_point_distance needs at least 2 points, got {cloud.n_points}")
    distances, _ = cKDTree(cloud.points).query(cloud.points, k=2)
    return float(distances[:, 1].min())
