import numpy as np
import pytest

from gfdmlab.core.benchmark.cases import (
    exp_diffusivity,
    exp_diffusivity_gradient,
    exp_diffusivity_laplacian,
)
from gfdmlab.core.diffusion.field import sample_field
from gfdmlab.core.mls.assembly import build_laplace
from gfdmlab.core.pointcloud.generator import generate_cloud
from gfdmlab.core.pointcloud.schemas import PointCloud, on_square_edge
from gfdmlab.core.pointcloud.stencils import build_stencils

# Small deterministic clouds; the generated one has a few hundred points
CLOUD_H = 0.16
CLOUD_SEED = 7


def make_grid_cloud(n: int, h: float) -> PointCloud:
    """Regular ``n x n`` grid on the closed unit square, edge points flagged."""
    ticks = np.linspace(0.0, 1.0, n)
    xx, yy = np.meshgrid(ticks, ticks, indexing="ij")
    points = np.column_stack([xx.ravel(), yy.ravel()])
    return PointCloud(points=points, h=np.full(len(points), h), is_boundary=on_square_edge(points))


@pytest.fixture(scope="session")
def grid_cloud() -> PointCloud:
    return make_grid_cloud(11, 0.25)


@pytest.fixture(scope="session")
def cloud() -> PointCloud:
    return generate_cloud(CLOUD_H, CLOUD_SEED)


@pytest.fixture(scope="session")
def stencils(cloud):
    return build_stencils(cloud)


@pytest.fixture(scope="session")
def laplace2(cloud, stencils):
    return build_laplace(cloud, stencils, 2)


@pytest.fixture(scope="session")
def laplace2_plain(cloud, stencils):
    return build_laplace(cloud, stencils, 2, dd_correction=False)


@pytest.fixture(scope="session")
def laplace4(cloud, stencils):
    return build_laplace(cloud, stencils, 4)


@pytest.fixture(scope="session")
def exp_field(cloud):
    return sample_field(cloud, exp_diffusivity, exp_diffusivity_gradient, exp_diffusivity_laplacian)
