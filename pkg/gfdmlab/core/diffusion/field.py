from __future__ import annotations

import numpy as np

from gfdmlab.common.exceptions import ParameterError
from gfdmlab.common.logging import get_logger
from gfdmlab.core.diffusion.schemas import DiffusivityField, ScalarFunction, VectorFunction
from gfdmlab.core.mls.assembly import apply_gradient, build_gradient
from gfdmlab.core.pointcloud.schemas import PointCloud, StencilSet

logger = get_logger("diffusion.field")


def sample_field(
    cloud: PointCloud,
    function: ScalarFunction,
    gradient_function: VectorFunction | None = None,
    laplacian_function: ScalarFunction | None = None,
) -> DiffusivityField:
    return DiffusivityField(
        points=cloud.points,
        values=np.asarray(function(cloud.points), dtype=float).reshape(-1),
        function=function,
        gradient_function=gradient_function,
        laplacian_function=laplacian_function,
    )


def attach_gradients(
    field: DiffusivityField,
    cloud: PointCloud,
    stencils: StencilSet | None = None,
    analytic: bool = False,
) -> DiffusivityField:
    """Per-point ``grad lambda``: second-order MLS gradients of the samples, or analytic."""
    if analytic:
        if field.gradient_function is None:
            raise ParameterError("Analytic diffusivity gradient requested but not available")
        gradients = np.asarray(field.gradient_function(cloud.points), dtype=float).reshape(-1, 2)
        logger.debug("Analytic diffusivity gradients attached | N=%d", cloud.n_points)
        return field.with_gradients(gradients)

    if stencils is None:
        raise ParameterError("Discrete diffusivity gradients need a stencil set")
    gradients = apply_gradient(build_gradient(cloud, stencils), field.values)
    return field.with_gradients(gradients)
