from __future__ import annotations

import numpy as np

from gfdmlab.common.enums import OperatorKind
from gfdmlab.common.exceptions import ParameterError
from gfdmlab.common.logging import get_logger
from gfdmlab.core.diffusion.schemas import DiffusivityField
from gfdmlab.core.mls.assembly import (
    SUPPORTED_ORDERS,
    assemble_rows,
    count_sign_violations,
    default_dd_correction,
)
from gfdmlab.core.mls.basis import MonomialBasis
from gfdmlab.core.mls.schemas import OperatorMatrix
from gfdmlab.core.pointcloud.schemas import PointCloud, StencilSet

logger = get_logger("diffusion.mls")


def diffusion_rhs(basis: MonomialBasis, field: DiffusivityField) -> np.ndarray:
    """Per-point targets: ``d_k lambda`` for ``e_k``, ``2 lambda`` for ``2 e_k``, else 0."""
    if field.gradients is None:
        raise ParameterError("MLS diffusion needs diffusivity gradients")
    rhs = np.zeros((field.n_points, basis.size))
    rhs[:, basis.index_of((1, 0))] = field.gradients[:, 0]
    rhs[:, basis.index_of((0, 1))] = field.gradients[:, 1]
    rhs[:, basis.index_of((2, 0))] = 2.0 * field.values
    rhs[:, basis.index_of((0, 2))] = 2.0 * field.values
    return rhs


def build_mls_diffusion(
    cloud: PointCloud,
    stencils: StencilSet,
    field: DiffusivityField,
    order: int = 2,
    dd_correction: bool | None = None,
) -> OperatorMatrix:
    if order not in SUPPORTED_ORDERS:
        raise ParameterError(f"MLS diffusion order must be one of {SUPPORTED_ORDERS}, got {order}")
    dd = default_dd_correction(order) if dd_correction is None else dd_correction
    basis = MonomialBasis.of_degree(order)
    rows = assemble_rows(cloud, stencils, basis, diffusion_rhs(basis, field), dd_correction=dd)
    operator = OperatorMatrix.from_rows(rows, OperatorKind.DIFFUSION_MLS, order, dd_correction=dd)

    violations = count_sign_violations(operator, cloud.interior)
    if violations:
        logger.warning(
            "MLS diffusion rows fail the sign condition | order=%d | rows=%d", order, violations
        )
    logger.info(
        "MLS diffusion operator assembled | order=%d | dd=%s | N=%d", order, dd, cloud.n_points
    )
    return operator
