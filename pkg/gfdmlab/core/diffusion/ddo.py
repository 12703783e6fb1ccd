"""Diffusion operators derived from a discrete Laplacian.

Off the diagonal the Laplace coefficients are weighted by the edge
diffusivities, ``c_ij = lambda_ij c^Delta_ij``; the diagonal is minus the sum
of the new off-diagonals, so row sums vanish by construction and the sign
pattern of the Laplacian is inherited whenever every ``lambda_ij > 0``.
"""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from gfdmlab.common.enums import OperatorKind, ReconstructionScheme
from gfdmlab.common.logging import get_logger
from gfdmlab.core.diffusion.reconstruction import edge_diffusivities
from gfdmlab.core.diffusion.schemas import DiffusivityField
from gfdmlab.core.mls.assembly import derive_matrix
from gfdmlab.core.mls.schemas import OperatorMatrix

logger = get_logger("diffusion.ddo")


def weight_by_edges(
    laplace: OperatorMatrix,
    field: DiffusivityField,
    scheme: ReconstructionScheme | str,
    kind: OperatorKind,
) -> OperatorMatrix:
    edge_values, clamps = edge_diffusivities(laplace, field, scheme)
    derived = derive_matrix(laplace, (0, 0), xi_entries=edge_values, kind=kind)
    return replace(derived, edge_values=edge_values, clamp_count=clamps)


def build_ddo(
    laplace: OperatorMatrix,
    field: DiffusivityField,
    scheme: ReconstructionScheme | str = ReconstructionScheme.AM,
) -> OperatorMatrix:
    scheme = ReconstructionScheme(scheme)
    operator = weight_by_edges(laplace, field, scheme, OperatorKind.DIFFUSION_DDO)
    logger.info(
        "Derived diffusion operator assembled | scheme=%s | order=%d | clamps=%d",
        scheme.value,
        laplace.degree,
        operator.clamp_count,
    )
    return operator


def build_ddo_alternative_view(laplace: OperatorMatrix, field: DiffusivityField) -> OperatorMatrix:
    """``(1/2)[L(lambda u) + lambda L u - u L lambda]`` on the Laplacian's sparsity pattern.

    Coincides with the arithmetic-mean DDO whenever the Laplacian's diagonal
    is exactly minus its off-diagonal sum.
    """
    rows = laplace.row_of_entry
    cols = laplace.indices
    lam = field.values
    lap_lambda = laplace.apply(lam)
    data = 0.5 * laplace.data * (lam[cols] + lam[rows])
    diag = rows == cols
    data[diag] -= 0.5 * lap_lambda[rows[diag]]
    return laplace.with_data(
        np.asarray(data), kind=OperatorKind.DIFFUSION_DDO, edge_values=None, clamp_count=0
    )
