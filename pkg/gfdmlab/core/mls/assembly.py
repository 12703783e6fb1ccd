from __future__ import annotations

import numpy as np

from gfdmlab.common.enums import OperatorKind
from gfdmlab.common.exceptions import ParameterError
from gfdmlab.common.logging import get_logger
from gfdmlab.core.mls.basis import MonomialBasis, MultiIndex, monomial, rhs_gradient, rhs_laplace
from gfdmlab.core.mls.rows import (
    correct_diagonal_dominance,
    satisfies_sign_condition,
    solve_mls_row,
    weight_vector,
    zero_functional_row,
)
from gfdmlab.core.mls.schemas import OperatorMatrix, OperatorRow
from gfdmlab.core.pointcloud.schemas import LocalStencil, PointCloud, StencilSet

logger = get_logger("mls.assembly")

SUPPORTED_ORDERS = (2, 4)


def default_dd_correction(order: int) -> bool:
    """Diagonal-dominance correction is on for second order and off for fourth."""
    return order == 2


def _check_compatible(cloud: PointCloud, stencils: StencilSet) -> None:
    if stencils.n_points != cloud.n_points:
        raise ParameterError(
            f"Stencil set covers {stencils.n_points} points, cloud has {cloud.n_points}"
        )


def assemble_rows(
    cloud: PointCloud,
    stencils: StencilSet,
    basis: MonomialBasis,
    rhs: np.ndarray,
    dd_correction: bool = False,
) -> list[OperatorRow]:
    """One MLS row per point; ``rhs`` is shared ``(m,)`` or per point ``(N, m)``."""
    _check_compatible(cloud, stencils)
    rhs = np.asarray(rhs, dtype=float)
    per_point = rhs.ndim == 2
    rows: list[OperatorRow] = []
    for i in range(cloud.n_points):
        stencil: LocalStencil = stencils.local(i, cloud)
        weights = weight_vector(stencil.distances, stencil.radius)
        row = solve_mls_row(stencil, weights, basis, rhs[i] if per_point else rhs)
        if dd_correction:
            row = correct_diagonal_dominance(row, zero_functional_row(stencil, weights, basis))
        rows.append(row)
    return rows


def count_sign_violations(operator: OperatorMatrix, mask: np.ndarray | None = None) -> int:
    """Rows (restricted to ``mask``) that fail ``c_ii != 0, c_ij c_ii <= 0``."""
    selected = range(operator.n_points) if mask is None else np.flatnonzero(mask)
    return sum(1 for i in selected if not satisfies_sign_condition(operator.row(int(i))))


def build_laplace(
    cloud: PointCloud,
    stencils: StencilSet,
    order: int = 2,
    dd_correction: bool | None = None,
) -> OperatorMatrix:
    """Order-``p`` discrete Laplacian; boundary rows are assembled too."""
    if order not in SUPPORTED_ORDERS:
        raise ParameterError(f"Laplace order must be one of {SUPPORTED_ORDERS}, got {order}")
    dd = default_dd_correction(order) if dd_correction is None else dd_correction
    basis = MonomialBasis.of_degree(order)
    rows = assemble_rows(cloud, stencils, basis, rhs_laplace(basis), dd_correction=dd)
    operator = OperatorMatrix.from_rows(rows, OperatorKind.LAPLACE, order, dd_correction=dd)

    violations = count_sign_violations(operator, cloud.interior)
    if violations:
        logger.warning(
            "Laplace rows fail the sign condition | order=%d | dd=%s | rows=%d",
            order,
            dd,
            violations,
        )
    logger.info(
        "Laplace operator assembled | order=%d | dd=%s | N=%d | nnz=%d",
        order,
        dd,
        operator.n_points,
        operator.matrix.nnz,
    )
    return operator


def build_gradient(
    cloud: PointCloud, stencils: StencilSet, degree: int = 2
) -> tuple[OperatorMatrix, OperatorMatrix]:
    """Per-component MLS gradient matrices on a degree-``degree`` basis."""
    basis = MonomialBasis.of_degree(degree)
    kinds = (OperatorKind.GRADIENT_X, OperatorKind.GRADIENT_Y)
    result = tuple(
        OperatorMatrix.from_rows(
            assemble_rows(cloud, stencils, basis, rhs_gradient(basis, component)),
            kind,
            degree,
        )
        for component, kind in zip((1, 2), kinds, strict=True)
    )
    logger.info("Gradient operators assembled | degree=%d | N=%d", degree, cloud.n_points)
    return result[0], result[1]


# ---------------------------------------------------------------------------
# Derived operators, vectorized over all stored entries
# ---------------------------------------------------------------------------


def row_sums(operator: OperatorMatrix, values: np.ndarray) -> np.ndarray:
    """Per-row sum of ``values`` given in CSR entry order."""
    return np.bincount(operator.row_of_entry, weights=values, minlength=operator.n_points)


def derive_matrix(
    laplace: OperatorMatrix,
    alpha: MultiIndex,
    xi_entries: np.ndarray | None = None,
    scale: float = 1.0,
    kind: OperatorKind = OperatorKind.DERIVED,
) -> OperatorMatrix:
    """Apply the derived-operator rule to every row of ``laplace`` at once.

    ``xi_entries`` is aligned with the CSR entries; ``None`` means one.
    """
    xi = np.ones(laplace.matrix.nnz) if xi_entries is None else np.asarray(xi_entries, float)
    diag = laplace.diagonal_mask
    data = scale * xi * laplace.data * monomial(laplace.offsets, alpha)
    data = np.where(diag, 0.0, data)
    if alpha == (0, 0):
        data[diag] = -row_sums(laplace, data)[laplace.row_of_entry[diag]]
    return laplace.with_data(data, kind=kind, edge_values=None, clamp_count=0)


def _axis_index(component: int, power: int) -> MultiIndex:
    if component not in (1, 2):
        raise ParameterError(f"Component must be 1 or 2, got {component}")
    return (power, 0) if component == 1 else (0, power)


def build_derived_gradient(laplace: OperatorMatrix) -> tuple[OperatorMatrix, OperatorMatrix]:
    """``c_ij (x_j - x_i)_k / 2`` for k = 1, 2."""
    gx, gy = (derive_matrix(laplace, _axis_index(k, 1), scale=0.5) for k in (1, 2))
    return gx, gy


def build_derived_interpolation(
    laplace: OperatorMatrix,
) -> tuple[OperatorMatrix, OperatorMatrix]:
    """``c_ij (x_j - x_i)_k^2 / 2`` for k = 1, 2."""
    ix, iy = (derive_matrix(laplace, _axis_index(k, 2), scale=0.5) for k in (1, 2))
    return ix, iy


def apply_gradient(
    gradient: tuple[OperatorMatrix, OperatorMatrix], values: np.ndarray
) -> np.ndarray:
    """Stack ``(G_x u, G_y u)`` into an ``(N, 2)`` array."""
    gx, gy = gradient
    return np.column_stack([gx.apply(values), gy.apply(values)])
