"""Row-level MLS solves and the corrections applied to a single row.

Each operator row is the minimum weighted norm solution of the consistency
conditions ``K c = b``, i.e. ``c = W^2 K^T (K W^2 K^T)^-1 b``.  The monomials
are scaled by the stencil radius so the constraint matrix is well conditioned
independently of ``h``; the right-hand side is scaled to match, so the
returned coefficients belong to the unscaled operator.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from gfdmlab.common.exceptions import ParameterError, SingularStencilError
from gfdmlab.common.logging import get_logger
from gfdmlab.config import settings
from gfdmlab.core.mls.basis import MonomialBasis, MultiIndex, monomial
from gfdmlab.core.mls.schemas import OperatorRow
from gfdmlab.core.pointcloud.schemas import LocalStencil

logger = get_logger("mls.rows")

RANK_TOLERANCE = 1e-13


def weight_vector(distances: np.ndarray, radius: float) -> np.ndarray:
    """``w_ij = exp(-|x_j - x_i| / h_i)``."""
    return np.exp(-np.asarray(distances, dtype=float) / radius)


# ---------------------------------------------------------------------------
# Constrained least squares
# ---------------------------------------------------------------------------


def _min_norm_solution(
    constraints: np.ndarray,
    weights: np.ndarray,
    rhs: np.ndarray,
    center: int,
) -> np.ndarray:
    """``W^2 K^T (K W^2 K^T)^-1 b`` with a pivoted-QR fallback on bad conditioning."""
    m, n = constraints.shape
    if n < m:
        raise SingularStencilError(center, f"{n} stencil points for {m} constraints")

    weighted = constraints * weights  # K W
    gram = weighted @ weighted.T
    if np.linalg.cond(gram) <= settings.CONDITION_LIMIT:
        try:
            factor = scipy.linalg.cho_factor(gram)
            return weights**2 * (constraints.T @ scipy.linalg.cho_solve(factor, rhs))
        except np.linalg.LinAlgError:
            pass

    logger.debug("Falling back to pivoted QR | point=%d", center)
    q, r, perm = scipy.linalg.qr(weighted.T, mode="economic", pivoting=True)
    pivots = np.abs(np.diag(r))
    if pivots[0] == 0.0 or pivots[-1] <= RANK_TOLERANCE * pivots[0]:
        raise SingularStencilError(center, "rank-deficient constraint matrix")
    # (K W)[perm] = R^T Q^T
    y = scipy.linalg.solve_triangular(r, rhs[perm], trans="T")
    return weights * (q @ y)


def _scaled_rhs(basis: MonomialBasis, rhs: np.ndarray, radius: float) -> np.ndarray:
    # sum_j c_j ((x_j - x_i) / r)^alpha = r^-|alpha| b_alpha
    return np.asarray(rhs, dtype=float) / radius ** basis.orders.astype(float)


def solve_mls_row(
    stencil: LocalStencil,
    weights: np.ndarray,
    basis: MonomialBasis,
    rhs: np.ndarray,
) -> OperatorRow:
    """Operator row reproducing ``rhs`` exactly on every monomial of ``basis``."""
    if len(rhs) != basis.size:
        raise ParameterError(f"rhs has {len(rhs)} entries for a basis of size {basis.size}")
    constraints = basis.evaluate(stencil.offsets, stencil.radius)
    coefficients = _min_norm_solution(
        constraints, weights, _scaled_rhs(basis, rhs, stencil.radius), stencil.center
    )
    return OperatorRow(
        center=stencil.center,
        indices=stencil.indices,
        coefficients=coefficients,
        offsets=stencil.offsets,
    )


def zero_functional_row(
    stencil: LocalStencil,
    weights: np.ndarray,
    basis: MonomialBasis,
) -> OperatorRow:
    """Row in the kernel of the consistency conditions with ``c_ii = 1``."""
    constraints = basis.evaluate(stencil.offsets, stencil.radius)
    pin = np.zeros((1, stencil.size))
    pin[0, stencil.center_position] = 1.0
    rhs = np.zeros(basis.size + 1)
    rhs[-1] = 1.0
    coefficients = _min_norm_solution(
        np.vstack([constraints, pin]), weights, rhs, stencil.center
    )
    return OperatorRow(
        center=stencil.center,
        indices=stencil.indices,
        coefficients=coefficients,
        offsets=stencil.offsets,
    )


# ---------------------------------------------------------------------------
# Diagonal dominance
# ---------------------------------------------------------------------------


def dominance_objective(row: OperatorRow, zero_row: OperatorRow, alpha: float) -> float:
    """``sum_j (c_ij + alpha c0_ij)^2 / (c_ii + alpha c0_ii)^2``."""
    corrected = row.coefficients + alpha * zero_row.coefficients
    diagonal = corrected[row.center_position]
    return float(np.sum(corrected**2) / diagonal**2)


def optimal_alpha(row: OperatorRow, zero_row: OperatorRow) -> float:
    """Closed-form minimizer of :func:`dominance_objective`.

    The stationarity condition is linear in ``alpha``; returns 0 when its
    denominator vanishes relative to ``sum_j b_j^2``.
    """
    off = row.off_diagonal_mask
    a = row.coefficients[off]
    b = zero_row.coefficients[off]
    d = row.diagonal
    numerator = float(np.sum(a * (b * d - a)))
    denominator = float(np.sum(b * (b * d - a)))
    guard = settings.ALPHA_DENOMINATOR_GUARD * float(np.sum(b * b))
    if denominator == 0.0 or abs(denominator) < guard:
        return 0.0
    return -numerator / denominator


def correct_diagonal_dominance(row: OperatorRow, zero_row: OperatorRow) -> OperatorRow:
    """``c + alpha c0`` with the optimal ``alpha``; consistency conditions are preserved."""
    if not row.same_stencil(zero_row):
        raise ParameterError(f"Row {row.center}: correction needs rows on the same stencil")
    alpha = optimal_alpha(row, zero_row)
    return row.with_coefficients(row.coefficients + alpha * zero_row.coefficients)


def satisfies_sign_condition(row: OperatorRow) -> bool:
    """``c_ii != 0`` and ``c_ij c_ii <= 0`` for every neighbor."""
    diagonal = row.diagonal
    if diagonal == 0.0:
        return False
    return bool(np.all(row.coefficients[row.off_diagonal_mask] * diagonal <= 0.0))


# ---------------------------------------------------------------------------
# Derived operators
# ---------------------------------------------------------------------------


def derive_operator(
    laplace_row: OperatorRow,
    alpha: MultiIndex,
    xi_values: np.ndarray | None = None,
    scale: float = 1.0,
) -> OperatorRow:
    """Off-diagonals ``scale * xi_j c_ij (x_j - x_i)^alpha``.

    The diagonal becomes ``-sum`` of the off-diagonals for ``alpha = 0`` and
    zero otherwise.  ``xi_values`` is aligned with the row's indices;
    ``None`` means ``xi = 1``.
    """
    off = laplace_row.off_diagonal_mask
    xi = np.ones(len(laplace_row.indices)) if xi_values is None else np.asarray(xi_values, float)
    derived = scale * xi * laplace_row.coefficients * monomial(laplace_row.offsets, alpha)
    derived = np.where(off, derived, 0.0)
    if alpha == (0, 0):
        derived[laplace_row.center_position] = -derived[off].sum()
    return laplace_row.with_coefficients(derived)


def derived_gradient(laplace_row: OperatorRow, component: int) -> OperatorRow:
    """``c_ij (x_j - x_i)_k / 2``, an approximation of ``d/dx_k``."""
    if component not in (1, 2):
        raise ParameterError(f"Gradient component must be 1 or 2, got {component}")
    alpha = (1, 0) if component == 1 else (0, 1)
    return derive_operator(laplace_row, alpha, scale=0.5)


def derived_interpolation(laplace_row: OperatorRow, component: int) -> OperatorRow:
    """``c_ij (x_j - x_i)_k^2 / 2``, an averaging operator with zero diagonal."""
    if component not in (1, 2):
        raise ParameterError(f"Interpolation component must be 1 or 2, got {component}")
    alpha = (2, 0) if component == 1 else (0, 2)
    return derive_operator(laplace_row, alpha, scale=0.5)
