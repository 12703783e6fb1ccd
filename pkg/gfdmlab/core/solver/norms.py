from __future__ import annotations

import numpy as np

from gfdmlab.common.exceptions import NormError, ParameterError
from gfdmlab.common.logging import get_logger
from gfdmlab.core.mls.rows import satisfies_sign_condition
from gfdmlab.core.mls.schemas import OperatorMatrix
from gfdmlab.core.solver.schemas import MaximumPrincipleReport

logger = get_logger("solver.norms")

MAXIMUM_PRINCIPLE_TOLERANCE = 1e-10


def weighted_l2_norm(values: np.ndarray, weights: np.ndarray) -> float:
    """``(sum_i v_i u_i^2)^(1/2)``."""
    return float(np.sqrt(np.sum(np.asarray(weights) * np.asarray(values) ** 2)))


def discrete_l2_error(u_h: np.ndarray, u_ref: np.ndarray, weights: np.ndarray) -> float:
    """Relative error ``|u - u_h| / |u|`` in the weighted discrete L2 norm."""
    u_h, u_ref, weights = (np.asarray(a, dtype=float) for a in (u_h, u_ref, weights))
    if not (len(u_h) == len(u_ref) == len(weights)):
        raise ParameterError("Solution, reference, and weights differ in length")
    reference = weighted_l2_norm(u_ref, weights)
    if reference == 0.0:
        raise NormError()
    return weighted_l2_norm(u_ref - u_h, weights) / reference


def maximum_principle_check(
    u: np.ndarray,
    operator: OperatorMatrix,
    boundary: np.ndarray,
    q: np.ndarray,
) -> MaximumPrincipleReport:
    """Audit ``min u >= 0`` for a non-negative source.

    The check only passes when every interior row satisfies the sign
    condition; failing rows are counted.
    """
    interior = np.flatnonzero(~np.asarray(boundary, dtype=bool))
    failing = sum(1 for i in interior if not satisfies_sign_condition(operator.row(int(i))))
    min_u = float(np.min(u)) if len(u) else 0.0
    source_ok = bool(np.all(np.asarray(q)[interior] >= 0.0))
    passed = failing == 0 and source_ok and min_u >= -MAXIMUM_PRINCIPLE_TOLERANCE
    if failing:
        logger.warning("Maximum principle audit skipped rows | failing=%d", failing)
    return MaximumPrincipleReport(
        min_u=min_u,
        rows_checked=len(interior),
        failing_rows=failing,
        source_nonnegative=source_ok,
        passed=passed,
    )
