from __future__ import annotations

import numpy as np

from gfdmlab.common.logging import get_logger
from gfdmlab.core.mls.schemas import OperatorMatrix
from gfdmlab.core.solver.linear import apply_dirichlet, solve_sparse
from gfdmlab.core.solver.schemas import LinearSystem

logger = get_logger("solver.elliptic")


def solve_poisson(
    operator: OperatorMatrix,
    q: np.ndarray,
    boundary: np.ndarray,
    rel_tol: float | None = None,
) -> np.ndarray:
    """Solve ``-L u = q`` with ``u = 0`` on boundary points."""
    system = LinearSystem(matrix=-operator.matrix, rhs=np.asarray(q, dtype=float))
    system = apply_dirichlet(system, boundary)
    u = solve_sparse(system, rel_tol)
    u[np.asarray(boundary, dtype=bool)] = 0.0
    logger.info("Poisson problem solved | kind=%s | N=%d", operator.kind.value, operator.n_points)
    return u
