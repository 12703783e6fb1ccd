from __future__ import annotations

import numpy as np
import scipy.linalg
from scipy import sparse
from scipy.sparse.linalg import LinearOperator, bicgstab

from gfdmlab.common.exceptions import SolverError
from gfdmlab.common.logging import get_logger
from gfdmlab.config import settings
from gfdmlab.core.solver.schemas import LinearSystem

logger = get_logger("solver.linear")


def apply_dirichlet(system: LinearSystem, boundary: np.ndarray) -> LinearSystem:
    """Replace boundary rows by identity rows with zero right-hand side."""
    boundary = np.asarray(boundary, dtype=bool)
    if not boundary.any():
        return system
    interior = (~boundary).astype(float)
    matrix = sparse.diags(interior) @ system.matrix + sparse.diags(boundary.astype(float))
    rhs = np.where(boundary, 0.0, system.rhs)
    return LinearSystem(matrix=sparse.csr_matrix(matrix), rhs=rhs)


def jacobi_preconditioner(matrix: sparse.csr_matrix) -> LinearOperator:
    diagonal = matrix.diagonal()
    inverse = np.divide(1.0, diagonal, out=np.ones_like(diagonal), where=diagonal != 0.0)
    return LinearOperator(matrix.shape, matvec=lambda x: inverse * np.ravel(x), dtype=float)


def relative_residual(system: LinearSystem, x: np.ndarray) -> float:
    b_norm = float(np.linalg.norm(system.rhs))
    r_norm = float(np.linalg.norm(system.rhs - system.matrix @ x))
    return r_norm / b_norm if b_norm > 0.0 else r_norm


def solve_sparse(system: LinearSystem, rel_tol: float | None = None) -> np.ndarray:
    """Jacobi-preconditioned BiCGSTAB from a zero initial guess.

    Falls back to a dense LU solve on breakdown or when the iteration cap
    ``SOLVER_MAXITER_FACTOR * N`` is hit, as long as ``N`` does not exceed
    ``DENSE_FALLBACK_MAX_N``.
    """
    tol = settings.SOLVER_REL_TOL if rel_tol is None else rel_tol
    n = system.size
    if not np.any(system.rhs):
        return np.zeros(n)

    x, info = bicgstab(
        system.matrix,
        system.rhs,
        x0=np.zeros(n),
        rtol=tol,
        atol=0.0,
        maxiter=settings.SOLVER_MAXITER_FACTOR * n,
        M=jacobi_preconditioner(system.matrix),
    )
    residual = relative_residual(system, x)
    if info == 0 and np.all(np.isfinite(x)):
        logger.debug("BiCGSTAB converged | N=%d | residual=%.3e", n, residual)
        return np.asarray(x)

    if n > settings.DENSE_FALLBACK_MAX_N:
        raise SolverError(residual, detail=f"BiCGSTAB info={info}, N={n}")
    logger.warning(
        "BiCGSTAB failed, using dense solve | N=%d | info=%d | residual=%.3e", n, info, residual
    )
    return scipy.linalg.solve(system.matrix.toarray(), system.rhs)
