"""Implicit trapezoidal time stepping for ``du/dt = L u + q``."""

from __future__ import annotations

import math
from typing import TYPE_CHECKING

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import factorized

from gfdmlab.common.exceptions import ParameterError
from gfdmlab.common.logging import get_logger
from gfdmlab.config import settings
from gfdmlab.core.mls.schemas import OperatorMatrix
from gfdmlab.core.pointcloud.schemas import PointCloud
from gfdmlab.core.solver.linear import apply_dirichlet, solve_sparse
from gfdmlab.core.solver.schemas import LinearSystem

if TYPE_CHECKING:
    from gfdmlab.core.benchmark.cases import TestCase

logger = get_logger("solver.parabolic")

HEAT_SOLVERS = ("factorized", "iterative")


def cfl_steps(dx: float, final_time: float | None = None) -> int:
    """Smallest step count ``M`` with ``T / M <= CFL_FACTOR * dx^2``."""
    if dx <= 0.0:
        raise ParameterError(f"dx must be positive, got {dx}")
    horizon = settings.FINAL_TIME if final_time is None else final_time
    limit = settings.CFL_FACTOR * dx * dx
    steps = max(1, math.ceil(horizon / limit))
    # the rounded quotient can land one step off an exact multiple of the limit
    if steps > 1 and horizon / (steps - 1) <= limit:
        steps -= 1
    elif horizon / steps > limit:
        steps += 1
    return steps


def cfl_dt(dx: float, final_time: float | None = None) -> float:
    """Largest ``T / M`` not exceeding ``CFL_FACTOR * dx^2``."""
    horizon = settings.FINAL_TIME if final_time is None else final_time
    return horizon / cfl_steps(dx, horizon)


def _trapezoidal_matrices(
    operator: OperatorMatrix, dt: float
) -> tuple[sparse.csr_matrix, sparse.csr_matrix]:
    identity = sparse.identity(operator.n_points, format="csr")
    half = 0.5 * dt * operator.matrix
    return sparse.csr_matrix(identity - half), sparse.csr_matrix(identity + half)


def step_trapezoidal(
    operator: OperatorMatrix,
    u_n: np.ndarray,
    q_n: np.ndarray,
    q_np1: np.ndarray,
    dt: float,
    boundary: np.ndarray,
) -> np.ndarray:
    """One step of ``(I - dt/2 L) u' = (I + dt/2 L) u + dt/2 (q_n + q_np1)``."""
    lhs, rhs_matrix = _trapezoidal_matrices(operator, dt)
    rhs = rhs_matrix @ u_n + 0.5 * dt * (np.asarray(q_n) + np.asarray(q_np1))
    system = apply_dirichlet(LinearSystem(matrix=lhs, rhs=rhs), boundary)
    u = solve_sparse(system)
    u[np.asarray(boundary, dtype=bool)] = 0.0
    return u


def solve_heat(
    operator: OperatorMatrix,
    case: TestCase,
    cloud: PointCloud,
    dt: float,
    final_time: float | None = None,
    linear_solver: str | None = None,
) -> np.ndarray:
    """March from ``u(x, 0)`` to ``t = T`` in uniform trapezoidal steps.

    With the ``factorized`` solver one sparse LU of the constant left-hand
    matrix serves every step; ``iterative`` goes through :func:`solve_sparse`.
    """
    horizon = settings.FINAL_TIME if final_time is None else final_time
    method = settings.HEAT_LINEAR_SOLVER if linear_solver is None else linear_solver
    if method not in HEAT_SOLVERS:
        raise ParameterError(f"Unknown heat linear solver {method!r}, expected {HEAT_SOLVERS}")
    if dt <= 0.0:
        raise ParameterError(f"Time step must be positive, got {dt}")
    n_steps = max(1, round(horizon / dt))
    dt = horizon / n_steps

    boundary = cloud.is_boundary
    u = np.where(boundary, 0.0, case.solution(cloud.points, 0.0))
    lhs, rhs_matrix = _trapezoidal_matrices(operator, dt)
    dirichlet_lhs = apply_dirichlet(LinearSystem(matrix=lhs, rhs=np.zeros(len(u))), boundary)
    solve = factorized(dirichlet_lhs.matrix.tocsc()) if method == "factorized" else None

    q_prev = case.source(cloud.points, 0.0)
    for step in range(1, n_steps + 1):
        q_next = case.source(cloud.points, step * dt)
        rhs = rhs_matrix @ u + 0.5 * dt * (q_prev + q_next)
        rhs[boundary] = 0.0
        if solve is not None:
            u = np.asarray(solve(rhs))
        else:
            u = solve_sparse(LinearSystem(matrix=dirichlet_lhs.matrix, rhs=rhs))
        u[boundary] = 0.0
        q_prev = q_next

    logger.info(
        "Heat equation integrated | kind=%s | N=%d | steps=%d | dt=%.3e | solver=%s",
        operator.kind.value,
        operator.n_points,
        n_steps,
        dt,
        method,
    )
    return u
