"""Accuracy of operators derived from the Laplacian: gradient, interpolation, xi-weighted."""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from gfdmlab.common.enums import VerificationSuite
from gfdmlab.common.logging import get_logger
from gfdmlab.config import settings
from gfdmlab.core.benchmark.cases import exp_diffusivity, exp_diffusivity_gradient
from gfdmlab.core.mls.assembly import (
    SUPPORTED_ORDERS,
    apply_gradient,
    build_derived_gradient,
    build_derived_interpolation,
    build_laplace,
    derive_matrix,
)
from gfdmlab.core.mls.schemas import OperatorMatrix
from gfdmlab.core.verification.orders import (
    exact_results,
    order_results,
    refinement_level,
    resolve_h_list,
)
from gfdmlab.core.verification.schemas import VerificationReport

logger = get_logger("verification.derived")

PI = np.pi

# Derived operators lose one order against the Laplacian they come from.
DERIVED_ORDER_THRESHOLDS = {2: 0.5, 4: 1.5}


def smooth_field(points: np.ndarray) -> np.ndarray:
    return np.sin(PI * points[:, 0]) * np.cos(PI * points[:, 1])


def smooth_field_gradient(points: np.ndarray) -> np.ndarray:
    x, y = points[:, 0], points[:, 1]
    return PI * np.column_stack([np.cos(PI * x) * np.cos(PI * y), -np.sin(PI * x) * np.sin(PI * y)])


def quadratic_field(points: np.ndarray) -> np.ndarray:
    x, y = points[:, 0], points[:, 1]
    return 1.0 + 2.0 * x - y + x * x + 0.5 * x * y - 3.0 * y * y


def quadratic_field_gradient(points: np.ndarray) -> np.ndarray:
    x, y = points[:, 0], points[:, 1]
    return np.column_stack([2.0 + 2.0 * x + 0.5 * y, -1.0 + 0.5 * x - 6.0 * y])


def _scaled_error(approx: np.ndarray, exact: np.ndarray, mask: np.ndarray) -> float:
    scale = max(float(np.max(np.abs(exact[mask]))), 1.0)
    return float(np.max(np.abs(approx[mask] - exact[mask]))) / scale


def _cancellation_error(
    operators: Sequence[OperatorMatrix], values: np.ndarray, exact: np.ndarray, mask: np.ndarray
) -> float:
    """Max ``|A u - exact| / (sum_j |a_ij u_j| + |exact|)`` over ``mask``, all components."""
    worst = 0.0
    for k, op in enumerate(operators):
        magnitude = abs(op.matrix) @ np.abs(values) + np.abs(exact[:, k])
        error = np.abs(op.apply(values) - exact[:, k]) / np.maximum(magnitude, np.finfo(float).tiny)
        worst = max(worst, float(np.max(error[mask])))
    return worst


def xi_weighted_gradient(
    laplace: OperatorMatrix, xi: np.ndarray
) -> tuple[OperatorMatrix, OperatorMatrix]:
    """``c_ij xi_j (x_j - x_i)_k / 2``, approximating ``d_k (xi u)`` at ``x_i``."""
    entries = xi[laplace.indices]
    return (
        derive_matrix(laplace, (1, 0), xi_entries=entries, scale=0.5),
        derive_matrix(laplace, (0, 1), xi_entries=entries, scale=0.5),
    )


def check_derived_operator_orders(
    h_list: Sequence[float] | None = None, seed: int | None = None
) -> VerificationReport:
    """Errors of derived operators on ``u = sin(pi x) cos(pi y)`` and ``xi = exp(x - y^2)``.

    The order-4 derived gradient is also checked for exactness on a quadratic,
    and both derived interpolations for exactness on constants.
    """
    seed = settings.DEFAULT_SEED if seed is None else seed
    hs = resolve_h_list(h_list)
    levels = [refinement_level(h, seed) for h in hs]
    report = VerificationReport(suite=VerificationSuite.DERIVED, seed=seed, h_list=hs)

    for order in SUPPORTED_ORDERS:
        threshold = DERIVED_ORDER_THRESHOLDS[order]
        errors: dict[str, list[float]] = {"gradient": [], "interpolation": [], "xi_gradient": []}
        quadratic: list[float] = []
        constant: list[float] = []
        for level in levels:
            cloud = level.cloud
            interior = cloud.interior
            points = cloud.points
            laplace = build_laplace(cloud, level.stencils, order)
            gradient = build_derived_gradient(laplace)
            interpolation = build_derived_interpolation(laplace)

            u = smooth_field(points)
            errors["gradient"].append(
                _scaled_error(apply_gradient(gradient, u), smooth_field_gradient(points), interior)
            )
            interp = np.column_stack([op.apply(u) for op in interpolation])
            errors["interpolation"].append(
                _scaled_error(interp, np.column_stack([u, u]), interior)
            )

            xi = exp_diffusivity(points)
            exact_xi = xi[:, None] * smooth_field_gradient(points) + (
                exp_diffusivity_gradient(points) * u[:, None]
            )
            errors["xi_gradient"].append(
                _scaled_error(
                    apply_gradient(xi_weighted_gradient(laplace, xi), u), exact_xi, interior
                )
            )

            q = quadratic_field(points)
            exact_q = quadratic_field_gradient(points)
            quadratic.append(_cancellation_error(gradient, q, exact_q, interior))
            ones = np.ones(cloud.n_points)
            constant.append(
                _cancellation_error(interpolation, ones, np.ones((cloud.n_points, 2)), interior)
            )

        check = f"derived.order{order}"
        for name, values in errors.items():
            report.results.extend(order_results(check, name, levels, values, threshold))
        report.results.extend(exact_results(check, "interpolation_of_constant", levels, constant))
        if order >= 4:
            report.results.extend(exact_results(check, "gradient_of_quadratic", levels, quadratic))

    logger.info(
        "Derived operator suite finished | levels=%d | checks=%d | failures=%d",
        len(levels),
        report.asserted,
        len(report.failures),
    )
    return report
