"""Consistency checks: monomial reproduction of MLS operators and diffusion moments."""

from __future__ import annotations

from collections.abc import Callable, Sequence

import numpy as np

from gfdmlab.common.enums import ReconstructionScheme, VerificationSuite
from gfdmlab.common.logging import get_logger
from gfdmlab.config import settings
from gfdmlab.core.benchmark.cases import (
    exp_diffusivity,
    exp_diffusivity_gradient,
    exp_diffusivity_laplacian,
)
from gfdmlab.core.diffusion.ddo import build_ddo
from gfdmlab.core.diffusion.field import attach_gradients, sample_field
from gfdmlab.core.diffusion.mls_diffusion import build_mls_diffusion, diffusion_rhs
from gfdmlab.core.diffusion.schemas import DiffusivityField
from gfdmlab.core.mls.assembly import SUPPORTED_ORDERS, build_laplace
from gfdmlab.core.mls.basis import MonomialBasis, rhs_laplace
from gfdmlab.core.mls.schemas import OperatorMatrix
from gfdmlab.core.verification.orders import (
    RefinementLevel,
    exact_results,
    format_alpha,
    moment_residuals,
    order_results,
    refinement_level,
    resolve_h_list,
)
from gfdmlab.core.verification.schemas import CheckResult, VerificationReport

logger = get_logger("verification.consistency")

OperatorBuilder = Callable[[RefinementLevel], OperatorMatrix]


def _field(level: RefinementLevel) -> DiffusivityField:
    field = sample_field(
        level.cloud, exp_diffusivity, exp_diffusivity_gradient, exp_diffusivity_laplacian
    )
    return attach_gradients(field, level.cloud, level.stencils)


def laplace_builder(order: int) -> OperatorBuilder:
    def build(level: RefinementLevel) -> OperatorMatrix:
        return build_laplace(level.cloud, level.stencils, order)

    return build


def exact_reproduction(
    check: str,
    builder: OperatorBuilder,
    basis: MonomialBasis,
    targets: Callable[[RefinementLevel], np.ndarray],
    levels: Sequence[RefinementLevel],
) -> list[CheckResult]:
    """Max scaled monomial residual per level, asserted at round-off."""
    per_level = []
    for level in levels:
        residual, magnitude = moment_residuals(builder(level), basis.exponents, targets(level))
        scaled = np.abs(residual) / np.maximum(magnitude, np.finfo(float).tiny)
        per_level.append(scaled.max(axis=0))
    table = np.vstack(per_level)
    results = []
    for k, alpha in enumerate(basis.multi_indices()):
        results.extend(exact_results(check, format_alpha(alpha), levels, table[:, k].tolist()))
    return results


def ddo_consistency(
    levels: Sequence[RefinementLevel], order: int, scheme: ReconstructionScheme
) -> list[CheckResult]:
    """Diffusion moments of the DDO against ``0, d_k lambda, 2 delta lambda, 0``.

    ``alpha = 0`` is exact; the other moments are order regressions.
    """
    basis = MonomialBasis.of_degree(order)
    check = f"consistency.ddo{order}_{scheme.value}"
    zero_moment: list[float] = []
    residuals: dict[tuple[int, int], list[float]] = {a: [] for a in basis.multi_indices()[1:]}
    for level in levels:
        field = _field(level)
        laplace = build_laplace(level.cloud, level.stencils, order)
        operator = build_ddo(laplace, field, scheme)
        targets = np.zeros((level.cloud.n_points, basis.size))
        gradient = exp_diffusivity_gradient(level.cloud.points)
        targets[:, basis.index_of((1, 0))] = gradient[:, 0]
        targets[:, basis.index_of((0, 1))] = gradient[:, 1]
        targets[:, basis.index_of((2, 0))] = 2.0 * field.values
        targets[:, basis.index_of((0, 2))] = 2.0 * field.values
        residual, magnitude = moment_residuals(operator, basis.exponents, targets)
        interior = level.cloud.interior
        zero_moment.append(float(np.max(np.abs(residual[:, 0]) / magnitude[:, 0])))
        for k, alpha in enumerate(basis.multi_indices()[1:], start=1):
            residuals[alpha].append(float(np.max(np.abs(residual[interior, k]))))

    results = exact_results(check, format_alpha((0, 0)), levels, zero_moment)
    threshold = 1.0 - settings.ORDER_SLACK
    for alpha, values in residuals.items():
        results.extend(order_results(check, format_alpha(alpha), levels, values, threshold))
    return results


def check_consistency_suite(
    operator_builder: OperatorBuilder | None = None,
    basis: MonomialBasis | None = None,
    h_list: Sequence[float] | None = None,
    seed: int | None = None,
    scheme: ReconstructionScheme | str = ReconstructionScheme.AM,
) -> VerificationReport:
    """Monomial reproduction on a sequence of clouds.

    With an explicit ``operator_builder`` only that operator is checked
    against the Laplace targets of ``basis``.  Otherwise the suite covers the
    MLS Laplacians of every supported order, MLS diffusion against its own
    targets, and the DDO moments.
    """
    seed = settings.DEFAULT_SEED if seed is None else seed
    hs = resolve_h_list(h_list)
    levels = [refinement_level(h, seed) for h in hs]
    scheme = ReconstructionScheme(scheme)
    report = VerificationReport(suite=VerificationSuite.CONSISTENCY, seed=seed, h_list=hs)

    def laplace_targets(b: MonomialBasis) -> Callable[[RefinementLevel], np.ndarray]:
        return lambda level: np.tile(rhs_laplace(b), (level.cloud.n_points, 1))

    if operator_builder is not None:
        chosen = basis or MonomialBasis.of_degree(2)
        report.results.extend(
            exact_reproduction(
                "consistency.custom", operator_builder, chosen, laplace_targets(chosen), levels
            )
        )
        return report

    for order in SUPPORTED_ORDERS:
        b = MonomialBasis.of_degree(order)
        report.results.extend(
            exact_reproduction(
                f"consistency.laplace{order}", laplace_builder(order), b, laplace_targets(b), levels
            )
        )

    mls_basis = MonomialBasis.of_degree(2)
    report.results.extend(
        exact_reproduction(
            "consistency.mls_diffusion2",
            lambda level: build_mls_diffusion(level.cloud, level.stencils, _field(level), 2),
            mls_basis,
            lambda level: diffusion_rhs(mls_basis, _field(level)),
            levels,
        )
    )
    for order in SUPPORTED_ORDERS:
        report.results.extend(ddo_consistency(levels, order, scheme))

    logger.info(
        "Consistency suite finished | levels=%d | checks=%d | failures=%d",
        len(levels),
        report.asserted,
        len(report.failures),
    )
    return report
