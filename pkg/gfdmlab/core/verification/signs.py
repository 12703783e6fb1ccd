"""Sign-condition audits over whole operators."""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np
from scipy import sparse

from gfdmlab.common.enums import ReconstructionScheme, VerificationSuite
from gfdmlab.common.logging import get_logger
from gfdmlab.config import settings
from gfdmlab.core.benchmark.cases import (
    exp_diffusivity,
    exp_diffusivity_gradient,
    exp_diffusivity_laplacian,
    jump_diffusivity,
)
from gfdmlab.core.diffusion.ddo import build_ddo
from gfdmlab.core.diffusion.field import sample_field
from gfdmlab.core.diffusion.fvm import build_fvm_laplace
from gfdmlab.core.mls.assembly import build_laplace
from gfdmlab.core.mls.schemas import OperatorMatrix
from gfdmlab.core.verification.orders import RefinementLevel, refinement_level, resolve_h_list
from gfdmlab.core.verification.schemas import CheckResult, SignReport, VerificationReport
from gfdmlab.core.voronoi.diagram import compute_voronoi

logger = get_logger("verification.signs")


def _row_failures(matrix: sparse.csr_matrix) -> tuple[np.ndarray, np.ndarray]:
    n = matrix.shape[0]
    rows = np.repeat(np.arange(n), np.diff(matrix.indptr))
    diagonal = matrix.diagonal()
    off = rows != matrix.indices
    wrong_sign = off & (matrix.data * diagonal[rows] > 0.0)
    failing = np.zeros(n, dtype=bool)
    failing[rows[wrong_sign]] = True
    zero_diagonal = diagonal == 0.0
    return failing | zero_diagonal, zero_diagonal


def check_sign_conditions(
    matrix: OperatorMatrix | sparse.spmatrix, mask: np.ndarray | None = None
) -> SignReport:
    """Rows with ``c_ii != 0`` and ``c_ij c_ii <= 0`` for all ``j != i``.

    ``mask`` restricts the audit (typically to interior rows).  A zero
    diagonal counts as a violation and is listed separately.
    """
    csr = sparse.csr_matrix(matrix.matrix if isinstance(matrix, OperatorMatrix) else matrix)
    failing, zero_diagonal = _row_failures(csr)
    selected = np.ones(csr.shape[0], dtype=bool) if mask is None else np.asarray(mask, bool)
    violations = np.flatnonzero(failing & selected)
    zeros = np.flatnonzero(zero_diagonal & selected)
    total = int(selected.sum())
    if len(zeros):
        logger.warning("Zero diagonal in audited rows | rows=%d", len(zeros))
    return SignReport(
        rows_total=total,
        rows_dd=total - len(violations),
        violation_indices=violations.tolist(),
        zero_diagonal_indices=zeros.tolist(),
    )


def _fraction_result(
    check: str, level: RefinementLevel, report: SignReport, assert_all: bool
) -> CheckResult:
    return CheckResult(
        check=check,
        param="violation_fraction",
        h=level.h,
        residual=report.violation_fraction,
        threshold=0.0 if assert_all else None,
        passed=report.passed if assert_all else None,
    )


def ddo_inherits_signs(laplace: OperatorMatrix, ddo: OperatorMatrix, mask: np.ndarray) -> int:
    """Rows where the Laplacian passes the sign check but the DDO does not."""
    source_ok = ~_row_failures(laplace.matrix)[0]
    ddo_bad = _row_failures(ddo.matrix)[0]
    return int(np.count_nonzero(source_ok & ddo_bad & mask))


def check_sign_suite(
    h_list: Sequence[float] | None = None,
    seed: int | None = None,
    scheme: ReconstructionScheme | str = ReconstructionScheme.AM,
) -> VerificationReport:
    """FVM rows always pass; DDO rows pass wherever their Laplace row does.

    Violation fractions of the MLS Laplacians are reported without an
    assertion, since the correction does not guarantee the sign pattern.
    """
    seed = settings.DEFAULT_SEED if seed is None else seed
    hs = resolve_h_list(h_list)
    scheme = ReconstructionScheme(scheme)
    report = VerificationReport(suite=VerificationSuite.SIGNS, seed=seed, h_list=hs)

    for h in hs:
        level = refinement_level(h, seed)
        cloud = level.cloud
        interior = cloud.interior

        fvm = build_fvm_laplace(compute_voronoi(cloud), cloud)
        report.results.append(
            _fraction_result("signs.fvm_laplace", level, check_sign_conditions(fvm, interior), True)
        )

        smooth = sample_field(
            cloud, exp_diffusivity, exp_diffusivity_gradient, exp_diffusivity_laplacian
        )
        jump = sample_field(cloud, jump_diffusivity)
        for order, dd in ((2, True), (2, False), (4, False)):
            laplace = build_laplace(cloud, level.stencils, order, dd)
            tag = f"laplace{order}_{'dd' if dd else 'plain'}"
            report.results.append(
                _fraction_result(
                    f"signs.{tag}", level, check_sign_conditions(laplace, interior), False
                )
            )
            for name, field in (("smooth", smooth), ("jump", jump)):
                ddo = build_ddo(laplace, field, scheme)
                broken = ddo_inherits_signs(laplace, ddo, interior)
                report.results.append(
                    CheckResult(
                        check=f"signs.ddo_inherits_{tag}",
                        param=f"field={name},scheme={scheme.value}",
                        h=h,
                        residual=float(broken),
                        threshold=0.0,
                        passed=broken == 0,
                    )
                )

    logger.info(
        "Sign suite finished | levels=%d | checks=%d | failures=%d",
        len(hs),
        report.asserted,
        len(report.failures),
    )
    return report
