"""Moment identities of diffusion rows, reported as residuals against their targets.

For a diffusion row ``c_ij`` and multi-index ``alpha`` with ``d = x_j - x_i``:

* ``diffusion``: ``sum c_ij d^alpha`` against ``0``, ``d_k lambda``,
  ``2 delta_kl lambda`` and ``0`` for ``|alpha| = 0, 1, 2, >2``.
* ``scaled_monomial``: ``sum c_ij d^alpha / lambda_j`` against
  ``-Laplace log lambda``, ``-d_k log lambda``, ``2 delta_kl`` and ``0``.
* ``reconstruction_scaled``: ``sum c_ij d^alpha / lambda_ij`` against
  ``-Laplace lambda / (4 lambda)`` for ``alpha = 0`` and the Laplace targets
  for ``1 <= |alpha| <= p``; the latter hold exactly for derived rows.

Targets that need analytic derivatives the field does not provide are
reported as skipped.
"""

from __future__ import annotations

import numpy as np

from gfdmlab.core.diffusion.schemas import DiffusivityField, ResidualEntry
from gfdmlab.core.mls.basis import MonomialBasis, monomial
from gfdmlab.core.mls.schemas import OperatorRow


def _axis(alpha: tuple[int, int]) -> int:
    return 0 if alpha == (1, 0) else 1


def _laplace_target(alpha: tuple[int, int]) -> float:
    return 2.0 if alpha in ((2, 0), (0, 2)) else 0.0


def _entry(
    identity: str, alpha: tuple[int, int], value: float, target: float | None
) -> ResidualEntry:
    if target is None:
        return ResidualEntry(identity=identity, alpha=alpha, value=value, skipped=True)
    return ResidualEntry(
        identity=identity, alpha=alpha, value=value, target=target, residual=value - target
    )


def diffusion_consistency_residuals(
    row: OperatorRow, field: DiffusivityField, degree: int
) -> list[ResidualEntry]:
    i = row.center
    lam = float(field.values[i])
    grad = field.analytic_gradient_at(i)
    entries = []
    for alpha in MonomialBasis.of_degree(degree).multi_indices():
        value = float(np.dot(row.coefficients, monomial(row.offsets, alpha)))
        order = sum(alpha)
        target: float | None
        if order == 1:
            target = None if grad is None else float(grad[_axis(alpha)])
        elif order == 2:
            target = _laplace_target(alpha) * lam
        else:
            target = 0.0
        entries.append(_entry("diffusion", alpha, value, target))
    return entries


def enrichment_residuals(
    ddo_row: OperatorRow,
    reconstructed: np.ndarray,
    field: DiffusivityField,
    degree: int,
) -> list[ResidualEntry]:
    """Both enrichment identities for one row.

    ``reconstructed`` is aligned with the row: ``lambda_ij`` for neighbors and
    ``lambda_i`` at the center, i.e. the values the row was built with.
    """
    i = ddo_row.center
    lam_i = float(field.values[i])
    lam_j = field.values[ddo_row.indices]
    grad = field.analytic_gradient_at(i)
    lap = field.analytic_laplacian_at(i)

    entries = []
    for alpha in MonomialBasis.of_degree(degree).multi_indices():
        moments = ddo_row.coefficients * monomial(ddo_row.offsets, alpha)
        order = sum(alpha)

        scaled_target: float | None
        if order == 0:
            scaled_target = (
                None
                if grad is None or lap is None
                else -(lap / lam_i - float(np.dot(grad, grad)) / lam_i**2)
            )
        elif order == 1:
            scaled_target = None if grad is None else -float(grad[_axis(alpha)]) / lam_i
        else:
            scaled_target = _laplace_target(alpha)
        entries.append(
            _entry("scaled_monomial", alpha, float(np.sum(moments / lam_j)), scaled_target)
        )

        recon_target: float | None = _laplace_target(alpha)
        if order == 0:
            recon_target = None if lap is None else -lap / (4.0 * lam_i)
        entries.append(
            _entry(
                "reconstruction_scaled",
                alpha,
                float(np.sum(moments / np.asarray(reconstructed, dtype=float))),
                recon_target,
            )
        )
    return entries
