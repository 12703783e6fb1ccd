"""Shared plumbing for the verification suites: refinement levels and order fits."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from gfdmlab.config import settings
from gfdmlab.core.mls.basis import monomials
from gfdmlab.core.mls.schemas import OperatorMatrix
from gfdmlab.core.pointcloud.generator import generate_cloud
from gfdmlab.core.pointcloud.schemas import PointCloud, StencilSet
from gfdmlab.core.pointcloud.stencils import build_stencils
from gfdmlab.core.verification.schemas import CheckResult

EXACT_TOLERANCE = 1e-8
VANISHING_RESIDUAL = 1e-13


@dataclass(frozen=True, eq=False)
class RefinementLevel:
    h: float
    cloud: PointCloud
    stencils: StencilSet

    @property
    def spacing(self) -> float:
        """Effective spacing ``N^(-1/2)`` used as the abscissa of order fits."""
        return float(self.cloud.n_points) ** -0.5


@lru_cache(maxsize=8)
def refinement_level(h: float, seed: int) -> RefinementLevel:
    cloud = generate_cloud(h, seed)
    return RefinementLevel(h=h, cloud=cloud, stencils=build_stencils(cloud, settings.MIN_NEIGHBORS))


def resolve_h_list(h_list: Sequence[float] | None) -> list[float]:
    return [float(h) for h in (settings.VERIFY_H_LIST if h_list is None else h_list)]


def fit_slope(spacings: Sequence[float], residuals: Sequence[float]) -> float | None:
    """Slope of ``log(residual)`` against ``log(spacing)``; ``None`` if under two usable points."""
    h = np.asarray(spacings, dtype=float)
    r = np.asarray(residuals, dtype=float)
    usable = np.isfinite(r) & (r > 0.0)
    if np.count_nonzero(usable) < 2:
        return None
    slope, _ = np.polyfit(np.log(h[usable]), np.log(r[usable]), 1)
    return float(slope)


def moment_residuals(
    operator: OperatorMatrix, exponents: np.ndarray, targets: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Per-row ``sum_j c_ij (x_j - x_i)^alpha - target`` and the matching magnitude.

    ``targets`` has shape ``(N, m)``; the magnitude is
    ``sum_j |c_ij (x_j - x_i)^alpha| + |target|``, the natural scale for a
    cancellation residual.
    """
    rows = operator.row_of_entry
    powers = monomials(operator.offsets, exponents) * operator.data
    n = operator.n_points
    moments = np.column_stack(
        [np.bincount(rows, weights=p, minlength=n) for p in powers]
    )
    magnitude = np.column_stack(
        [np.bincount(rows, weights=np.abs(p), minlength=n) for p in powers]
    )
    return moments - targets, magnitude + np.abs(targets)


def exact_results(
    check: str, param: str, levels: Sequence[RefinementLevel], scaled: Sequence[float]
) -> list[CheckResult]:
    return [
        CheckResult(
            check=check,
            param=param,
            h=level.h,
            residual=value,
            threshold=EXACT_TOLERANCE,
            passed=bool(value <= EXACT_TOLERANCE),
        )
        for level, value in zip(levels, scaled, strict=True)
    ]


def order_results(
    check: str,
    param: str,
    levels: Sequence[RefinementLevel],
    residuals: Sequence[float],
    threshold: float | None,
) -> list[CheckResult]:
    """Per-level residuals plus one slope entry.

    Residuals that already sit at round-off on every level pass without a fit.
    A ``threshold`` of ``None`` reports the slope only.
    """
    results = [
        CheckResult(check=check, param=param, h=level.h, residual=float(value))
        for level, value in zip(levels, residuals, strict=True)
    ]
    slope = fit_slope([level.spacing for level in levels], residuals)
    if max(residuals, default=0.0) <= VANISHING_RESIDUAL:
        passed: bool | None = True if threshold is not None else None
        note = "residual at round-off on every level"
    elif threshold is None:
        passed, note = None, "reported without threshold"
    elif slope is None:
        passed, note = False, "not enough levels for a slope"
    else:
        passed, note = bool(slope >= threshold), None
    results.append(
        CheckResult(
            check=check, param=param, slope=slope, threshold=threshold, passed=passed, note=note
        )
    )
    return results


def format_alpha(alpha: tuple[int, int]) -> str:
    return f"alpha=({alpha[0]},{alpha[1]})"
