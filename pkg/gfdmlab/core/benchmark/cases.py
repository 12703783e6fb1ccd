"""Manufactured-solution benchmark problems on the unit square.

Cases 1-3 are elliptic (``-div(lambda grad u) = q``); cases 4 and 5 are
parabolic with ``u(x, t) = a(t) u_bar(x)``, ``a(t) = exp(-4t)``, wrapping the
solutions of cases 1 and 3.  All evaluators take an ``(n, 2)`` array of
positions.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from gfdmlab.common.enums import ProblemKind, ReconstructionScheme
from gfdmlab.common.exceptions import ParameterError

PI = np.pi
INTERFACE_SHIFT = 0.75
JUMP = 1e8
DECAY_RATE = 4.0

CASE_IDS = (1, 2, 3, 4, 5)


def _xy(points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    points = np.atleast_2d(np.asarray(points, dtype=float))
    return points[:, 0], points[:, 1]


# ---------------------------------------------------------------------------
# Shared solution u = sin(pi x) sin(pi y)
# ---------------------------------------------------------------------------


def sine_product(points: np.ndarray) -> np.ndarray:
    x, y = _xy(points)
    return np.sin(PI * x) * np.sin(PI * y)


def sine_product_gradient(points: np.ndarray) -> np.ndarray:
    x, y = _xy(points)
    return PI * np.column_stack(
        [np.cos(PI * x) * np.sin(PI * y), np.sin(PI * x) * np.cos(PI * y)]
    )


def sine_product_laplacian(points: np.ndarray) -> np.ndarray:
    return -2.0 * PI**2 * sine_product(points)


# ---------------------------------------------------------------------------
# Case 1: lambda = exp(x - y^2)
# ---------------------------------------------------------------------------


def exp_diffusivity(points: np.ndarray) -> np.ndarray:
    x, y = _xy(points)
    return np.exp(x - y**2)


def exp_diffusivity_gradient(points: np.ndarray) -> np.ndarray:
    _, y = _xy(points)
    lam = exp_diffusivity(points)
    return np.column_stack([lam, -2.0 * y * lam])


def exp_diffusivity_laplacian(points: np.ndarray) -> np.ndarray:
    _, y = _xy(points)
    return exp_diffusivity(points) * (4.0 * y**2 - 1.0)


# ---------------------------------------------------------------------------
# Case 2: lambda = 2 + sin(6 pi x) sin(6 pi y)
# ---------------------------------------------------------------------------


def oscillating_diffusivity(points: np.ndarray) -> np.ndarray:
    x, y = _xy(points)
    return 2.0 + np.sin(6.0 * PI * x) * np.sin(6.0 * PI * y)


def oscillating_diffusivity_gradient(points: np.ndarray) -> np.ndarray:
    x, y = _xy(points)
    return 6.0 * PI * np.column_stack(
        [np.cos(6.0 * PI * x) * np.sin(6.0 * PI * y), np.sin(6.0 * PI * x) * np.cos(6.0 * PI * y)]
    )


def oscillating_diffusivity_laplacian(points: np.ndarray) -> np.ndarray:
    x, y = _xy(points)
    return -72.0 * PI**2 * np.sin(6.0 * PI * x) * np.sin(6.0 * PI * y)


# ---------------------------------------------------------------------------
# Case 3: piecewise constant lambda with a jump across f = 0
# ---------------------------------------------------------------------------


def interface_level(points: np.ndarray) -> np.ndarray:
    """``f = sin(pi x) sin(pi y) - 3/4``; the interface is its zero set."""
    return sine_product(points) - INTERFACE_SHIFT


def jump_diffusivity(points: np.ndarray) -> np.ndarray:
    return np.where(interface_level(points) >= 0.0, JUMP, 1.0)


def zero_gradient(points: np.ndarray) -> np.ndarray:
    return np.zeros((len(np.atleast_2d(points)), 2))


def zero_laplacian(points: np.ndarray) -> np.ndarray:
    return np.zeros(len(np.atleast_2d(points)))


def interface_solution(points: np.ndarray) -> np.ndarray:
    return interface_level(points) / jump_diffusivity(points) + INTERFACE_SHIFT


def interface_source(points: np.ndarray) -> np.ndarray:
    """``-Laplace f``, continuous across the interface."""
    return 2.0 * PI**2 * sine_product(points)


# ---------------------------------------------------------------------------
# Sources
# ---------------------------------------------------------------------------


def smooth_source(
    diffusivity: Callable[[np.ndarray], np.ndarray],
    gradient: Callable[[np.ndarray], np.ndarray],
) -> Callable[[np.ndarray], np.ndarray]:
    """``q = -<grad lambda, grad u> - lambda Laplace u`` for ``u = sin(pi x) sin(pi y)``."""

    def source(points: np.ndarray) -> np.ndarray:
        flux = np.sum(gradient(points) * sine_product_gradient(points), axis=1)
        return -flux - diffusivity(points) * sine_product_laplacian(points)

    return source


def decay(t: float) -> float:
    return float(np.exp(-DECAY_RATE * t))


def decay_rate(t: float) -> float:
    return -DECAY_RATE * decay(t)


# ---------------------------------------------------------------------------
# Test case container
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TestCase:
    """One benchmark problem.

    ``steady_source`` is ``-div(lambda grad u_bar)``; for parabolic cases the
    time-dependent source is ``a'(t) u_bar + a(t) * steady_source``.
    """

    __test__ = False

    case_id: int
    kind: ProblemKind
    description: str
    spatial_solution: Callable[[np.ndarray], np.ndarray]
    diffusivity: Callable[[np.ndarray], np.ndarray]
    diffusivity_gradient: Callable[[np.ndarray], np.ndarray]
    diffusivity_laplacian: Callable[[np.ndarray], np.ndarray]
    steady_source: Callable[[np.ndarray], np.ndarray]
    default_scheme: ReconstructionScheme = ReconstructionScheme.AM

    @property
    def is_parabolic(self) -> bool:
        return self.kind is ProblemKind.PARABOLIC

    def solution(self, points: np.ndarray, t: float | None = None) -> np.ndarray:
        base = self.spatial_solution(points)
        if not self.is_parabolic or t is None:
            return base
        return decay(t) * base

    def source(self, points: np.ndarray, t: float | None = None) -> np.ndarray:
        steady = self.steady_source(points)
        if not self.is_parabolic or t is None:
            return steady
        return decay_rate(t) * self.spatial_solution(points) + decay(t) * steady


def define_test_case(case_id: int) -> TestCase:
    if case_id == 1:
        return TestCase(
            case_id=1,
            kind=ProblemKind.ELLIPTIC,
            description="smooth diffusivity exp(x - y^2)",
            spatial_solution=sine_product,
            diffusivity=exp_diffusivity,
            diffusivity_gradient=exp_diffusivity_gradient,
            diffusivity_laplacian=exp_diffusivity_laplacian,
            steady_source=smooth_source(exp_diffusivity, exp_diffusivity_gradient),
        )
    if case_id == 2:
        return TestCase(
            case_id=2,
            kind=ProblemKind.ELLIPTIC,
            description="oscillating diffusivity 2 + sin(6 pi x) sin(6 pi y)",
            spatial_solution=sine_product,
            diffusivity=oscillating_diffusivity,
            diffusivity_gradient=oscillating_diffusivity_gradient,
            diffusivity_laplacian=oscillating_diffusivity_laplacian,
            steady_source=smooth_source(oscillating_diffusivity, oscillating_diffusivity_gradient),
        )
    if case_id == 3:
        return TestCase(
            case_id=3,
            kind=ProblemKind.ELLIPTIC,
            description="interface problem with a 1e8 diffusivity jump",
            spatial_solution=interface_solution,
            diffusivity=jump_diffusivity,
            diffusivity_gradient=zero_gradient,
            diffusivity_laplacian=zero_laplacian,
            steady_source=interface_source,
            default_scheme=ReconstructionScheme.HM,
        )
    if case_id in (4, 5):
        base = define_test_case(case_id - 3 if case_id == 4 else 3)
        return TestCase(
            case_id=case_id,
            kind=ProblemKind.PARABOLIC,
            description=f"heat equation with a(t) = exp(-4t) on case {base.case_id}",
            spatial_solution=base.spatial_solution,
            diffusivity=base.diffusivity,
            diffusivity_gradient=base.diffusivity_gradient,
            diffusivity_laplacian=base.diffusivity_laplacian,
            steady_source=base.steady_source,
            default_scheme=base.default_scheme,
        )
    raise ParameterError(f"Unknown test case {case_id}, expected one of {CASE_IDS}")
