from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, replace

import numpy as np
from pydantic import BaseModel

from gfdmlab.common.exceptions import ParameterError

ScalarFunction = Callable[[np.ndarray], np.ndarray]
VectorFunction = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class DiffusivityField:
    """Diffusivity ``lambda`` sampled on a cloud.

    ``function``, ``gradient_function`` and ``laplacian_function`` take an
    ``(n, 2)`` array of positions.  ``gradients`` holds the per-point
    gradients the gradient-based reconstructions consume; they are either
    discrete or analytic, see :func:`gfdmlab.core.diffusion.field.attach_gradients`.
    """

    points: np.ndarray
    values: np.ndarray
    function: ScalarFunction | None = None
    gradient_function: VectorFunction | None = None
    laplacian_function: ScalarFunction | None = None
    gradients: np.ndarray | None = None

    def __post_init__(self) -> None:
        if len(self.points) != len(self.values):
            raise ParameterError("Diffusivity samples do not match the point count")
        if len(self.values) and not np.all(self.values > 0.0):
            bad = int(np.flatnonzero(~(self.values > 0.0))[0])
            raise ParameterError(f"Diffusivity must be positive, got {self.values[bad]} at {bad}")
        if self.gradients is not None and np.shape(self.gradients) != (len(self.values), 2):
            raise ParameterError("Diffusivity gradients must have shape (N, 2)")

    @property
    def n_points(self) -> int:
        return len(self.values)

    @property
    def has_analytic_gradient(self) -> bool:
        return self.gradient_function is not None

    @property
    def has_analytic_laplacian(self) -> bool:
        return self.laplacian_function is not None

    def with_gradients(self, gradients: np.ndarray) -> DiffusivityField:
        return replace(self, gradients=np.asarray(gradients, dtype=float))

    def analytic_gradient_at(self, i: int) -> np.ndarray | None:
        if self.gradient_function is None:
            return None
        return np.asarray(self.gradient_function(self.points[i : i + 1]), dtype=float).reshape(2)

    def analytic_laplacian_at(self, i: int) -> float | None:
        if self.laplacian_function is None:
            return None
        return float(np.asarray(self.laplacian_function(self.points[i : i + 1])).reshape(-1)[0])


class ResidualEntry(BaseModel):
    identity: str  # "diffusion", "scaled_monomial", "reconstruction_scaled"
    alpha: tuple[int, int]
    value: float
    target: float | None = None
    residual: float | None = None
    skipped: bool = False
