from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import sparse

from gfdmlab.common.enums import OperatorKind
from gfdmlab.common.exceptions import ParameterError


@dataclass(frozen=True, eq=False)
class OperatorRow:
    """Coefficients ``c_ij`` of one discrete operator at point ``center``.

    ``offsets[k]`` is ``x_j - x_i`` for ``j = indices[k]``.
    """

    center: int
    indices: np.ndarray
    coefficients: np.ndarray
    offsets: np.ndarray

    def __post_init__(self) -> None:
        if not (len(self.indices) == len(self.coefficients) == len(self.offsets)):
            raise ParameterError(f"Row {self.center}: field lengths differ")
        if not np.all(np.isfinite(self.coefficients)):
            raise ParameterError(f"Row {self.center}: non-finite coefficients")

    @property
    def center_position(self) -> int:
        hits = np.flatnonzero(self.indices == self.center)
        if len(hits) == 0:
            raise ParameterError(f"Row {self.center} does not contain its center")
        return int(hits[0])

    @property
    def diagonal(self) -> float:
        return float(self.coefficients[self.center_position])

    @property
    def off_diagonal_mask(self) -> np.ndarray:
        return self.indices != self.center

    def apply(self, values: np.ndarray) -> float:
        """``sum_j c_ij values[j]`` for a global vector ``values``."""
        return float(np.dot(self.coefficients, np.asarray(values)[self.indices]))

    def with_coefficients(self, coefficients: np.ndarray) -> OperatorRow:
        return replace(self, coefficients=np.asarray(coefficients, dtype=float))

    def same_stencil(self, other: OperatorRow) -> bool:
        return self.center == other.center and np.array_equal(self.indices, other.indices)


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """A discrete operator assembled over all points as a CSR matrix.

    Row ``i`` stores exactly the stencil of ``i``, explicit zeros included.
    ``offsets`` follows the CSR entry order. ``edge_values`` carries the
    reconstructed diffusivities for diffusion operators (``lambda_ij`` off the
    diagonal, ``lambda_i`` on it).
    """

    matrix: sparse.csr_matrix
    offsets: np.ndarray
    kind: OperatorKind
    degree: int
    dd_correction: bool = False
    edge_values: np.ndarray | None = None
    clamp_count: int = 0
    metadata: dict[str, float | int | str] = field(default_factory=dict)

    @classmethod
    def from_rows(
        cls,
        rows: Sequence[OperatorRow],
        kind: OperatorKind,
        degree: int,
        dd_correction: bool = False,
        **extra,
    ) -> OperatorMatrix:
        n = len(rows)
        sizes = np.array([len(r.indices) for r in rows], dtype=np.int64)
        indptr = np.concatenate([[0], np.cumsum(sizes)])
        if n:
            indices = np.concatenate([r.indices for r in rows]).astype(np.int64)
            data = np.concatenate([r.coefficients for r in rows]).astype(float)
            offsets = np.concatenate([r.offsets for r in rows]).reshape(-1, 2)
        else:
            indices, data, offsets = np.zeros(0, np.int64), np.zeros(0), np.zeros((0, 2))
        matrix = sparse.csr_matrix((data, indices, indptr), shape=(n, n))
        return cls(
            matrix=matrix,
            offsets=offsets,
            kind=kind,
            degree=degree,
            dd_correction=dd_correction,
            **extra,
        )

    @property
    def n_points(self) -> int:
        return self.matrix.shape[0]

    @property
    def indptr(self) -> np.ndarray:
        return self.matrix.indptr

    @property
    def indices(self) -> np.ndarray:
        return self.matrix.indices

    @property
    def data(self) -> np.ndarray:
        return self.matrix.data

    @property
    def row_of_entry(self) -> np.ndarray:
        """Row index of every stored entry."""
        return np.repeat(np.arange(self.n_points), np.diff(self.indptr))

    @property
    def diagonal_mask(self) -> np.ndarray:
        return self.indices == self.row_of_entry

    def diagonal(self) -> np.ndarray:
        return self.matrix.diagonal()

    def row(self, i: int) -> OperatorRow:
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return OperatorRow(
            center=i,
            indices=self.indices[lo:hi].copy(),
            coefficients=self.data[lo:hi].copy(),
            offsets=self.offsets[lo:hi].copy(),
        )

    def rows(self) -> list[OperatorRow]:
        return [self.row(i) for i in range(self.n_points)]

    def apply(self, values: np.ndarray) -> np.ndarray:
        return self.matrix @ np.asarray(values, dtype=float)

    def with_data(self, data: np.ndarray, **changes) -> OperatorMatrix:
        """Same sparsity pattern and metadata with new coefficient values."""
        matrix = sparse.csr_matrix(
            (np.asarray(data, dtype=float), self.indices.copy(), self.indptr.copy()),
            shape=self.matrix.shape,
        )
        return replace(self, matrix=matrix, **changes)
