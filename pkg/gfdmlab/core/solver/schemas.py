from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel
from scipy import sparse

from gfdmlab.common.exceptions import ParameterError


@dataclass(frozen=True, eq=False)
class LinearSystem:
    matrix: sparse.csr_matrix
    rhs: np.ndarray

    def __post_init__(self) -> None:
        n_rows, n_cols = self.matrix.shape
        if n_rows != n_cols or n_rows != len(self.rhs):
            raise ParameterError(
                f"System matrix {self.matrix.shape} does not match rhs of length {len(self.rhs)}"
            )
        empty = np.flatnonzero(np.diff(self.matrix.indptr) == 0)
        if len(empty):
            raise ParameterError(f"System row {int(empty[0])} is structurally empty")

    @property
    def size(self) -> int:
        return len(self.rhs)


class MaximumPrincipleReport(BaseModel):
    min_u: float
    rows_checked: int
    failing_rows: int
    source_nonnegative: bool
    passed: bool
