"""Monomial bases and the consistency right-hand sides built on them."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from gfdmlab.common.exceptions import ParameterError

MultiIndex = tuple[int, int]


@dataclass(frozen=True, eq=False)
class MonomialBasis:
    """2D monomials ``x^alpha`` with ``|alpha| <= degree`` in graded-lexicographic order."""

    degree: int
    exponents: np.ndarray

    @classmethod
    def of_degree(cls, degree: int) -> MonomialBasis:
        if degree < 0:
            raise ParameterError(f"Basis degree must be non-negative, got {degree}")
        exponents = [(total - k, k) for total in range(degree + 1) for k in range(total + 1)]
        array = np.array(exponents, dtype=np.int64)
        array.setflags(write=False)
        return cls(degree=degree, exponents=array)

    @property
    def size(self) -> int:
        return len(self.exponents)

    @property
    def orders(self) -> np.ndarray:
        """``|alpha|`` per basis entry."""
        return self.exponents.sum(axis=1)

    def index_of(self, alpha: MultiIndex) -> int:
        hits = np.flatnonzero(np.all(self.exponents == np.asarray(alpha), axis=1))
        if len(hits) == 0:
            raise ParameterError(f"Multi-index {alpha} not in degree-{self.degree} basis")
        return int(hits[0])

    def multi_indices(self) -> list[MultiIndex]:
        return [(int(a), int(b)) for a, b in self.exponents]

    def evaluate(self, offsets: np.ndarray, scale: float = 1.0) -> np.ndarray:
        """Matrix ``K[alpha, j] = ((x_j - x_i) / scale)^alpha``, shape ``(size, n)``."""
        scaled = np.asarray(offsets, dtype=float) / scale
        return monomials(scaled, self.exponents)


def monomials(offsets: np.ndarray, exponents: np.ndarray) -> np.ndarray:
    offsets = np.atleast_2d(offsets)
    return (
        offsets[None, :, 0] ** exponents[:, 0:1] * offsets[None, :, 1] ** exponents[:, 1:2]
    )


def monomial(offsets: np.ndarray, alpha: MultiIndex) -> np.ndarray:
    """``(x_j - x_i)^alpha`` for each row of ``offsets``."""
    offsets = np.atleast_2d(offsets)
    return offsets[:, 0] ** alpha[0] * offsets[:, 1] ** alpha[1]


# ---------------------------------------------------------------------------
# Consistency targets, unscaled
# ---------------------------------------------------------------------------


def rhs_laplace(basis: MonomialBasis) -> np.ndarray:
    """``2`` for ``alpha = 2 e_k``, zero elsewhere."""
    if basis.degree < 2:
        raise ParameterError(f"Laplace rows need a basis of degree >= 2, got {basis.degree}")
    rhs = np.zeros(basis.size)
    rhs[basis.index_of((2, 0))] = 2.0
    rhs[basis.index_of((0, 2))] = 2.0
    return rhs


def rhs_gradient(basis: MonomialBasis, component: int) -> np.ndarray:
    """``1`` for ``alpha = e_k``, zero elsewhere; ``component`` is 1 or 2."""
    if component not in (1, 2):
        raise ParameterError(f"Gradient component must be 1 or 2, got {component}")
    if basis.degree < 1:
        raise ParameterError("Gradient rows need a basis of degree >= 1")
    rhs = np.zeros(basis.size)
    rhs[basis.index_of((1, 0) if component == 1 else (0, 1))] = 1.0
    return rhs
