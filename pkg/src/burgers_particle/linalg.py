"""Tridiagonal operators and the banded solve behind each time step."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import lapack

from .errors import LinearSolveFailure


@dataclass
class Tridiagonal:
    """Square tridiagonal matrix stored by diagonals.

    ``lower[k]`` is entry (k+1, k), ``upper[k]`` entry (k, k+1).
    """

    lower: np.ndarray
    diag: np.ndarray
    upper: np.ndarray

    @classmethod
    def zeros(cls, n: int) -> "Tridiagonal":
        return cls(np.zeros(n - 1), np.zeros(n), np.zeros(n - 1))

    @property
    def n(self) -> int:
        return self.diag.size

    def matvec(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = self.diag * x
        y[:-1] += self.upper * x[1:]
        y[1:] += self.lower * x[:-1]
        return y

    __matmul__ = matvec

    def __add__(self, other: "Tridiagonal") -> "Tridiagonal":
        return Tridiagonal(self.lower + other.lower, self.diag + other.diag,
                           self.upper + other.upper)

    def __sub__(self, other: "Tridiagonal") -> "Tridiagonal":
        return Tridiagonal(self.lower - other.lower, self.diag - other.diag,
                           self.upper - other.upper)

    def scaled(self, c: float) -> "Tridiagonal":
        return Tridiagonal(c * self.lower, c * self.diag, c * self.upper)

    def transpose(self) -> "Tridiagonal":
        return Tridiagonal(self.upper.copy(), self.diag.copy(), self.lower.copy())

    def interior(self) -> "Tridiagonal":
        """Drop the first and last row/column (Dirichlet nodes)."""
        return Tridiagonal(self.lower[1:-1], self.diag[1:-1], self.upper[1:-1])

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.upper, 1) + np.diag(self.lower, -1)

    def quadratic_form(self, x, y=None) -> float:
        x = np.asarray(x, dtype=float)
        y = x if y is None else np.asarray(y, dtype=float)
        return float(x @ self.matvec(y))


def solve_tridiagonal(A: Tridiagonal, rhs) -> np.ndarray:
    """Solve ``A x = rhs`` with LAPACK ``gtsv`` (Gaussian elimination with partial pivoting)."""
    rhs = np.asarray(rhs, dtype=float)
    if not (np.all(np.isfinite(A.diag)) and np.all(np.isfinite(A.lower))
            and np.all(np.isfinite(A.upper)) and np.all(np.isfinite(rhs))):
        raise LinearSolveFailure("non-finite entries in the linear system")
    _, _, _, x, info = lapack.dgtsv(A.lower, A.diag, A.upper, rhs)
    if info != 0:
        raise LinearSolveFailure(f"tridiagonal solve failed (gtsv info={info})")
    return x
