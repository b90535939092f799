"""Exact rational scalars and a dense linear solver.

The collocation systems assembled by the spline solvers carry coefficients
that must be held exactly until matrix assembly (several are ratios of
12-digit integers), so they are stored as :class:`fractions.Fraction`
values and only converted to ``float`` when a row is inserted.  The
assembled systems themselves are small and dense; they are solved by LU
elimination with scaled partial pivoting.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "Rational",
    "rational",
    "to_real",
    "DenseSystem",
    "SingularMatrixError",
    "lu_solve",
]

# Exact rational arithmetic is delegated to the standard library: Fraction
# normalizes to gcd(|num|, den) == 1 with den > 0 and is arbitrary
# precision, so intermediate products cannot overflow.
Rational = Fraction


def rational(numerator, denominator=1) -> Fraction:
    """Build the normalized rational numerator/denominator.

    Accepts integers, Fractions and strings like ``"31/180"``.  Floats are
    rejected: their binary expansions would silently break the exactness
    guarantees the coefficient tables rely on.
    """
    for value in (numerator, denominator):
        if isinstance(value, float):
            raise TypeError(
                f"refusing float {value!r}; pass an int, Fraction or 'p/q' string"
            )
    if denominator == 0:
        raise ZeroDivisionError("rational with zero denominator")
    return Fraction(numerator, denominator) if denominator != 1 else Fraction(numerator)


def to_real(q) -> float:
    """Correctly rounded double quotient of a rational."""
    return float(Fraction(q))


class SingularMatrixError(ValueError):
    """The coefficient matrix is numerically singular."""


@dataclass(frozen=True, eq=False)
class DenseSystem:
    """A square linear system ``matrix @ x = rhs``."""

    matrix: np.ndarray
    rhs: np.ndarray

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=float)
        rhs = np.array(self.rhs, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError(f"matrix must be square, got shape {matrix.shape}")
        if rhs.shape != (matrix.shape[0],):
            raise ValueError(
                f"rhs length {rhs.shape} does not match matrix size {matrix.shape[0]}"
            )
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "rhs", rhs)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


def lu_solve(system: DenseSystem) -> np.ndarray:
    """Solve the dense system by LU elimination with scaled partial pivoting.

    Pivots are chosen by the largest entry relative to its row's maximum
    magnitude, which keeps the unevenly scaled boundary rows from spoiling
    the elimination.  A pivot below ``1e-300`` times the matrix scale is
    treated as singular.

    Raises
    ------
    SingularMatrixError
        If elimination encounters an (effectively) zero pivot.
    """
    a = system.matrix.copy()
    b = system.rhs.copy()
    n = system.size
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ValueError("system contains non-finite entries")

    scale = np.max(np.abs(a), axis=1)
    if np.any(scale == 0.0):
        raise SingularMatrixError("matrix has an all-zero row")
    overall = float(np.max(scale))

    for k in range(n):
        p = k + int(np.argmax(np.abs(a[k:, k]) / scale[k:]))
        if abs(a[p, k]) <= 1e-300 * max(overall, 1.0):
            raise SingularMatrixError(f"zero pivot in column {k}")
        if p != k:
            a[[k, p]] = a[[p, k]]
            b[[k, p]] = b[[p, k]]
            scale[[k, p]] = scale[[p, k]]
        if k < n - 1:
            m = a[k + 1 :, k] / a[k, k]
            a[k + 1 :, k + 1 :] -= np.outer(m, a[k, k + 1 :])
            b[k + 1 :] -= m * b[k]

    x = np.empty(n)
    for k in range(n - 1, -1, -1):
        x[k] = (b[k] - a[k, k + 1 :] @ x[k + 1 :]) / a[k, k]
    return x
