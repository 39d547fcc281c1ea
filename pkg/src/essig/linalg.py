"""Exact Gaussian elimination over the rationals."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


class SingularMatrixError(ArithmeticError):
    pass


def _size(x: Fraction) -> int:
    return abs(x.numerator).bit_length() + x.denominator.bit_length()


def solve_rational(A: Sequence[Sequence], B: Sequence) -> list:
    """Solve ``A X = B`` exactly.

    ``B`` is either a vector (returns a vector) or a list of rows with several
    right-hand sides (returns rows of the same shape).  Pivots are chosen as
    the nonzero candidate with the smallest numerator/denominator size, which
    keeps intermediate fractions short.
    """
    n = len(A)
    if any(len(row) != n for row in A):
        raise ValueError("matrix must be square")
    vector = len(B) == n and not isinstance(B[0], (list, tuple))
    rhs = [[Fraction(b)] for b in B] if vector else [[Fraction(x) for x in row] for row in B]
    if len(rhs) != n:
        raise ValueError("right-hand side has the wrong number of rows")
    m = len(rhs[0])
    M = [[Fraction(x) for x in A[i]] + rhs[i] for i in range(n)]

    for col in range(n):
        candidates = [r for r in range(col, n) if M[r][col] != 0]
        if not candidates:
            raise SingularMatrixError(f"matrix is singular (column {col})")
        piv = min(candidates, key=lambda r: _size(M[r][col]))
        M[col], M[piv] = M[piv], M[col]
        prow = M[col]
        inv = 1 / prow[col]
        for r in range(col + 1, n):
            f = M[r][col]
            if f == 0:
                continue
            f *= inv
            row = M[r]
            for k in range(col, n + m):
                if prow[k]:
                    row[k] -= f * prow[k]

    X = [[Fraction(0)] * m for _ in range(n)]
    for i in reversed(range(n)):
        row = M[i]
        for k in range(m):
            s = row[n + k]
            for j in range(i + 1, n):
                if row[j]:
                    s -= row[j] * X[j][k]
            X[i][k] = s / row[i]
    return [x[0] for x in X] if vector else X
