"""Exact dense linear solves over any field whose elements support + - * /.

Works for Fraction and QuadExt entries alike; zero tests are exact.
"""

from __future__ import annotations

from typing import Sequence


class SingularMatrix(ArithmeticError):
    pass


def solve(matrix: Sequence[Sequence], rhs: Sequence[Sequence]) -> list[list]:
    """Solve ``matrix @ X = rhs`` where ``rhs`` has one row per equation.

    Gauss-Jordan elimination with the first nonzero entry as pivot.
    Returns ``X`` as a list of rows (one per unknown).
    """
    n = len(matrix)
    if any(len(row) != n for row in matrix) or len(rhs) != n:
        raise ValueError("expected a square system")
    width = len(rhs[0]) if n else 0
    aug = [list(matrix[i]) + list(rhs[i]) for i in range(n)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise SingularMatrix(f"no pivot in column {col}")
        if pivot != col:
            aug[col], aug[pivot] = aug[pivot], aug[col]
        prow = aug[col]
        inv = 1 / prow[col]
        for j in range(col, n + width):
            prow[j] = prow[j] * inv
        for r in range(n):
            if r == col:
                continue
            row = aug[r]
            f = row[col]
            if f == 0:
                continue
            for j in range(col, n + width):
                if prow[j] != 0:
                    row[j] = row[j] - f * prow[j]
    return [row[n:] for row in aug]


def solve_vector(matrix: Sequence[Sequence], b: Sequence) -> list:
    return [x[0] for x in solve(matrix, [[v] for v in b])]
