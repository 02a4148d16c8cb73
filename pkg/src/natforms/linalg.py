"""Exact linear algebra over the rationals (small dense matrices)."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .poly import as_fraction

Matrix = list[list[Fraction]]


class SingularMatrix(ValueError):
    pass


def to_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [[as_fraction(x) for x in row] for row in rows]


def identity(m: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(m)] for i in range(m)]


def matmul(a: Sequence[Sequence[Fraction]], b: Sequence[Sequence[Fraction]]) -> Matrix:
    inner = len(b)
    cols = len(b[0]) if b else 0
    return [
        [sum((row[k] * b[k][j] for k in range(inner)), Fraction(0)) for j in range(cols)]
        for row in a
    ]


def rref(rows: Sequence[Sequence]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and the pivot columns."""
    a = to_matrix(rows)
    if not a:
        return a, []
    nrows, ncols = len(a), len(a[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(nrows):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return a, pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1])


def solve(a: Sequence[Sequence], b: Sequence) -> list[Fraction]:
    """Unique solution of ``a x = b`` (overdetermined systems allowed).

    Raises :class:`SingularMatrix` if the solution is not unique and
    ``ValueError`` if the system is inconsistent.
    """
    ncols = len(a[0]) if a else 0
    aug = [list(row) + [bv] for row, bv in zip(a, b)]
    red, pivots = rref(aug)
    if ncols in pivots:
        raise ValueError("inconsistent linear system")
    if len(pivots) < ncols:
        raise SingularMatrix(f"rank {len(pivots)} < {ncols} unknowns")
    x = [Fraction(0)] * ncols
    for row, c in zip(red, pivots):
        x[c] = row[-1]
    return x


def inverse(m: Sequence[Sequence]) -> Matrix:
    size = len(m)
    aug = [list(row) + ident for row, ident in zip(to_matrix(m), identity(size))]
    red, pivots = rref(aug)
    if pivots[:size] != list(range(size)):
        raise SingularMatrix("matrix is not invertible")
    return [row[size:] for row in red]


def coordinates(vectors: Sequence[Sequence], target: Sequence) -> list[Fraction] | None:
    """Coefficients expressing ``target`` in the independent ``vectors``.

    Returns ``None`` when ``target`` is outside their span.
    """
    if not vectors:
        return [] if not any(as_fraction(t) for t in target) else None
    cols = [list(map(as_fraction, v)) for v in vectors]
    a = [[cols[j][i] for j in range(len(cols))] for i in range(len(target))]
    try:
        return solve(a, [as_fraction(t) for t in target])
    except ValueError:
        return None
