"""Exact linear algebra over Q on lists of lists of Fractions."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence

from .poly import MPoly

Matrix = list[list[Fraction]]
Vector = tuple[Fraction, ...]


def as_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [[Fraction(x) for x in row] for row in rows]


def rref(rows: Sequence[Sequence]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns."""
    A = as_matrix(rows)
    if not A:
        return A, []
    ncols = len(A[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(A)) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == len(A):
            break
    return A, pivots


def rank(rows: Sequence[Sequence]) -> int:
    if not rows or not len(rows[0]):
        return 0
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Sequence], ncols: int | None = None) -> list[Vector]:
    """Basis of {x : A x = 0}."""
    if not rows:
        if ncols is None:
            raise ValueError("ncols required for an empty matrix")
        return [tuple(Fraction(int(i == j)) for j in range(ncols)) for i in range(ncols)]
    R, piv = rref(rows)
    n = len(R[0])
    free = [c for c in range(n) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for i, p in enumerate(piv):
            v[p] = -R[i][f]
        basis.append(tuple(v))
    return basis


def solve(rows: Sequence[Sequence], rhs: Sequence) -> Vector | None:
    """One solution of A x = b, or None when inconsistent."""
    A = as_matrix(rows)
    if not A:
        return None
    n = len(A[0])
    aug = [row + [Fraction(b)] for row, b in zip(A, rhs)]
    R, piv = rref(aug)
    if n in piv:
        return None
    x = [Fraction(0)] * n
    for i, p in enumerate(piv):
        x[p] = R[i][n]
    return tuple(x)


def det(rows: Sequence[Sequence]) -> Fraction:
    A = as_matrix(rows)
    n = len(A)
    if any(len(r) != n for r in A):
        raise ValueError("determinant of a non-square matrix")
    d = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if A[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            A[c], A[p] = A[p], A[c]
            d = -d
        d *= A[c][c]
        for i in range(c + 1, n):
            if A[i][c] != 0:
                f = A[i][c] / A[c][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[c])]
    return d


def matvec(rows: Sequence[Sequence], v: Sequence) -> Vector:
    return tuple(sum((Fraction(a) * b for a, b in zip(row, v)), Fraction(0)) for row in rows)


def transpose(rows: Sequence[Sequence]) -> Matrix:
    return [list(col) for col in zip(*rows)]


def in_span(vectors: Sequence[Sequence], v: Sequence) -> bool:
    if not vectors:
        return all(x == 0 for x in v)
    return solve(transpose(vectors), v) is not None


def independent_rows(rows: Sequence[Sequence]) -> list[int]:
    """Indices of a maximal linearly independent subset, chosen greedily in order."""
    chosen: list[int] = []
    for i in range(len(rows)):
        if rank([rows[j] for j in chosen + [i]]) > len(chosen):
            chosen.append(i)
    return chosen


def primitive_integer(v: Sequence) -> tuple[int, ...]:
    """Scale a rational vector to coprime integers (first nonzero entry positive)."""
    fr = [Fraction(x) for x in v]
    den = 1
    for x in fr:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return tuple(ints)
    ints = [x // g for x in ints]
    lead = next(x for x in ints if x)
    if lead < 0:
        ints = [-x for x in ints]
    return tuple(ints)


@dataclass(frozen=True)
class LinearMap:
    """A linear map Q^cols -> Q^rows given by its matrix."""

    matrix: tuple[tuple[Fraction, ...], ...]

    def __init__(self, matrix: Sequence[Sequence]):
        m = tuple(tuple(Fraction(x) for x in row) for row in matrix)
        if m and len({len(r) for r in m}) != 1:
            raise ValueError("ragged matrix")
        object.__setattr__(self, "matrix", m)

    @property
    def rows(self) -> int:
        return len(self.matrix)

    @property
    def cols(self) -> int:
        return len(self.matrix[0]) if self.matrix else 0

    def __call__(self, v: Sequence) -> Vector:
        if len(v) != self.cols:
            raise ValueError(f"vector of length {len(v)}, map has source dimension {self.cols}")
        return matvec(self.matrix, v)

    def rank(self) -> int:
        return rank(self.matrix)

    def is_surjective(self) -> bool:
        return self.rank() == self.rows

    def kernel(self) -> list[Vector]:
        return nullspace(self.matrix, self.cols)

    def as_polys(self, nvars: int | None = None, offset: int = 0) -> list[MPoly]:
        """The coordinate functions as linear polynomials."""
        n = self.cols if nvars is None else nvars
        out = []
        for row in self.matrix:
            coeffs = [Fraction(0)] * n
            for i, c in enumerate(row):
                coeffs[offset + i] = c
            out.append(MPoly.linear(coeffs))
        return out

    def to_lists(self) -> list[list[Fraction]]:
        return [list(r) for r in self.matrix]
