"""Exact linear algebra over ℚ and integer points of small affine sets."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import UnsupportedDimension

Matrix = Sequence[Sequence]


def _integer_rows(M: Matrix) -> list[list[int]]:
    rows = []
    for row in M:
        row = [Fraction(x) for x in row]
        den = 1
        for x in row:
            den = den * x.denominator // math.gcd(den, x.denominator)
        rows.append([x.numerator * (den // x.denominator) for x in row])
    return rows


def mat_rank(M: Matrix) -> int:
    """Rank of a rational matrix by fraction-free (Bareiss) elimination."""
    A = _integer_rows(M)
    if not A or not A[0]:
        return 0
    nrows, ncols = len(A), len(A[0])
    rank = 0
    prev = 1
    for col in range(ncols):
        pivot = next((r for r in range(rank, nrows) if A[r][col] != 0), None)
        if pivot is None:
            continue
        A[rank], A[pivot] = A[pivot], A[rank]
        p = A[rank][col]
        for r in range(rank + 1, nrows):
            f = A[r][col]
            A[r] = [(p * A[r][c] - f * A[rank][c]) // prev for c in range(ncols)]
        prev = p
        rank += 1
        if rank == nrows:
            break
    return rank


def rref(M: Matrix) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and pivot columns."""
    A = [[Fraction(x) for x in row] for row in M]
    pivots = []
    if not A:
        return A, pivots
    ncols = len(A[0])
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(A)) if A[i][c] != 0), None)
        if pivot is None:
            continue
        A[r], A[pivot] = A[pivot], A[r]
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


_KIND_BY_DIM = {0: "POINT", 1: "LINE", 2: "PLANE"}


@dataclass(frozen=True)
class AffineSolutionSet:
    """``{point + sum t_i * directions[i]}``, or the empty set when point is None."""

    nvars: int
    point: tuple | None
    directions: tuple = ()

    @property
    def kind(self) -> str:
        if self.point is None:
            return "EMPTY"
        return _KIND_BY_DIM.get(len(self.directions), "FLAT")

    @property
    def dimension(self) -> int:
        return -1 if self.point is None else len(self.directions)

    def contains(self, x: Sequence) -> bool:
        if self.point is None:
            return False
        diff = [Fraction(a) - b for a, b in zip(x, self.point)]
        if not self.directions:
            return not any(diff)
        M = [list(d) for d in self.directions]
        return mat_rank(M + [diff]) == mat_rank(M)


def solve_affine(A: Matrix, b: Sequence, nvars: int | None = None) -> AffineSolutionSet:
    """All rational solutions of ``A x = b``."""
    if nvars is None:
        if not A:
            raise ValueError("nvars is required for an empty system")
        nvars = len(A[0])
    aug = [list(row) + [bi] for row, bi in zip(A, b)]
    R, pivots = rref(aug) if aug else ([], [])
    if nvars in pivots:
        return AffineSolutionSet(nvars, None)
    point = [Fraction(0)] * nvars
    for row, c in zip(R, pivots):
        point[c] = row[nvars]
    free = [c for c in range(nvars) if c not in pivots]
    directions = []
    for f in free:
        d = [Fraction(0)] * nvars
        d[f] = Fraction(1)
        for row, c in zip(R, pivots):
            d[c] = -row[f]
        directions.append(tuple(d))
    return AffineSolutionSet(nvars, tuple(point), tuple(directions))


def ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """``(g, x, y)`` with ``a*x + b*y == g == gcd(a, b) >= 0``."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def integer_points(s: AffineSolutionSet) -> tuple[int, ...] | None:
    """An integer vector in ``s``, or None when ``s`` has no integer point.

    Only sets in at most two unknowns are supported.
    """
    if s.nvars > 2:
        raise UnsupportedDimension(f"{s.nvars} unknowns; at most 2 are supported")
    if s.point is None:
        return None
    if not s.directions:
        if all(x.denominator == 1 for x in s.point):
            return tuple(int(x) for x in s.point)
        return None
    if len(s.directions) == s.nvars:
        return (0,) * s.nvars
    # a line in the plane: a*n + b*m = c with the normal (a, b) of the direction
    (d0, d1), (p0, p1) = s.directions[0], s.point
    a, b, c = _integer_rows([[d1, -d0, d1 * p0 - d0 * p1]])[0]
    g, x, y = ext_gcd(a, b)
    if c % g:
        return None
    k = c // g
    witness = (x * k, y * k)
    assert s.contains(witness)
    return witness
