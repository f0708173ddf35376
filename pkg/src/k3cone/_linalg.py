"""Small exact linear algebra over the rationals.

Matrices are tuples of row tuples of :class:`fractions.Fraction`.  Everything
here is sized for rank <= 4 and favours clarity over speed.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

Matrix = tuple[tuple[Fraction, ...], ...]
Vector = tuple[Fraction, ...]


def to_fraction(x) -> Fraction:
    """Parse an int, Fraction or ``"p/q"`` string exactly.

    Floats are refused: a float has already lost the value we want.
    """
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot read {x!r} as an exact rational")


def fmt(x: Fraction) -> str:
    return str(Fraction(x))


def matrix(rows: Iterable[Iterable]) -> Matrix:
    return tuple(tuple(to_fraction(c) for c in row) for row in rows)


def vector(coords: Iterable) -> Vector:
    return tuple(to_fraction(c) for c in coords)


def identity(n: int) -> Matrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def transpose(m: Matrix) -> Matrix:
    return tuple(zip(*m))


def matmul(a: Matrix, b: Matrix) -> Matrix:
    bt = transpose(b)
    return tuple(tuple(sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt) for row in a)


def matvec(a: Matrix, v: Sequence[Fraction]) -> Vector:
    return tuple(sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a)


def dot(v: Sequence[Fraction], w: Sequence[Fraction]) -> Fraction:
    return sum((x * y for x, y in zip(v, w)), Fraction(0))


def _echelon(m: Sequence[Sequence[Fraction]]):
    """Reduced row echelon form; returns (rows, pivot columns, sign of swaps)."""
    rows = [list(r) for r in m]
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    pivots: list[int] = []
    sign = 1
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, nrows) if rows[i][col] != 0), None)
        if piv is None:
            continue
        if piv != r:
            rows[r], rows[piv] = rows[piv], rows[r]
            sign = -sign
        p = rows[r][col]
        rows[r] = [x / p for x in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
        if r == nrows:
            break
    return rows, pivots, sign


def det(m: Matrix) -> Fraction:
    n = len(m)
    rows = [list(r) for r in m]
    result = Fraction(1)
    for col in range(n):
        piv = next((i for i in range(col, n) if rows[i][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            rows[col], rows[piv] = rows[piv], rows[col]
            result = -result
        p = rows[col][col]
        result *= p
        for i in range(col + 1, n):
            f = rows[i][col] / p
            if f:
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[col])]
    return result


def rank(m: Sequence[Sequence[Fraction]]) -> int:
    if not m:
        return 0
    return len(_echelon(m)[1])


def inverse(m: Matrix) -> Matrix:
    n = len(m)
    aug = [list(row) + list(e) for row, e in zip(m, identity(n))]
    rows, pivots, _ = _echelon(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return tuple(tuple(r[n:]) for r in rows)


def nullspace(m: Sequence[Sequence[Fraction]], ncols: int | None = None) -> list[Vector]:
    """Basis of {v : m v = 0}, one vector per free column."""
    if ncols is None:
        ncols = len(m[0])
    if not m:
        return [tuple(Fraction(int(i == j)) for i in range(ncols)) for j in range(ncols)]
    rows, pivots, _ = _echelon(m)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for r, p in enumerate(pivots):
            v[p] = -rows[r][f]
        basis.append(tuple(v))
    return basis


def solve(m: Matrix, b: Sequence[Fraction]) -> Vector:
    """Unique solution of m x = b for square nonsingular m."""
    return matvec(inverse(m), b)


def primitive_integral(v: Sequence[Fraction]) -> tuple[int, ...]:
    """Positive rescaling of a nonzero rational vector to a primitive integer vector."""
    den = math.lcm(*(Fraction(c).denominator for c in v))
    ints = [int(Fraction(c) * den) for c in v]
    g = math.gcd(*ints)
    if g == 0:
        raise ValueError("zero vector has no primitive representative")
    return tuple(c // g for c in ints)


def sign_normalized(v: Sequence[int]) -> tuple[int, ...]:
    """Flip sign so the first nonzero entry is positive."""
    for c in v:
        if c:
            return tuple(v) if c > 0 else tuple(-x for x in v)
    return tuple(v)


def proportional(v: Sequence[Fraction], w: Sequence[Fraction]) -> bool:
    """True when v and w span the same line (zero vectors are never proportional)."""
    return any(v) and any(w) and rank([list(v), list(w)]) == 1
