"""Integral quadratic lattices, rational vectors and isometries.

All arithmetic is exact.  Vectors and operators carry a reference to the
lattice they live on, and mixing lattices is an error rather than a silent
coordinate reinterpretation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from k3cone import _linalg as la
from k3cone import _poly


class LatticeError(ValueError):
    """Base class for malformed lattice input."""


class DegenerateFormError(LatticeError):
    pass


class DimensionError(LatticeError):
    pass


class IsotropicVectorError(LatticeError):
    pass


class IsometryError(LatticeError):
    pass


@dataclass(frozen=True)
class QuadLattice:
    """Free lattice with a symmetric nondegenerate integer Gram matrix."""

    gram: tuple[tuple[int, ...], ...]
    basis: tuple[str, ...]

    def __init__(self, gram: Sequence[Sequence[int]], basis: Sequence[str] | None = None):
        rows = tuple(tuple(int(c) for c in row) for row in gram)
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise DimensionError(f"gram must be square and nonempty, got {gram!r}")
        for row, orig in zip(rows, gram):
            for c, o in zip(row, orig):
                if Fraction(o) != c:
                    raise LatticeError(f"gram entries must be integers, got {o!r}")
        if any(rows[i][j] != rows[j][i] for i in range(n) for j in range(n)):
            raise LatticeError(f"gram is not symmetric: {rows}")
        if la.det(la.matrix(rows)) == 0:
            raise DegenerateFormError(f"gram is degenerate (determinant 0): {rows}")
        if basis is None:
            basis = tuple(f"e{i + 1}" for i in range(n))
        basis = tuple(basis)
        if len(basis) != n or len(set(basis)) != n:
            raise DimensionError(f"need {n} distinct basis labels, got {basis!r}")
        object.__setattr__(self, "gram", rows)
        object.__setattr__(self, "basis", basis)

    @property
    def rank(self) -> int:
        return len(self.gram)

    @property
    def determinant(self) -> int:
        return int(la.det(la.matrix(self.gram)))

    def gram_matrix(self) -> la.Matrix:
        return la.matrix(self.gram)

    def vec(self, *coords) -> "LatVec":
        if len(coords) == 1 and not isinstance(coords[0], (int, str, Fraction)):
            coords = tuple(coords[0])
        return LatVec(coords, self)

    def zero(self) -> "LatVec":
        return LatVec([0] * self.rank, self)

    def basis_vector(self, label: str) -> "LatVec":
        i = self.basis.index(label)
        return LatVec([int(j == i) for j in range(self.rank)], self)

    def parse(self, text: str) -> "LatVec":
        """Read a vector from ``"0,-3/2,1"`` style comma separated coordinates."""
        parts = [p for p in text.replace(" ", "").split(",") if p]
        return self.vec(parts)

    def to_dict(self) -> dict:
        return {"rank": self.rank, "gram": [list(r) for r in self.gram], "basis": list(self.basis)}

    @classmethod
    def from_dict(cls, d: dict) -> "QuadLattice":
        lat = cls(d["gram"], d.get("basis"))
        if "rank" in d and int(d["rank"]) != lat.rank:
            raise DimensionError(f"declared rank {d['rank']} does not match gram of size {lat.rank}")
        return lat


@dataclass(frozen=True)
class LatVec:
    """Vector with exact rational coordinates in a lattice basis."""

    coords: tuple[Fraction, ...]
    lattice: QuadLattice = field(repr=False)

    def __init__(self, coords: Iterable, lattice: QuadLattice):
        c = la.vector(coords)
        if len(c) != lattice.rank:
            raise DimensionError(f"vector of length {len(c)} on a rank {lattice.rank} lattice")
        object.__setattr__(self, "coords", c)
        object.__setattr__(self, "lattice", lattice)

    def _check(self, other: "LatVec") -> None:
        if not isinstance(other, LatVec):
            raise TypeError(f"expected LatVec, got {type(other).__name__}")
        if other.lattice != self.lattice:
            raise DimensionError("vectors live on different lattices")

    def __add__(self, other: "LatVec") -> "LatVec":
        self._check(other)
        return LatVec([a + b for a, b in zip(self.coords, other.coords)], self.lattice)

    def __sub__(self, other: "LatVec") -> "LatVec":
        self._check(other)
        return LatVec([a - b for a, b in zip(self.coords, other.coords)], self.lattice)

    def __neg__(self) -> "LatVec":
        return LatVec([-a for a in self.coords], self.lattice)

    def __mul__(self, k) -> "LatVec":
        k = la.to_fraction(k)
        return LatVec([k * a for a in self.coords], self.lattice)

    __rmul__ = __mul__

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def is_zero(self) -> bool:
        return not any(self.coords)

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coords)

    def is_primitive(self) -> bool:
        if not self.is_integral() or self.is_zero():
            raise ValueError("primitivity is defined only for integral nonzero vectors")
        return math.gcd(*(int(c) for c in self.coords)) == 1

    def primitive(self) -> "LatVec":
        """Primitive integral vector on the same ray (positive rescaling)."""
        return LatVec(la.primitive_integral(self.coords), self.lattice)

    def square(self) -> Fraction:
        return pair(self.lattice, self, self)

    def dot(self, other: "LatVec") -> Fraction:
        return pair(self.lattice, self, other)

    def as_strings(self) -> list[str]:
        return [la.fmt(c) for c in self.coords]

    def __str__(self) -> str:
        terms = []
        for c, lab in zip(self.coords, self.lattice.basis):
            if c == 0:
                continue
            mag = abs(c)
            body = lab if mag == 1 else f"{mag}{lab}" if mag.denominator == 1 else f"({mag}){lab}"
            terms.append(("-" if c < 0 else "+", body))
        if not terms:
            return "0"
        s = ("-" if terms[0][0] == "-" else "") + terms[0][1]
        for sign, body in terms[1:]:
            s += f" {sign} {body}"
        return s


def pair(lat: QuadLattice, v: LatVec, w: LatVec) -> Fraction:
    """Bilinear form v^T G w."""
    for u in (v, w):
        if len(u.coords) != lat.rank:
            raise DimensionError(f"vector of length {len(u.coords)} on a rank {lat.rank} lattice")
        if u.lattice != lat:
            raise DimensionError("vector does not belong to this lattice")
    g = lat.gram
    return sum(
        (v.coords[i] * g[i][j] * w.coords[j] for i in range(lat.rank) for j in range(lat.rank) if g[i][j]),
        Fraction(0),
    )


def reflect(lat: QuadLattice, root: LatVec, w: LatVec) -> LatVec:
    """Reflection of w in the hyperplane orthogonal to root."""
    rr = pair(lat, root, root)
    if rr == 0:
        raise IsotropicVectorError(f"cannot reflect in isotropic vector {root}")
    return w - (2 * pair(lat, w, root) / rr) * root


@dataclass(frozen=True)
class IsometryOp:
    """Exact rational matrix acting on coordinate columns, preserving the form.

    Columns are images of basis vectors: ``M @ v`` is the image of ``v``.
    """

    matrix: la.Matrix
    lattice: QuadLattice = field(repr=False)

    def __init__(self, matrix: Sequence[Sequence], lattice: QuadLattice):
        m = la.matrix(matrix)
        n = lattice.rank
        if len(m) != n or any(len(r) != n for r in m):
            raise DimensionError(f"operator must be {n}x{n}")
        g = lattice.gram_matrix()
        if la.matmul(la.matmul(la.transpose(m), g), m) != g:
            raise IsometryError(f"matrix does not preserve the form: {[[str(c) for c in r] for r in m]}")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "lattice", lattice)

    def __call__(self, v: LatVec) -> LatVec:
        return op_apply(self, v)

    def __matmul__(self, other: "IsometryOp") -> "IsometryOp":
        return op_compose(self, other)

    def as_strings(self) -> list[list[str]]:
        return [[la.fmt(c) for c in row] for row in self.matrix]

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for row in self.matrix for c in row)

    def determinant(self) -> Fraction:
        return la.det(self.matrix)

    def trace(self) -> Fraction:
        return sum((self.matrix[i][i] for i in range(len(self.matrix))), Fraction(0))

    def inverse(self) -> "IsometryOp":
        return IsometryOp(la.inverse(self.matrix), self.lattice)

    def is_identity(self) -> bool:
        return self.matrix == la.identity(len(self.matrix))


def identity_op(lat: QuadLattice) -> IsometryOp:
    return IsometryOp(la.identity(lat.rank), lat)


def neg_reflection_op(lat: QuadLattice, h: LatVec) -> IsometryOp:
    """The involution L -> -L + (L.h) h, valid for h of square 2."""
    hh = pair(lat, h, h)
    if hh != 2:
        raise LatticeError(f"minus-reflection formula needs square 2, but {h} has square {hh}")
    g = lat.gram
    n = lat.rank
    # image of basis vector e_j is -e_j + (G h)_j h
    gh = [sum((g[j][k] * h.coords[k] for k in range(n)), Fraction(0)) for j in range(n)]
    cols = [[-Fraction(int(i == j)) + gh[j] * h.coords[i] for i in range(n)] for j in range(n)]
    return IsometryOp(la.transpose(la.matrix(cols)), lat)


def reflection_op(lat: QuadLattice, root: LatVec) -> IsometryOp:
    """Matrix of w -> reflect(root, w)."""
    n = lat.rank
    cols = [reflect(lat, root, LatVec([int(i == j) for i in range(n)], lat)).coords for j in range(n)]
    return IsometryOp(la.transpose(cols), lat)


def _same_lattice(a: IsometryOp, b) -> None:
    if a.lattice != b.lattice:
        raise DimensionError("operands live on different lattices")


def op_compose(a: IsometryOp, b: IsometryOp) -> IsometryOp:
    """Matrix product a*b, i.e. apply b first."""
    _same_lattice(a, b)
    return IsometryOp(la.matmul(a.matrix, b.matrix), a.lattice)


def op_apply(a: IsometryOp, v: LatVec) -> LatVec:
    _same_lattice(a, v)
    return LatVec(la.matvec(a.matrix, v.coords), a.lattice)


def op_power(a: IsometryOp, m: int) -> IsometryOp:
    if m < 0:
        return op_power(a.inverse(), -m)
    result = la.identity(a.lattice.rank)
    base = a.matrix
    while m:
        if m & 1:
            result = la.matmul(result, base)
        base = la.matmul(base, base)
        m >>= 1
    return IsometryOp(result, a.lattice)


def char_poly(a: IsometryOp) -> tuple[int, ...]:
    """Integer coefficients of det(x I - M), highest degree first.

    For a rational matrix the monic polynomial is rescaled to the smallest
    integer multiple; isometries of integral lattices are already integral.
    """
    return _poly.integer_coefficients(_poly.charpoly(a.matrix))


@dataclass(frozen=True)
class Eigenspace:
    eigenvalue: Fraction
    basis: tuple[LatVec, ...]

    @property
    def dimension(self) -> int:
        return len(self.basis)


def rational_eigenlines(a: IsometryOp) -> list[Eigenspace]:
    """Eigenspaces for every rational eigenvalue, spanned by primitive integral vectors."""
    lat = a.lattice
    n = lat.rank
    out = []
    for lam in _poly.rational_roots(_poly.normalize(char_poly(a))):
        shifted = [[a.matrix[i][j] - (lam if i == j else 0) for j in range(n)] for i in range(n)]
        basis = []
        for v in la.nullspace(shifted, n):
            basis.append(LatVec(la.sign_normalized(la.primitive_integral(v)), lat))
        out.append(Eigenspace(lam, tuple(basis)))
    return out


@dataclass(frozen=True)
class RationalEnclosure:
    """Interval [lo, hi] certified to contain a real algebraic number."""

    lo: Fraction
    hi: Fraction
    polynomial: tuple[int, ...] = ()

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("enclosure needs lo <= hi")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, x: Fraction) -> bool:
        return self.lo <= x <= self.hi

    def to_dict(self) -> dict:
        return {
            "lo": la.fmt(self.lo),
            "hi": la.fmt(self.hi),
            "width": la.fmt(self.width),
            "polynomial": list(self.polynomial),
        }


def spectral_radius_enclosure(a: IsometryOp, eps) -> RationalEnclosure:
    """Enclose the largest modulus among the real roots of the characteristic polynomial.

    Rational roots are divided out and compared exactly; the remaining real
    roots are isolated with Sturm sequences and bisected.  Complex roots are
    ignored: for isometries of hyperbolic lattices a spectral radius above 1
    is attained by a real root.
    """
    eps = la.to_fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    cp = char_poly(a)
    sf = _poly.squarefree(_poly.normalize(cp))
    rational = _poly.rational_roots(sf)
    rest = sf
    for r in rational:
        rest = _poly.divmod_poly(rest, (Fraction(1), -r))[0]
    intervals = _poly.isolate_real_roots(rest) if _poly.degree(rest) > 0 else []
    if not rational and not intervals:
        raise ValueError("characteristic polynomial has no real roots")
    width = eps
    while True:
        cands = [(abs(r), abs(r)) for r in rational]
        for lo, hi in (_poly.refine_root(rest, lo, hi, width) for lo, hi in intervals):
            if lo >= 0:
                cands.append((lo, hi))
            elif hi <= 0:
                cands.append((-hi, -lo))
            else:
                cands.append((Fraction(0), max(-lo, hi)))
        cands.sort(key=lambda t: (t[1], t[0]), reverse=True)
        top = cands[0]
        rivals = [c for c in cands[1:] if c[1] > top[0] and c != top]
        if not rivals or width < eps / 2**40:
            return RationalEnclosure(top[0], top[1], cp)
        width /= 4
