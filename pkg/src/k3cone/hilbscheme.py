"""Néron-Severi lattice of S^[n] and the Beauville involutions acting on it."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from k3cone import _linalg as la
from k3cone.quadlat import (
    IsometryOp,
    LatticeError,
    LatVec,
    QuadLattice,
    neg_reflection_op,
    op_apply,
    pair,
)


class BeauvilleError(LatticeError):
    """The polarization does not give a Beauville involution via the reflection formula."""


class DenominatorProfileError(LatticeError):
    pass


@dataclass(frozen=True)
class HilbLattice:
    surface: QuadLattice
    n: int
    lattice: QuadLattice
    polarizations: tuple[LatVec, ...]

    @property
    def E(self) -> LatVec:
        return self.lattice.basis_vector("E")

    def H(self, k: int) -> LatVec:
        """The k-th polarization (1-based), lifted to the Hilbert scheme."""
        return self.polarizations[k - 1]

    def embed(self, surface_coords: Sequence) -> LatVec:
        """Lift a surface class to NS(S^[n]) (E-coordinate zero)."""
        c = list(la.vector(surface_coords))
        if len(c) != self.surface.rank:
            raise LatticeError(f"surface class needs {self.surface.rank} coordinates")
        return self.lattice.vec(c[:1] + [0] + c[1:])

    def vec(self, *coords) -> LatVec:
        return self.lattice.vec(*coords)


def _surface_labels(r: int) -> list[str]:
    return [f"H{i + 1}" for i in range(r)]


def build_hilb(surface_gram: Sequence[Sequence[int]], n: int,
               polarizations: Sequence[Sequence[int]] = ()) -> HilbLattice:
    """NS(S) + ZE with q(E) = -2(n-1), basis order {H1, E, H2, ...}.

    Placing E second matches the convention under which the rank-3
    operator matrices are usually written.
    """
    if n < 2:
        raise LatticeError(f"Hilbert scheme needs n >= 2, got {n}")
    surface = QuadLattice(surface_gram, _surface_labels(len(surface_gram)))
    r = surface.rank
    order = [0, r] + list(range(1, r))  # positions in NS(S) + ZE of {H1, E, H2, ...}
    full = [[0] * (r + 1) for _ in range(r + 1)]
    for i in range(r):
        for j in range(r):
            full[i][j] = surface.gram[i][j]
    full[r][r] = -2 * (n - 1)
    gram = [[full[i][j] for j in order] for i in order]
    labels = [surface.basis[0], "E"] + list(surface.basis[1:])
    lattice = QuadLattice(gram, labels)
    hl = HilbLattice(surface, n, lattice, ())
    pols = tuple(hl.embed(p) for p in polarizations)
    for p in pols:
        if not p.is_integral():
            raise LatticeError(f"polarization {p} is not integral")
    return HilbLattice(surface, n, lattice, pols)


def beauville_op(hl: HilbLattice, k: int) -> IsometryOp:
    """iota_k^*: L -> -L + q(L, H_k - E)(H_k - E)."""
    if not 1 <= k <= len(hl.polarizations):
        raise BeauvilleError(f"no polarization with index {k}")
    h = hl.H(k) - hl.E
    sq = pair(hl.lattice, h, h)
    if sq != 2:
        raise BeauvilleError(
            f"q(H{k} - E) = {sq}, not 2: the reflection formula does not apply "
            f"(needs H{k}^2 = 2n = {2 * hl.n}, got {pair(hl.lattice, hl.H(k), hl.H(k))})"
        )
    return neg_reflection_op(hl.lattice, h)


def f_star(hl: HilbLattice) -> IsometryOp:
    """Pullback of f = iota_2 o iota_1 on divisors: the matrix M1 M2."""
    if len(hl.polarizations) != 2:
        raise BeauvilleError("f needs exactly two polarizations")
    return beauville_op(hl, 1) @ beauville_op(hl, 2)


def f_push(hl: HilbLattice) -> IsometryOp:
    """Pushforward of f on curve classes: (f^*)^-1 = M2 M1 (the reversed composition)."""
    if len(hl.polarizations) != 2:
        raise BeauvilleError("f needs exactly two polarizations")
    return beauville_op(hl, 2) @ beauville_op(hl, 1)


@dataclass(frozen=True)
class CurveClass:
    """Rational vector standing for a curve class, with allowed denominators per coordinate."""

    vec: LatVec
    profile: tuple[int, ...]

    def __post_init__(self):
        if len(self.profile) != self.vec.lattice.rank:
            raise DenominatorProfileError("profile length does not match lattice rank")
        bad = [
            (lab, c) for lab, c, d in zip(self.vec.lattice.basis, self.vec.coords, self.profile)
            if d % c.denominator
        ]
        if bad:
            raise DenominatorProfileError(
                f"{self.vec} has coordinates outside the declared denominators {self.profile}: {bad}"
            )

    def square(self) -> Fraction:
        return self.vec.square()


def default_profile(hl: HilbLattice) -> tuple[int, ...]:
    """Integral on surface classes, halves on E."""
    return tuple(2 if lab == "E" else 1 for lab in hl.lattice.basis)


def curve(hl: HilbLattice, coords: Sequence, profile: Sequence[int] | None = None) -> CurveClass:
    return CurveClass(hl.lattice.vec(coords), tuple(profile) if profile else default_profile(hl))


def pushforward_on_curves(op: IsometryOp, c: CurveClass) -> CurveClass:
    """Image of a curve class, identified with NS(X)_Q through q.

    For an isometry M the pushforward on N_1 is (M^*)^-1 transported by q;
    an involution equals its inverse, so the same matrix acts.  For other
    operators pass the inverse explicitly (see ``f_push``).
    """
    return CurveClass(op_apply(op, c.vec), c.profile)


def change_of_basis(vectors: Sequence[LatVec]) -> tuple[la.Matrix, la.Matrix]:
    """Matrix with the given vectors as columns, and its exact inverse."""
    m = la.transpose(tuple(v.coords for v in vectors))
    return m, la.inverse(m)


def coordinates_in(basis: Sequence[LatVec], v: LatVec) -> tuple[Fraction, ...]:
    """Coefficients of v in another (rational) basis."""
    _, inv = change_of_basis(basis)
    return la.matvec(inv, v.coords)
