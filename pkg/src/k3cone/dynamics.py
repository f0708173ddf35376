"""Orbits of curve classes under f, the subcones J1 and J2, and the numerical
inputs to the non-periodicity and invariant-divisor arguments."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from k3cone import _linalg as la
from k3cone import _poly
from k3cone.conegeom import (
    ConeError,
    RatCone,
    cone_from_rays,
    contains,
    facet_pairings,
    in_cone_coefficients,
    is_extremal,
)
from k3cone.hilbscheme import (
    HilbLattice,
    beauville_op,
    f_push,
    f_star,
)
from k3cone.quadlat import (
    IsometryOp,
    LatVec,
    char_poly,
    op_apply,
    op_power,
    pair,
    rational_eigenlines,
    spectral_radius_enclosure,
)
from k3cone.report import ClaimReport, verdict

DEFAULT_MAX_M = 20


def _other(i: int) -> int:
    return 2 if i == 1 else 1


def L(hl: HilbLattice, i: int) -> LatVec:
    """L_i = H_{i+1} - 3/2 E."""
    return hl.H(_other(i)) - Fraction(3, 2) * hl.E


def K(hl: HilbLattice, i: int) -> LatVec:
    """K_i = 2H_{i+1} - H_i - 1/2 E."""
    return 2 * hl.H(_other(i)) - hl.H(i) - Fraction(1, 2) * hl.E


@dataclass(frozen=True)
class JConePair:
    J1: RatCone
    J2: RatCone
    generators: tuple[tuple[LatVec, LatVec, LatVec], tuple[LatVec, LatVec, LatVec]]

    def __getitem__(self, i: int) -> RatCone:
        return (self.J1, self.J2)[i - 1]


def j_cones(hl: HilbLattice, mori: RatCone | None = None) -> JConePair:
    """J_i = cone(L_i, K_i, E); with a Mori cone given, every ray must be extremal in it."""
    if hl.lattice.rank != 3 or len(hl.polarizations) != 2:
        raise ConeError("J-cones need a rank 3 lattice with two polarizations")
    gens = tuple((L(hl, i), K(hl, i), hl.E) for i in (1, 2))
    if mori is not None:
        for g in gens:
            for v in g:
                if not is_extremal(mori, v):
                    raise ConeError(f"{v} is not an extremal ray of the Mori cone")
    cones = [cone_from_rays(hl.lattice, g) for g in gens]
    return JConePair(cones[0], cones[1], gens)



def cone_inclusion_check(op: IsometryOp, src: RatCone, dst: RatCone,
                         claim_id: str = "cone-inclusion") -> ClaimReport:
    """Push every ray of src through op and test membership in dst."""
    images = []
    ok = True
    for r in src.rays:
        img = op_apply(op, r)
        inside = contains(dst, img)
        ok = ok and inside
        coeffs = in_cone_coefficients(dst, img) if inside else None
        images.append({
            "ray": r.as_strings(),
            "image": img.as_strings(),
            "facet_pairings": [la.fmt(x) for x in facet_pairings(dst, img)],
            "contained": inside,
            "decomposition": None if coeffs is None else [
                {"ray": g.as_strings(), "coefficient": la.fmt(c)} for g, c in coeffs
            ],
        })
    cert = {
        "operator": op.as_strings(),
        "source_rays": [r.as_strings() for r in src.rays],
        "target_facets": [f.as_strings() for f in dst.facets],
        "images": images,
    }
    return ClaimReport(claim_id, verdict(ok), cert)


def boundary_pairing_check(hl: HilbLattice, ample: Sequence[LatVec]) -> ClaimReport:
    """For each i, find the ample class vanishing on K_i and E and record its pairing with L_i.

    Subtracting a positive multiple of L_i from a class in J_i keeps it in
    J_i precisely because this pairing is positive while the others vanish.
    """
    rows = []
    ok = True
    for i in (1, 2):
        li, ki = L(hl, i), K(hl, i)
        supporting = [a for a in ample if pair(hl.lattice, a, ki) == 0 and pair(hl.lattice, a, hl.E) == 0]
        if len(supporting) != 1:
            ok = False
            rows.append({"index": i, "supporting_class": None, "candidates": len(supporting)})
            continue
        a = supporting[0]
        vals = {"L": pair(hl.lattice, a, li), "K": pair(hl.lattice, a, ki), "E": pair(hl.lattice, a, hl.E)}
        ok = ok and vals["L"] > 0
        rows.append({
            "index": i,
            "supporting_class": a.as_strings(),
            "supporting_label": str(a),
            "L": li.as_strings(),
            "K": ki.as_strings(),
            "pairings": {k: la.fmt(v) for k, v in vals.items()},
        })
    return ClaimReport("boundary-pairings", verdict(ok), {"rows": rows})


@dataclass(frozen=True)
class OrbitStep:
    m: int
    cls: LatVec
    in_J1: bool
    pairing: Fraction

    def to_dict(self) -> dict:
        return {"m": self.m, "class": self.cls.as_strings(), "in_J1": self.in_J1, "pairing": la.fmt(self.pairing)}


@dataclass(frozen=True)
class OrbitRecord:
    seed: LatVec
    ample: LatVec
    steps: tuple[OrbitStep, ...]

    def ratios(self) -> list[Fraction | None]:
        """Consecutive pairing ratios p_{m+1}/p_m (None where p_m = 0)."""
        ps = [s.pairing for s in self.steps]
        return [b / a if a else None for a, b in zip(ps, ps[1:])]

    def to_dict(self) -> dict:
        return {
            "seed": self.seed.as_strings(),
            "ample": self.ample.as_strings(),
            "steps": [s.to_dict() for s in self.steps],
        }


def orbit(hl: HilbLattice, seed: LatVec, steps: int, ample: LatVec | None = None,
          op: IsometryOp | None = None) -> OrbitRecord:
    """(f_*)^m seed for m = 0..steps, with J1 membership and pairing against `ample`."""
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    op = op or f_push(hl)
    if ample is None:
        ample = 3 * hl.H(1) + 3 * hl.H(2) - 7 * hl.E
    j1 = j_cones(hl).J1
    out = []
    v = seed
    for m in range(steps + 1):
        out.append(OrbitStep(m, v, contains(j1, v), pair(hl.lattice, v, ample)))
        v = op_apply(op, v)
    return OrbitRecord(seed, ample, tuple(out))


def _factor_off_rational(cp: tuple[int, ...]):
    p = _poly.normalize(cp)
    roots = _poly.rational_roots(p)
    rest = p
    for r in roots:
        while _poly.degree(rest) > 0 and _poly.evaluate(rest, r) == 0:
            rest = _poly.divmod_poly(rest, (Fraction(1), -r))[0]
    return roots, rest


def periodicity_certificate(hl: HilbLattice, seed: LatVec, max_m: int = DEFAULT_MAX_M,
                            op: IsometryOp | None = None) -> ClaimReport:
    """Certify that no power (f_*)^m with 1 <= m <= max_m maps seed onto its own ray.

    A rational vector can only be an eigenvector for a rational eigenvalue,
    so it suffices to compare against the rational eigenlines; the squarefree
    characteristic polynomials of the powers guarantee that f^m has the same
    eigenlines as f.  An explicit orbit sweep double-checks the conclusion.
    """
    if seed.is_zero():
        raise ValueError("seed is the zero class")
    op = op or f_push(hl)
    cp = char_poly(op)
    roots, rest = _factor_off_rational(cp)
    rest_int = _poly.integer_coefficients(rest) if _poly.degree(rest) > 0 else ()
    disc = None
    if len(rest_int) == 3:
        a, b, c = rest_int
        disc = b * b - 4 * a * c
    eigen_hits = []
    eigen = []
    for sp in rational_eigenlines(op):
        span = [list(v.coords) for v in sp.basis]
        on = la.rank(span + [list(seed.coords)]) == len(span)
        eigen.append({"eigenvalue": la.fmt(sp.eigenvalue), "basis": [v.as_strings() for v in sp.basis],
                      "contains_seed": on})
        if on:
            eigen_hits.append(la.fmt(sp.eigenvalue))
    powers_squarefree = all(
        _poly.degree(_poly.gcd(p := _poly.normalize(char_poly(op_power(op, m))), _poly.derivative(p))) == 0
        for m in range(1, max_m + 1)
    )
    returns = []
    v = seed
    for m in range(1, max_m + 1):
        v = op_apply(op, v)
        if la.rank([list(seed.coords), list(v.coords)]) == 1:
            returns.append(m)
    ok = not eigen_hits and not returns and powers_squarefree and (disc is None or not _poly.is_square_int(disc))
    cert = {
        "operator": op.as_strings(),
        "seed": seed.as_strings(),
        "char_poly": list(cp),
        "rational_roots": [la.fmt(r) for r in roots],
        "irrational_factor": list(rest_int),
        "irrational_factor_discriminant": disc,
        "discriminant_is_square": None if disc is None else _poly.is_square_int(disc),
        "powers_have_simple_spectrum": powers_squarefree,
        "eigenlines": eigen,
        "seed_on_eigenline": eigen_hits,
        "max_m": max_m,
        "ray_returns": returns,
    }
    return ClaimReport("non-periodicity", verdict(ok), cert)


def growth_report(rec: OrbitRecord, op: IsometryOp, enclosure_eps=Fraction(1, 10**6)) -> dict:
    """Pairing ratios along the orbit next to an enclosure of the spectral radius of op."""
    enc = spectral_radius_enclosure(op, enclosure_eps)
    ratios = rec.ratios()
    return {
        "ratios": [None if r is None else la.fmt(r) for r in ratios],
        "spectral_radius": enc.to_dict(),
        "relative_gap": [
            None if r is None else la.fmt(abs(r - enc.lo) / enc.lo) for r in ratios
        ],
    }


def invariant_divisor_report(hl: HilbLattice, op: IsometryOp | None = None) -> ClaimReport:
    """Eigenvalue-1 line of f^* and the reasons no effective class lies on it."""
    op = op or f_star(hl)
    fixed = [sp for sp in rational_eigenlines(op) if sp.eigenvalue == 1]
    if not fixed or fixed[0].dimension != 1:
        dim = fixed[0].dimension if fixed else 0
        return ClaimReport("invariant-divisor", verdict(False),
                           {"fixed_dimension": dim, "non_generic": True,
                            "operator": op.as_strings()})
    w = fixed[0].basis[0]
    i1 = beauville_op(hl, 1)
    img = op_apply(i1, w)
    sq = w.square()
    e_sq = hl.E.square()
    e_on_line = la.rank([list(w.coords), list(hl.E.coords)]) == 1
    ratio = e_sq / sq
    ratio_is_square = _poly.is_square_int(ratio.numerator) and _poly.is_square_int(ratio.denominator)
    negated = img == -w
    ok = negated and not e_on_line and not ratio_is_square
    cert = {
        "operator": op.as_strings(),
        "fixed_line": w.as_strings(),
        "fixed_label": str(w),
        "iota1_image": img.as_strings(),
        "iota1_negates": negated,
        "square": la.fmt(sq),
        "E_square": la.fmt(e_sq),
        "E_on_line": e_on_line,
        "k_squared_for_E": la.fmt(ratio),
        "k_squared_is_rational_square": ratio_is_square,
        "conclusion": "an invariant class lies on the fixed line, which iota1^* negates; "
                      "a nonzero effective class cannot be sent to minus an effective class",
    }
    return ClaimReport("invariant-divisor", verdict(ok), cert)


def intersection_emptiness_numerics(hl: HilbLattice) -> ClaimReport:
    """Surface-level degree and sign computations behind the disjointness of the two planes."""
    s = hl.surface
    h1 = s.vec(1, 0)
    h2 = s.vec(0, 1)
    deg = pair(s, h1, 2 * h1 - h2)
    neg = pair(s, h2 - h1, h2)
    h2_positive = pair(s, h2, h2) > 0
    src = K(hl, 2)
    img = op_apply(beauville_op(hl, 1), src)
    expected = L(hl, 1)
    ok = deg == 4 and neg < 0 and h2_positive and img == expected
    cert = {
        "degree_h1_on_2h1_minus_h2": la.fmt(deg),
        "pairing_h2_minus_h1_with_h2": la.fmt(neg),
        "h2_square": la.fmt(pair(s, h2, h2)),
        "iota1_source": src.as_strings(),
        "iota1_image": img.as_strings(),
        "expected_image": expected.as_strings(),
    }
    return ClaimReport("intersection-numerics", verdict(ok), cert)
