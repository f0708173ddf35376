"""Rational polyhedral cones in a quadratic lattice, dual with respect to the form.

Facets are stored as q-pairing vectors: a facet vector f cuts out the
halfspace {w : q(f, w) >= 0}.  With that convention the dual cone simply
swaps rays and facets.  Conversion between the two descriptions enumerates
(rank-1)-subsets, which is exact and fast for rank <= 4.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from k3cone import _linalg as la
from k3cone.diophant import orthogonal_square_classes
from k3cone.hilbscheme import HilbLattice
from k3cone.quadlat import LatVec, QuadLattice, pair
from k3cone.report import ClaimReport, verdict

MAX_RANK = 4
SCALING_RULE = "primitive integral representative in the lattice basis (positive rescaling)"


class ConeError(ValueError):
    pass


def _prim(v: Sequence[Fraction], lat: QuadLattice) -> LatVec:
    return LatVec(la.primitive_integral(v), lat)


@dataclass(frozen=True)
class RatCone:
    lattice: QuadLattice
    rays: tuple[LatVec, ...]
    facets: tuple[LatVec, ...]

    def to_dict(self) -> dict:
        return {
            "basis": list(self.lattice.basis),
            "rays": [r.as_strings() for r in self.rays],
            "facets": [f.as_strings() for f in self.facets],
        }


def _facet_functionals(vectors: list[tuple[Fraction, ...]], n: int) -> list[tuple[int, ...]]:
    """Primitive integer functionals, nonnegative on all vectors and
    vanishing on n-1 independent ones."""
    found = []
    integral = all(c.denominator == 1 for v in vectors for c in v)
    ivecs = [tuple(int(c) for c in v) for v in vectors] if integral else vectors
    for subset in itertools.combinations(ivecs, n - 1):
        if n == 3 and integral:
            (a0, a1, a2), (b0, b1, b2) = subset
            cross = (a1 * b2 - a2 * b1, a2 * b0 - a0 * b2, a0 * b1 - a1 * b0)
            if not any(cross):
                continue
            func = la.primitive_integral(cross)
        else:
            if la.rank(list(subset)) != n - 1:
                continue
            ker = la.nullspace(list(subset), n)
            if len(ker) != 1:
                continue
            func = la.primitive_integral(ker[0])
        vals = [sum(x * y for x, y in zip(func, v)) for v in ivecs]
        if all(x >= 0 for x in vals):
            pass
        elif all(x <= 0 for x in vals):
            func = tuple(-c for c in func)
        else:
            continue
        if func not in found:
            found.append(func)
    return sorted(found)


def cone_from_rays(lat: QuadLattice, rays: Iterable) -> RatCone:
    """Full-dimensional pointed cone spanned by `rays`, with its facet description.

    Redundant generators are dropped; the stored rays are the extremal ones,
    scaled to primitive integral vectors.
    """
    n = lat.rank
    if n > MAX_RANK:
        raise ConeError(f"cone algorithms are limited to rank <= {MAX_RANK}")
    vecs = []
    for r in rays:
        coords = r.coords if isinstance(r, LatVec) else la.vector(r)
        if isinstance(r, LatVec) and r.lattice != lat:
            raise ConeError("ray lives on a different lattice")
        if len(coords) != n:
            raise ConeError(f"ray {coords} is not in the rank {n} ambient space")
        if not any(coords):
            continue
        p = la.primitive_integral(coords)
        if p not in vecs:
            vecs.append(p)
    if la.rank([list(v) for v in vecs]) < n:
        raise ConeError("rays do not span the ambient space")
    vecs_f = [la.vector(v) for v in vecs]
    funcs = _facet_functionals(vecs_f, n)
    if not funcs or la.rank([list(f) for f in funcs]) < n:
        raise ConeError("cone contains a line")
    ginv = la.inverse(lat.gram_matrix())
    facets = tuple(sorted((_prim(la.matvec(ginv, la.vector(f)), lat) for f in funcs), key=lambda v: v.coords))
    extremal = []
    for v in vecs_f:
        tight = [list(f) for f in funcs if la.dot(f, v) == 0]
        if la.rank(tight) == n - 1 if tight else n == 1:
            extremal.append(LatVec(v, lat))
    return RatCone(lat, tuple(sorted(extremal, key=lambda v: v.coords)), facets)


def cone_from_facets(lat: QuadLattice, facets: Iterable) -> RatCone:
    """Cone {w : q(f, w) >= 0 for all f}; computed as the dual of cone(facets)."""
    return dual_cone_q(lat, cone_from_rays(lat, facets))


def dual_cone_q(lat: QuadLattice, cone: RatCone) -> RatCone:
    """{v : q(v, w) >= 0 for every w in the cone}."""
    if cone.lattice != lat:
        raise ConeError("cone lives on a different lattice")
    dual = cone_from_rays(lat, cone.facets)
    return dual


def same_rays(a: Iterable[LatVec], b: Iterable[LatVec]) -> bool:
    """Projective equality of two ray sets."""
    pa = sorted(la.primitive_integral(v.coords) for v in a)
    pb = sorted(la.primitive_integral(v.coords) for v in b)
    return pa == pb


def facet_pairings(cone: RatCone, v: LatVec) -> list[Fraction]:
    return [pair(cone.lattice, f, v) for f in cone.facets]


def contains(cone: RatCone, v: LatVec) -> bool:
    return all(x >= 0 for x in facet_pairings(cone, v))


def is_extremal(cone: RatCone, v: LatVec) -> bool:
    """v spans an extremal ray: it is in the cone and lies on rank-1 independent facets."""
    if v.is_zero() or not contains(cone, v):
        return False
    tight = [list(f.coords) for f, x in zip(cone.facets, facet_pairings(cone, v)) if x == 0]
    return la.rank(tight) == cone.lattice.rank - 1 if tight else False


def in_cone_coefficients(cone: RatCone, v: LatVec) -> list[tuple[LatVec, Fraction]] | None:
    """Nonnegative coefficients expressing v over some simplicial subset of rays, or None."""
    n = cone.lattice.rank
    for subset in itertools.combinations(cone.rays, n):
        m = la.transpose(tuple(r.coords for r in subset))
        if la.det(m) == 0:
            continue
        coeffs = la.solve(m, v.coords)
        if all(c >= 0 for c in coeffs):
            return list(zip(subset, coeffs))
    return None


# ---------------------------------------------------------------------------
# extremal-ray predicates


DIV_RULES = ("none", "2", "4", "2-not-4")


@dataclass(frozen=True)
class HTPredicate:
    """Square value plus a divisibility rule on the (H1, H2)-coordinates."""

    square: int
    div: str = "none"

    def __post_init__(self):
        if self.div not in DIV_RULES:
            raise ValueError(f"unknown divisibility rule {self.div!r}; expected one of {DIV_RULES}")

    def divisibility_ok(self, x: int, y: int) -> bool:
        if self.div == "none":
            return True
        if self.div == "2":
            return x % 2 == 0 and y % 2 == 0
        if self.div == "4":
            return x % 4 == 0 and y % 4 == 0
        return x % 2 == 0 and y % 2 == 0 and not (x % 4 == 0 and y % 4 == 0)

    def to_dict(self) -> dict:
        return {"square": self.square, "div": self.div}

    @classmethod
    def from_dict(cls, d: dict) -> "HTPredicate":
        return cls(int(d["square"]), str(d.get("div", "none")))


# The shipped list; "divisible by 2 but not by 4" reads the typo in the source list.
DEFAULT_PREDICATES = (
    HTPredicate(-2, "none"),
    HTPredicate(-4, "2-not-4"),
    HTPredicate(-4, "4"),
    HTPredicate(-12, "2"),
    HTPredicate(-36, "4"),
)


def _xyz(hl: HilbLattice, v: LatVec) -> tuple[Fraction, Fraction, Fraction]:
    """(x, y, z) with v = x H1 + y H2 + z E."""
    b = hl.lattice.basis
    return v.coords[b.index("H1")], v.coords[b.index("H2")], v.coords[b.index("E")]


def _from_xyz(hl: HilbLattice, x, y, z) -> LatVec:
    coords = {"H1": x, "H2": y, "E": z}
    return hl.lattice.vec([coords[lab] for lab in hl.lattice.basis])


def matching_predicates(hl: HilbLattice, v: LatVec, predicates: Sequence[HTPredicate]) -> list[HTPredicate]:
    """Predicates satisfied by the scaled representative of v (empty if q(v, H1) < 0)."""
    rep = v.primitive()
    if pair(hl.lattice, rep, hl.H(1)) < 0:
        return []
    x, y, _ = (int(c) for c in _xyz(hl, rep))
    sq = rep.square()
    return [p for p in predicates if p.square == sq and p.divisibility_ok(x, y)]


@dataclass(frozen=True)
class SearchBox:
    xy_bound: int
    e_bound: int
    e_denominator: int = 2

    def to_dict(self) -> dict:
        return {"xy_bound": self.xy_bound, "e_bound": self.e_bound, "e_denominator": self.e_denominator}

    @classmethod
    def from_dict(cls, d: dict) -> "SearchBox":
        return cls(int(d["xy_bound"]), int(d["e_bound"]), int(d.get("e_denominator", 2)))


def ht_candidates(hl: HilbLattice, predicates: Sequence[HTPredicate], box: SearchBox) -> list[LatVec]:
    """Rays in the box whose scaled representative satisfies some predicate.

    The box is |x|, |y| <= xy_bound and z = w / e_denominator with
    |w| <= e_bound.  Returns primitive integral representatives sorted by
    coordinates, one per ray.
    """
    if not predicates:
        raise ValueError("empty predicate list")
    seen = set()
    out = []
    rng = range(-box.xy_bound, box.xy_bound + 1)
    for x, y, w in itertools.product(rng, rng, range(-box.e_bound, box.e_bound + 1)):
        if x == 0 and y == 0 and w == 0:
            continue
        v = _from_xyz(hl, x, y, Fraction(w, box.e_denominator))
        rep = v.primitive()
        if rep.coords in seen:
            continue
        seen.add(rep.coords)
        if matching_predicates(hl, rep, predicates):
            out.append(rep)
    return sorted(out, key=lambda v: v.coords)


# ---------------------------------------------------------------------------
# replay of the extremal-ray enumeration


def _ray_analysis(hl: HilbLattice, k: int, squares: Sequence[int]) -> dict:
    """Classes with q(R, H_k) = 0 and q(R) = s: surface part on the H_k-orthogonal line."""
    g = hl.surface.gram
    h = [int(i == k - 1) for i in range(2)]
    line = orthogonal_square_classes(g, h, 0)
    v0 = line.generator
    q0 = line.generator_square
    e = int(pair(hl.lattice, hl.E, hl.E))
    out = {"polarization": f"H{k}", "orthogonal_generator": list(v0), "generator_square": q0,
           "square_polynomial": f"{q0}*t^2 + {e}*z^2", "solutions": []}
    if q0 >= 0 or e >= 0:
        out["finite"] = False
        out["ok"] = False
        return out
    for s in squares:
        tb = math.isqrt(s // q0)
        for t in range(-tb, tb + 1):
            rest = s - q0 * t * t
            if rest % e:
                continue
            z2 = rest // e
            if z2 < 0 or math.isqrt(z2) ** 2 != z2:
                continue
            for z in sorted({math.isqrt(z2), -math.isqrt(z2)}):
                if t == 0 and z == 0:
                    continue
                out["solutions"].append({"square": s, "t": t, "z": z, "class": [t * v0[0], t * v0[1], z]})
    out["finite"] = True
    out["only_E_line"] = all(sol["t"] == 0 for sol in out["solutions"])
    out["ok"] = out["only_E_line"]
    return out


def derive_region(hl: HilbLattice, facet: LatVec, s: int) -> dict:
    """Finite search region for {q(R) = s, q(R, H1) > 0, q(facet, R) < 0}.

    With u = q(R, H1) and D = q(H1,H2)^2 - H1^2 H2^2 one has
    H1^2 q(R) = u^2 - D y^2 + H1^2 E^2 z^2.  Writing the facet inequality as
    alpha u + beta y + gamma z < 0 with alpha > 0 bounds u by
    U = -(beta y + gamma z)/alpha, hence P(y, z) < -H1^2 s for a quadratic
    form P; when P is positive definite its sublevel set is a bounded ellipse.
    """
    lat = hl.lattice
    H1, H2, E = hl.H(1), hl.H(2), hl.E
    a = int(pair(lat, H1, H1))
    c = int(pair(lat, H1, H2))
    d = int(pair(lat, H2, H2))
    e = int(pair(lat, E, E))
    lx, ly, lz = pair(lat, facet, H1), pair(lat, facet, H2), pair(lat, facet, E)
    D = c * c - a * d
    info = {"facet": facet.as_strings(), "square": s, "H1_square": a, "D": D,
            "functional": [str(lx), str(ly), str(lz)]}
    if a <= 0:
        info.update(finite=False, reason="H1^2 <= 0")
        return info
    alpha = Fraction(lx, a) if isinstance(lx, int) else lx / a
    beta = ly - lx * Fraction(c, a)
    gamma = lz
    info.update(alpha=alpha, beta=beta, gamma=gamma)
    if alpha <= 0:
        info.update(finite=False, reason="facet functional does not bound q(R, H1) from above")
        return info
    A = D - (beta / alpha) ** 2
    B = -2 * beta * gamma / alpha**2
    C = -a * e - (gamma / alpha) ** 2
    disc = 4 * A * C - B * B
    info["P"] = [A, B, C]
    if not (A > 0 and disc > 0):
        info.update(finite=False, reason="bounding quadratic form is not positive definite")
        return info
    K = Fraction(-a * s)
    y2 = 4 * C * K / disc
    z2 = 4 * A * K / disc
    info.update(finite=True, K=K, y_bound=_isqrt_frac(y2), z_sq_bound=z2)
    return info


def _isqrt_frac(q: Fraction) -> int:
    """Largest integer n with n^2 <= q."""
    n = math.isqrt(q.numerator // q.denominator)
    while (n + 1) ** 2 <= q:
        n += 1
    return n


def enumerate_region(hl: HilbLattice, facet: LatVec, s: int, region: dict, e_denominator: int = 1):
    """Exhaust a derived region; returns (visited, hits) with hits as (x, y, z)."""
    lat = hl.lattice
    a = region["H1_square"]
    c = int(pair(lat, hl.H(1), hl.H(2)))
    alpha, beta, gamma = region["alpha"], region["beta"], region["gamma"]
    Y = region["y_bound"]
    W = _isqrt_frac(region["z_sq_bound"] * e_denominator * e_denominator)
    visited = 0
    hits = []
    for y in range(-Y, Y + 1):
        for w in range(-W, W + 1):
            z = Fraction(w, e_denominator)
            U = -(beta * y + gamma * z) / alpha
            if U <= 0:
                continue
            x_lo = math.floor(Fraction(-c * y, a))
            x_hi = math.ceil((U - c * y) / a)
            for x in range(x_lo, x_hi + 1):
                visited += 1
                R = _from_xyz(hl, x, y, z)
                u = pair(lat, R, hl.H(1))
                if u <= 0 or pair(lat, facet, R) >= 0:
                    continue
                if R.square() == s:
                    hits.append((x, y, z))
    return visited, hits


def _square_identity(hl: HilbLattice) -> str:
    """The identity H1^2 q(R) = u^2 - D y^2 + H1^2 E^2 z^2 with the scenario's numbers."""
    lat = hl.lattice
    a = int(pair(lat, hl.H(1), hl.H(1)))
    c = int(pair(lat, hl.H(1), hl.H(2)))
    d = int(pair(lat, hl.H(2), hl.H(2)))
    e = int(pair(lat, hl.E, hl.E))
    return f"{a}*q(R) = u^2 - {c * c - a * d}*y^2 + ({a * e})*z^2, u = q(R, H1) = {a}x + {c}y"


def mori_lemma_replay(hl: HilbLattice, mori_generators: Sequence,
                      predicates: Sequence[HTPredicate] = DEFAULT_PREDICATES,
                      squares: Sequence[int] | None = None, e_denominator: int = 1) -> ClaimReport:
    """Certify that no predicate-satisfying class lies outside cone(mori_generators).

    Covers the q(R, H_k) = 0 lines exactly, then every facet inequality and
    every square value over a derived finite region.  Classes are scaled
    representatives (``e_denominator=1``).  Square-only hits that fail the
    divisibility rule are listed but do not falsify the claim.
    """
    if hl.lattice.rank != 3 or len(hl.polarizations) != 2:
        raise ConeError("replay needs a rank 3 lattice with two polarizations")
    if squares is None:
        squares = sorted({p.square for p in predicates}, reverse=True)
    squares = list(squares)
    cone = cone_from_rays(hl.lattice, mori_generators)
    rays_analysis = [_ray_analysis(hl, k, squares) for k in (1, 2)]
    cases = []
    ok = all(r["ok"] for r in rays_analysis)
    total_visits = 0
    for facet in cone.facets:
        for s in squares:
            region = derive_region(hl, facet, s)
            case = {"facet": facet.as_strings(), "facet_label": str(facet), "square": s,
                    "region": {k: v for k, v in region.items() if k not in ("facet", "square")}}
            if not region["finite"]:
                case.update(status="underived", hits=[], rejected_by_divisibility=[], visited=0)
                ok = False
                cases.append(case)
                continue
            visited, hits = enumerate_region(hl, facet, s, region, e_denominator)
            total_visits += visited
            real, rejected = [], []
            for x, y, z in hits:
                R = _from_xyz(hl, x, y, z)
                integral = R.is_integral()
                prim = integral and R.is_primitive()
                rec = [str(x), str(y), str(z)]
                preds = [p for p in predicates if p.square == s and integral and p.divisibility_ok(int(x), int(y))]
                if preds and (prim or e_denominator != 1):
                    real.append(rec)
                else:
                    rejected.append(rec)
            case.update(status="empty" if not real else "counterexample", hits=real,
                        rejected_by_divisibility=rejected, visited=visited)
            ok = ok and not real
            cases.append(case)
    cert = {
        "basis": list(hl.lattice.basis),
        "gram": [list(r) for r in hl.lattice.gram],
        "mori_generators": [r.as_strings() for r in cone.rays],
        "facets": [f.as_strings() for f in cone.facets],
        "predicates": [p.to_dict() for p in predicates],
        "squares": squares,
        "scaling_rule": SCALING_RULE,
        "e_denominator": e_denominator,
        "coordinate_names": "R = x*H1 + y*H2 + z*E",
        "identity": _square_identity(hl),
        "zero_pairing_lines": rays_analysis,
        "cases": cases,
        "total_visited": total_visits,
    }
    return ClaimReport("mori-lemma-replay", verdict(ok), cert, title="extremal rays outside the cone: none")
