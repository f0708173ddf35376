"""Binary and ternary integer quadratic forms: enumeration, Pell orbits, isotropy.

Searches are exhaustive inside stated boxes and return their results in a
documented order, so that two runs produce identical certificates.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from sympy.ntheory import factorint, isprime

from k3cone import _linalg as la

DEFAULT_SEARCH_HEIGHT = 200
INFINITY = "infinity"


def default_search_height() -> int:
    """Brute-force height, overridable through ``K3CONE_SEARCH_HEIGHT``."""
    raw = os.environ.get("K3CONE_SEARCH_HEIGHT")
    if raw is None:
        return DEFAULT_SEARCH_HEIGHT
    h = int(raw)
    if h < 1:
        raise ValueError("K3CONE_SEARCH_HEIGHT must be a positive integer")
    return h


def binary_value(a: int, b: int, c: int, x: int, y: int) -> int:
    return a * x * x + b * x * y + c * y * y


# ---------------------------------------------------------------------------
# exhaustive conic enumeration


@dataclass(frozen=True)
class ConicSolutionSet:
    form: tuple[int, int, int]
    target: int
    bound: int
    solutions: tuple[tuple[int, int], ...]

    def to_dict(self) -> dict:
        return {
            "form": list(self.form),
            "target": self.target,
            "bound": self.bound,
            "solutions": [list(s) for s in self.solutions],
        }


def solve_conic(a: int, b: int, c: int, N: int, bound: int) -> ConicSolutionSet:
    """All (x, y) with a x^2 + b xy + c y^2 = N and |x|, |y| <= bound.

    Output is sorted lexicographically on (x, y).
    """
    if bound < 1:
        raise ValueError("bound must be >= 1")
    sols = []
    for x in range(-bound, bound + 1):
        # solve c y^2 + (b x) y + (a x^2 - N) = 0 for integer y
        qa, qb, qc = c, b * x, a * x * x - N
        if qa == 0:
            if qb == 0:
                if qc == 0:
                    sols.extend((x, y) for y in range(-bound, bound + 1))
                continue
            if qc % qb == 0 and abs(qc // qb) <= bound:
                sols.append((x, -qc // qb))
            continue
        disc = qb * qb - 4 * qa * qc
        if disc < 0:
            continue
        r = math.isqrt(disc)
        if r * r != disc:
            continue
        for num in sorted({-qb - r, -qb + r}):
            if num % (2 * qa) == 0:
                y = num // (2 * qa)
                if abs(y) <= bound:
                    sols.append((x, y))
    return ConicSolutionSet((a, b, c), N, bound, tuple(sorted(set(sols))))


# ---------------------------------------------------------------------------
# Pell-type equations t^2 - D y^2 = N


def _check_nonsquare(D: int) -> None:
    if D <= 0 or math.isqrt(D) ** 2 == D:
        raise ValueError(f"D must be a positive nonsquare integer, got {D}")


def fundamental_unit(D: int) -> tuple[int, int]:
    """Smallest (u, v) with u, v > 0 and u^2 - D v^2 = 1 (continued fraction of sqrt D)."""
    _check_nonsquare(D)
    a0 = math.isqrt(D)
    m, d, a = 0, 1, a0
    p_prev, p = 1, a0
    q_prev, q = 0, 1
    while p * p - D * q * q != 1:
        m = d * a - m
        d = (D - m * m) // d
        a = (a0 + m) // d
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
    return p, q


def pell_fundamental_solutions(D: int, N: int) -> tuple[list[tuple[int, int]], dict]:
    """Representatives of every solution class of t^2 - D y^2 = N.

    Uses Nagell's bounds on the smallest y in each class.  Returns the
    representatives (with t >= 0, y >= 0) and the searched y-range as a
    certificate that no class was missed.
    """
    _check_nonsquare(D)
    u, v = fundamental_unit(D)
    if N == 0:
        return [], {"unit": [u, v], "y_range": [0, 0], "reason": "D is not a square"}
    if N > 0:
        y_lo = 0
        y_hi = math.isqrt(v * v * N // (2 * (u + 1)))
    else:
        y_lo = math.isqrt(-N // D)
        y_hi = math.isqrt(v * v * (-N) // (2 * (u - 1)))
    reps = []
    for y in range(y_lo, y_hi + 1):
        t2 = N + D * y * y
        if t2 < 0:
            continue
        t = math.isqrt(t2)
        if t * t == t2:
            reps.append((t, y))
    return reps, {"unit": [u, v], "y_range": [y_lo, y_hi]}


def _walk(t: int, y: int, D: int, u: int, v: int, direction: int, t_max: int):
    prev = None
    for _ in range(10_000):
        yield t, y
        if abs(t) > t_max and prev is not None and abs(t) > prev:
            return
        prev = abs(t)
        if direction > 0:
            t, y = t * u + D * y * v, t * v + y * u
        else:
            t, y = t * u - D * y * v, -t * v + y * u


def pell_solutions(D: int, N: int, t_max: int) -> list[tuple[int, int]]:
    """Every solution of t^2 - D y^2 = N with 0 < t <= t_max, sorted by (t, y)."""
    reps, cert = pell_fundamental_solutions(D, N)
    u, v = cert["unit"]
    found = set()
    for t0, y0 in reps:
        for st, sy in itertools.product((1, -1), repeat=2):
            for direction in (1, -1):
                for t, y in _walk(st * t0, sy * y0, D, u, v, direction, t_max):
                    if 0 < t <= t_max:
                        found.add((t, y))
    return sorted(found)


def pell_orbit(D: int, N: int, count: int) -> list[tuple[int, int]]:
    """The `count` smallest solutions of t^2 - D y^2 = N with t > 0, ordered by (t, y).

    Both signs of y are included, so the result agrees with exhaustive
    enumeration on every window 0 < t <= T.
    """
    if count < 1:
        raise ValueError("count must be positive")
    reps, _ = pell_fundamental_solutions(D, N)
    if not reps:
        return []
    t_max = max(t for t, _ in reps) + 1
    while True:
        sols = pell_solutions(D, N, t_max)
        if len(sols) >= count:
            return sols[:count]
        t_max *= 4


def pell_class_orbit(D: int, N: int, seed: tuple[int, int], count: int) -> list[tuple[int, int]]:
    """seed * unit^k for k = 0 .. count-1 (the orbit of one solution class)."""
    t, y = seed
    if t * t - D * y * y != N:
        raise ValueError(f"{seed} does not solve t^2 - {D} y^2 = {N}")
    u, v = fundamental_unit(D)
    out = []
    for _ in range(count):
        out.append((t, y))
        t, y = t * u + D * y * v, t * v + y * u
    return out


# ---------------------------------------------------------------------------
# Hilbert symbols


def _legendre(a: int, p: int) -> int:
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def _split(a: int, p: int) -> tuple[int, int]:
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    return v, a


def hilbert_symbol(a: int, b: int, p) -> int:
    """Hilbert symbol (a, b)_p; p is a prime or ``"infinity"``."""
    a, b = int(a), int(b)
    if a == 0 or b == 0:
        raise ValueError("Hilbert symbol needs nonzero arguments")
    if p == INFINITY or p == math.inf:
        return -1 if a < 0 and b < 0 else 1
    if not isinstance(p, int) or not isprime(p):
        raise ValueError(f"{p!r} is neither a prime nor the infinite place")
    alpha, u = _split(a, p)
    beta, w = _split(b, p)
    if p == 2:
        eps_u = ((u - 1) // 2) % 2
        eps_w = ((w - 1) // 2) % 2
        om_u = ((u * u - 1) // 8) % 2
        om_w = ((w * w - 1) // 8) % 2
        e = (eps_u * eps_w + alpha * om_w + beta * om_u) % 2
        return -1 if e else 1
    e = (alpha * beta * ((p - 1) // 2)) % 2
    s = -1 if e else 1
    if beta % 2:
        s *= _legendre(u, p)
    if alpha % 2:
        s *= _legendre(w, p)
    return s


def relevant_places(*ints: int) -> list:
    """2, the primes dividing the arguments, and infinity."""
    primes = {2}
    for n in ints:
        primes.update(factorint(abs(n)).keys())
    return sorted(primes) + [INFINITY]


# ---------------------------------------------------------------------------
# ternary isotropy


@dataclass(frozen=True)
class IsotropyCertificate:
    verdict: str
    witness: tuple[int, int, int] | None
    local_data: tuple[tuple, ...]
    search_height: int
    diagonal: tuple[int, int, int]
    transformation: tuple[tuple[int, ...], ...] | None = None
    descent_trace: dict | None = None
    visited: int = 0

    @property
    def isotropic(self) -> bool:
        return self.verdict == "isotropic"

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "witness": list(self.witness) if self.witness else None,
            "local_data": [[str(p), s] for p, s in self.local_data],
            "failing_places": [str(p) for p, s in self.local_data if s == -1],
            "search_height": self.search_height,
            "search_visited": self.visited,
            "diagonal": list(self.diagonal),
            "transformation": [list(r) for r in self.transformation] if self.transformation else None,
            "descent_trace": self.descent_trace,
        }


def ternary_value(gram: Sequence[Sequence[int]], v: Sequence[int]) -> int:
    return sum(gram[i][j] * v[i] * v[j] for i in range(3) for j in range(3))


def brute_force_zeros(gram: Sequence[Sequence[int]], height: int, first_only: bool = True):
    """Nonzero integer v with max|v_i| <= height and v^T G v = 0.

    Loops over two coordinates and solves the quadratic in the third, so the
    sweep costs O(height^2).  Returns (zeros, number of pairs visited).
    """
    g = [[int(c) for c in row] for row in gram]
    k = next((i for i in (2, 1, 0) if g[i][i] != 0), None)
    zeros = []
    visited = 0
    if k is None:
        # no diagonal term: a basis vector is already isotropic
        return [(1, 0, 0)], 1
    i, j = [m for m in range(3) if m != k]
    for x in range(-height, height + 1):
        for y in range(-height, height + 1):
            visited += 1
            lin = g[k][i] * x + g[k][j] * y
            rest = g[i][i] * x * x + 2 * g[i][j] * x * y + g[j][j] * y * y
            disc = lin * lin - g[k][k] * rest
            if disc < 0:
                continue
            r = math.isqrt(disc)
            if r * r != disc:
                continue
            for num in {-lin + r, -lin - r}:
                if num % g[k][k]:
                    continue
                z = num // g[k][k]
                if abs(z) > height or (x == 0 and y == 0 and z == 0):
                    continue
                v = [0, 0, 0]
                v[i], v[j], v[k] = x, y, z
                zeros.append(tuple(v))
                if first_only:
                    return zeros, visited
    return zeros, visited


def _diag_local_data(d1: int, d2: int, d3: int):
    a, b = -d1 * d3, -d2 * d3
    return tuple((p, hilbert_symbol(a, b, p)) for p in relevant_places(d1, d2, d3))


def ternary_isotropic(d1: int, d2: int, d3: int, height: int | None = None) -> IsotropyCertificate:
    """Decide whether d1 x^2 + d2 y^2 + d3 z^2 has a nontrivial integer zero.

    The verdict comes from the Hilbert symbols (-d1 d3, -d2 d3)_p at every
    relevant place; a bounded witness search backs it up in both directions.
    """
    if 0 in (d1, d2, d3):
        raise ValueError("degenerate ternary form")
    gram = [[d1, 0, 0], [0, d2, 0], [0, 0, d3]]
    return _decide(gram, (d1, d2, d3), None, height)


def _decide(gram, diag, transformation, height) -> IsotropyCertificate:
    if height is None:
        height = default_search_height()
    local = _diag_local_data(*diag)
    isotropic = all(s == 1 for _, s in local)
    if isotropic:
        # Holzer-type height bound keeps this search finite
        limit = max(height, max(abs(diag[0] * diag[1]), abs(diag[0] * diag[2]), abs(diag[1] * diag[2])))
        h = 1
        witness = None
        visited = 0
        while witness is None:
            zeros, n = brute_force_zeros(gram, h)
            visited += n
            if zeros:
                witness = _canonical(zeros[0])
            elif h >= limit:
                raise RuntimeError(f"local data says isotropic but no zero up to height {limit}")
            else:
                h = min(2 * h, limit)
        return IsotropyCertificate("isotropic", witness, local, h, tuple(diag), transformation, None, visited)
    zeros, visited = brute_force_zeros(gram, height)
    if zeros:
        raise RuntimeError(f"Hilbert symbols say anisotropic but {zeros[0]} is a zero")
    return IsotropyCertificate("anisotropic", None, local, height, tuple(diag), transformation, None, visited)


def _canonical(v: Sequence[int]) -> tuple[int, ...]:
    g = math.gcd(*v)
    return la.sign_normalized(tuple(c // g for c in v))


def diagonalize(gram: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], tuple[tuple[int, ...], ...]]:
    """Integer T and diagonal D with T^T G T = diag(D), det T != 0.

    Rational Gram-Schmidt, then each column is rescaled to clear
    denominators (this multiplies the matching diagonal entry by a square).
    """
    n = len(gram)
    g = la.matrix(gram)
    cols: list[list[Fraction]] = []
    basis = [list(r) for r in la.identity(n)]

    def b(v, w):
        return la.dot(v, la.matvec(g, w))

    remaining = basis
    while remaining:
        pick = next((v for v in remaining if b(v, v) != 0), None)
        if pick is None:
            # every remaining vector is isotropic; a sum of two is not
            v, w = remaining[0], next((w for w in remaining[1:] if b(remaining[0], w) != 0), None)
            if w is None:
                raise ValueError("degenerate form")
            pick = [x + y for x, y in zip(v, w)]
            remaining = [pick] + [u for u in remaining if u is not v]
        vv = b(pick, pick)
        cols.append(pick)
        nxt = []
        for u in remaining:
            if u is pick:
                continue
            proj = [x - (b(u, pick) / vv) * y for x, y in zip(u, pick)]
            if any(proj):
                nxt.append(proj)
        # keep a spanning set of the orthogonal complement
        keep = []
        for u in nxt:
            if la.rank(keep + [u]) > len(keep):
                keep.append(u)
        remaining = keep
    int_cols = [la.primitive_integral(c) for c in cols]
    t = la.transpose(la.matrix(int_cols))
    d = la.matmul(la.matmul(la.transpose(t), g), t)
    diag = tuple(int(d[i][i]) for i in range(n))
    if any(d[i][j] for i in range(n) for j in range(n) if i != j) or 0 in diag:
        raise ValueError("degenerate form")
    return diag, tuple(tuple(int(c) for c in row) for row in t)


def mod_descent_trace(gram: Sequence[Sequence[int]], p: int, k: int) -> dict:
    """Residues v mod p^k with v^T G v = 0 mod p^k.

    If all of them are divisible by p, an integer zero could be divided by p
    indefinitely, so the form is anisotropic.  The trace records residue
    counts and, for the first coordinate's parity, the split the descent uses.
    """
    m = p**k
    g = [[int(c) for c in row] for row in gram]
    zero_residues = []
    by_first = {"first_coordinate_unit": 0, "first_coordinate_divisible": 0}
    for v in itertools.product(range(m), repeat=3):
        if ternary_value(g, v) % m == 0:
            zero_residues.append(v)
            by_first["first_coordinate_unit" if v[0] % p else "first_coordinate_divisible"] += 1
    nonprimitive_only = all(all(c % p == 0 for c in v) for v in zero_residues)
    return {
        "modulus": m,
        "residues_checked": m**3,
        "zero_residues": len(zero_residues),
        "zero_residues_by_first_coordinate": by_first,
        "all_zero_residues_divisible_by_p": nonprimitive_only,
        "conclusion": "infinite descent: no nontrivial zero" if nonprimitive_only else "inconclusive",
    }


def quad_isotropic_rank3(gram: Sequence[Sequence[int]], height: int | None = None,
                         descent: tuple[int, int] | None = None) -> IsotropyCertificate:
    """Isotropy of a ternary form given by a symmetric integer Gram matrix.

    The verdict is read off a rational diagonalization; witness search and
    the brute-force sweep run on the original form.  ``descent=(p, k)``
    additionally attaches a mod p^k descent trace.
    """
    g = [[int(c) for c in row] for row in gram]
    if len(g) != 3 or la.det(la.matrix(g)) == 0:
        raise ValueError("need a nondegenerate 3x3 Gram matrix")
    diag, t = diagonalize(g)
    cert = _decide(g, diag, t, height)
    if descent is not None:
        trace = mod_descent_trace(g, *descent)
        cert = IsotropyCertificate(cert.verdict, cert.witness, cert.local_data, cert.search_height,
                                   cert.diagonal, cert.transformation, trace, cert.visited)
    return cert


# ---------------------------------------------------------------------------
# binary representation questions


@dataclass(frozen=True)
class Representation:
    form: tuple[int, int, int]
    target: int
    witness: tuple[int, int] | None
    exact: bool
    bound: int | None
    reason: str = ""

    def to_dict(self) -> dict:
        return {
            "form": list(self.form),
            "target": self.target,
            "witness": list(self.witness) if self.witness else None,
            "exact": self.exact,
            "bound": self.bound,
            "reason": self.reason,
        }


def _height_order(bound: int):
    """Canonical (x, y) up to sign, by height, then larger x, then larger y."""
    for h in range(1, bound + 1):
        ring = set()
        for x in range(-h, h + 1):
            for y in (-h, h):
                ring.add((x, y))
                ring.add((y, x))
        ring = {la.sign_normalized(v) for v in ring}
        yield from sorted(ring, key=lambda v: (-v[0], -v[1]))


def represents(a: int, b: int, c: int, d: int, bound: int) -> Representation:
    """Find a primitive (x, y) with a x^2 + b xy + c y^2 = d.

    For d = 0 the answer is exact: a binary form has a nontrivial zero iff
    its discriminant is a perfect square.  Otherwise the search covers
    max(|x|, |y|) <= bound and an absent witness is only certified there.
    """
    if bound < 1:
        raise ValueError("bound must be >= 1")
    if d == 0:
        disc = b * b - 4 * a * c
        if disc < 0 or math.isqrt(disc) ** 2 != disc:
            return Representation((a, b, c), 0, None, True, None, f"discriminant {disc} is not a square")
        r = math.isqrt(disc)
        if a == 0:
            w = (1, 0)
        else:
            w = _canonical((-b + r, 2 * a))
        return Representation((a, b, c), 0, tuple(w), True, None, f"discriminant {disc} = {r}^2")
    for x, y in _height_order(bound):
        if math.gcd(x, y) == 1 and binary_value(a, b, c, x, y) == d:
            return Representation((a, b, c), d, (x, y), True, bound, "witness found")
    return Representation((a, b, c), d, None, False, bound, f"no primitive solution with height <= {bound}")


@dataclass(frozen=True)
class OrthogonalClasses:
    h: tuple[int, int]
    generator: tuple[int, int]
    generator_square: int
    square: int
    parameters: tuple[int, ...]
    classes: tuple[tuple[int, int], ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "h": list(self.h),
            "generator": list(self.generator),
            "generator_square": self.generator_square,
            "square": self.square,
            "square_polynomial": f"{self.generator_square}*t^2",
            "parameters": list(self.parameters),
            "classes": [list(c) for c in self.classes],
        }


def orthogonal_square_classes(gram: Sequence[Sequence[int]], h: Sequence[int], square: int) -> OrthogonalClasses:
    """All integral v with v.h = 0 and v.v = square, for a rank-2 form.

    The orthogonal complement of h is the line t*v0 with v0 primitive, and
    v.v = (v0.v0) t^2, so the answer is exact with no search.
    """
    h = tuple(int(c) for c in h)
    if not any(h):
        raise ValueError("h must be nonzero")
    g = [[int(c) for c in row] for row in gram]
    n0 = g[0][0] * h[0] + g[0][1] * h[1]
    n1 = g[1][0] * h[0] + g[1][1] * h[1]
    v0 = la.sign_normalized(_canonical((n1, -n0)))
    q0 = binary_value(g[0][0], 2 * g[0][1], g[1][1], *v0)
    params: list[int] = []
    if q0 == 0:
        if square == 0:
            raise ValueError("h-orthogonal line is isotropic: infinitely many solutions")
    elif square % q0 == 0 and square // q0 >= 0:
        t2 = square // q0
        t = math.isqrt(t2)
        if t * t == t2:
            params = sorted({t, -t})
    classes = tuple((t * v0[0], t * v0[1]) for t in params)
    return OrthogonalClasses(h, v0, q0, square, tuple(params), classes)
