"""Exact univariate polynomials with rational coefficients.

A polynomial is a tuple of Fractions, highest degree first, with no leading
zeros (the zero polynomial is the empty tuple).
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

from k3cone._linalg import Matrix, identity, matmul

Poly = tuple[Fraction, ...]


def normalize(p: Sequence) -> Poly:
    p = [Fraction(c) for c in p]
    i = 0
    while i < len(p) and p[i] == 0:
        i += 1
    return tuple(p[i:])


def degree(p: Poly) -> int:
    return len(p) - 1


def evaluate(p: Poly, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in p:
        acc = acc * x + c
    return acc


def derivative(p: Poly) -> Poly:
    n = degree(p)
    return normalize([c * (n - i) for i, c in enumerate(p[:-1])])


def divmod_poly(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b) and a:
        f = a[0] / b[0]
        k = len(a) - len(b)
        q[len(q) - 1 - k] = f
        for i, c in enumerate(b):
            a[i] -= f * c
        a = list(normalize(a))
    return normalize(q), normalize(a)


def monic(p: Poly) -> Poly:
    return tuple(c / p[0] for c in p) if p else p


def gcd(a: Poly, b: Poly) -> Poly:
    while b:
        a, b = b, divmod_poly(a, b)[1]
    return monic(a)


def squarefree(p: Poly) -> Poly:
    g = gcd(p, derivative(p))
    return monic(divmod_poly(p, g)[0])


def integer_coefficients(p: Poly) -> tuple[int, ...]:
    """Smallest positive rescaling with integer coefficients."""
    den = math.lcm(*(c.denominator for c in p))
    ints = [int(c * den) for c in p]
    g = math.gcd(*ints)
    return tuple(c // g for c in ints)


def charpoly(m: Matrix) -> Poly:
    """det(x I - m) via Faddeev-LeVerrier; exact over the rationals."""
    n = len(m)
    coeffs = [Fraction(1)]
    aux = identity(n)
    am = m
    for k in range(1, n + 1):
        am = matmul(m, aux)
        c = -sum(am[i][i] for i in range(n)) / k
        coeffs.append(c)
        aux = tuple(
            tuple(am[i][j] + (c if i == j else 0) for j in range(n)) for i in range(n)
        )
    return tuple(coeffs)


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small = [d for d in range(1, math.isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def rational_roots(p: Poly) -> list[Fraction]:
    """Distinct rational roots, ascending (rational root theorem)."""
    ints = integer_coefficients(p)
    roots = set()
    # strip factors of x
    while ints and ints[-1] == 0:
        roots.add(Fraction(0))
        ints = ints[:-1]
    if len(ints) <= 1:
        return sorted(roots)
    for num in _divisors(ints[-1]):
        for den in _divisors(ints[0]):
            for r in (Fraction(num, den), Fraction(-num, den)):
                if evaluate(ints, r) == 0:
                    roots.add(r)
    return sorted(roots)


def multiplicity(p: Poly, r: Fraction) -> int:
    lin = (Fraction(1), -r)
    k = 0
    while p:
        q, rem = divmod_poly(p, lin)
        if rem:
            break
        p, k = q, k + 1
    return k


def sturm_sequence(p: Poly) -> list[Poly]:
    seq = [p, derivative(p)]
    while seq[-1] and degree(seq[-1]) > 0:
        rem = divmod_poly(seq[-2], seq[-1])[1]
        if not rem:
            break
        seq.append(tuple(-c for c in rem))
    return seq


def _sign_changes(seq: list[Poly], x: Fraction) -> int:
    signs = [s for s in (evaluate(q, x) for q in seq) if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if (a > 0) != (b > 0))


def count_roots(seq: list[Poly], lo: Fraction, hi: Fraction) -> int:
    """Distinct real roots in the half-open interval (lo, hi]."""
    return _sign_changes(seq, lo) - _sign_changes(seq, hi)


def root_bound(p: Poly) -> Fraction:
    """Cauchy bound: every complex root has modulus strictly below this."""
    lead = abs(p[0])
    return 1 + max((abs(c) / lead for c in p[1:]), default=Fraction(0))


def isolate_real_roots(p: Poly) -> list[tuple[Fraction, Fraction]]:
    """Disjoint intervals (lo, hi] each holding exactly one real root of p.

    Intervals are ascending.  A root hit exactly by a bisection point is
    returned as the degenerate interval (r, r).
    """
    sf = squarefree(p)
    if degree(sf) < 1:
        return []
    seq = sturm_sequence(sf)
    b = root_bound(sf)
    out: list[tuple[Fraction, Fraction]] = []
    stack = [(-b, b)]
    while stack:
        lo, hi = stack.pop()
        n = count_roots(seq, lo, hi)
        if n == 0:
            continue
        if n == 1:
            out.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        stack.append((lo, mid))
        stack.append((mid, hi))
    return sorted((hi, hi) if evaluate(sf, hi) == 0 else (lo, hi) for lo, hi in out)


def refine_root(p: Poly, lo: Fraction, hi: Fraction, eps: Fraction) -> tuple[Fraction, Fraction]:
    """Shrink an isolating interval (lo, hi] of a simple root below width eps."""
    sf = squarefree(p)
    if lo == hi:
        return lo, hi
    if evaluate(sf, hi) == 0:
        return hi, hi
    seq = sturm_sequence(sf)
    while hi - lo > eps:
        mid = (lo + hi) / 2
        if evaluate(sf, mid) == 0:
            return mid, mid
        if count_roots(seq, lo, mid):
            hi = mid
        else:
            lo = mid
    return lo, hi


def to_str(p: Poly, var: str = "x") -> str:
    n = degree(p)
    parts = []
    for i, c in enumerate(p):
        if c == 0:
            continue
        k = n - i
        mag = abs(c)
        if k == 0:
            body = str(mag)
        else:
            body = ("" if mag == 1 else f"{mag}*") + (var if k == 1 else f"{var}^{k}")
        sign = "-" if c < 0 else "+"
        parts.append((sign, body))
    if not parts:
        return "0"
    first_sign, first = parts[0]
    s = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        s += f" {sign} {body}"
    return s


def is_square_int(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n
