"""The claim registry: each claim computes a certificate from a scenario, and a
separate checker re-validates that certificate from its payload alone."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterable

from k3cone import _linalg as la
from k3cone import _poly
from k3cone.conegeom import (
    DEFAULT_PREDICATES,
    HTPredicate,
    SearchBox,
    cone_from_rays,
    contains,
    dual_cone_q,
    facet_pairings,
    ht_candidates,
    matching_predicates,
    mori_lemma_replay,
    same_rays,
)
from k3cone.diophant import (
    default_search_height,
    hilbert_symbol,
    mod_descent_trace,
    orthogonal_square_classes,
    pell_fundamental_solutions,
    pell_solutions,
    quad_isotropic_rank3,
    represents,
)
from k3cone.dynamics import (
    K,
    L,
    boundary_pairing_check,
    cone_inclusion_check,
    intersection_emptiness_numerics,
    invariant_divisor_report,
    j_cones,
    orbit,
    periodicity_certificate,
)
from k3cone.hilbscheme import (
    HilbLattice,
    beauville_op,
    build_hilb,
    curve,
    default_profile,
    f_push,
    f_star,
    pushforward_on_curves,
)
from k3cone.quadlat import char_poly, pair, spectral_radius_enclosure
from k3cone.report import ASSUMED, FAIL, PASS, ClaimReport

SPECTRAL_EPS = Fraction(1, 100)


class UnknownClaimError(KeyError):
    pass


# ---------------------------------------------------------------------------
# small exact helpers shared by the checkers


def _mat(rows) -> la.Matrix:
    return la.matrix(rows)


def _vec(v) -> la.Vector:
    return la.vector(v)


def _q(g, v, w) -> Fraction:
    return la.dot(v, la.matvec(g, w))


def _strs(v) -> list[str]:
    return [la.fmt(Fraction(c)) for c in v]


def _mstrs(m) -> list[list[str]]:
    return [_strs(r) for r in m]


def _is_int_square(q: Fraction) -> bool:
    return q >= 0 and q.denominator == 1 and _poly.is_square_int(q.numerator)


def _is_rational_square(q: Fraction) -> bool:
    return q >= 0 and _poly.is_square_int(q.numerator) and _poly.is_square_int(q.denominator)


class Context:
    """Lazily computed objects shared by the claims of one scenario."""

    def __init__(self, scn):
        self.scn = scn

    @cached_property
    def hl(self) -> HilbLattice:
        return self.scn.hilb()

    @property
    def lat(self):
        return self.hl.lattice

    @property
    def gram(self):
        return self.lat.gram_matrix()

    @cached_property
    def M1(self):
        return beauville_op(self.hl, 1)

    @cached_property
    def M2(self):
        return beauville_op(self.hl, 2)

    @cached_property
    def mori(self):
        if not self.scn.mori_generators:
            raise ValueError("scenario has no mori_generators")
        return cone_from_rays(self.lat, self.scn.vectors(self.hl, "mori_generators"))

    @cached_property
    def ample(self):
        if not self.scn.ample_generators:
            raise ValueError("scenario has no ample_generators")
        return self.scn.vectors(self.hl, "ample_generators")

    @cached_property
    def jc(self):
        return j_cones(self.hl, self.mori if self.scn.mori_generators else None)

    def lattice_payload(self) -> dict:
        return {
            "surface_gram": [list(r) for r in self.scn.surface_gram],
            "hilb_n": self.scn.hilb_n,
            "polarizations": [list(p) for p in self.scn.polarizations],
            "basis": list(self.lat.basis),
            "gram": [list(r) for r in self.lat.gram],
        }

    def predicates(self):
        return self.scn.ht_predicates or DEFAULT_PREDICATES


def _rebuild(cert: dict) -> HilbLattice:
    p = cert["lattice"]
    return build_hilb(p["surface_gram"], p["hilb_n"], p["polarizations"])


def _surface(ctx: Context):
    g = ctx.scn.surface_gram
    return g[0][0], g[0][1], g[1][1]


# ---------------------------------------------------------------------------
# C01  (-2)-classes on the surface and the automorphism-finiteness criterion


def run_c01(ctx):
    a, b, d = _surface(ctx)
    rep = represents(a, 2 * b, d, -2, 50)
    zero = represents(a, 2 * b, d, 0, 1)
    ok = rep.witness is not None and zero.exact and zero.witness is None
    return ok, {
        "surface_gram": [[a, b], [b, d]],
        "minus_two": rep.to_dict(),
        "zero": zero.to_dict(),
        "discriminant": 4 * b * b - 4 * a * d,
    }


def check_c01(cert):
    (a, b), (_, d) = cert["surface_gram"]
    x, y = cert["minus_two"]["witness"]
    disc = 4 * b * b - 4 * a * d
    return a * x * x + 2 * b * x * y + d * y * y == -2 and disc == cert["discriminant"] and not _poly.is_square_int(disc)


# ---------------------------------------------------------------------------
# C02  anisotropy of q on NS(X)


def _ternary_form(ctx) -> tuple[list[list[int]], int]:
    a, b, d = _surface(ctx)
    e = int(pair(ctx.lat, ctx.hl.E, ctx.hl.E))
    g = [[a, b, 0], [b, d, 0], [0, 0, e]]
    content = math.gcd(*(c for row in g for c in row))
    return [[c // content for c in row] for row in g], content


def run_c02(ctx):
    form, content = _ternary_form(ctx)
    cert = quad_isotropic_rank3(form, default_search_height(), descent=(2, 3)).to_dict()
    cert["form"] = form
    cert["content_divided_out"] = content
    cert["variables"] = ["H1", "H2", "E"]
    ok = cert["verdict"] == "anisotropic" and cert["witness"] is None
    return ok, cert


def check_c02(cert):
    g = _mat(cert["form"])
    t = _mat(cert["transformation"])
    diag = cert["diagonal"]
    tgt = la.matmul(la.matmul(la.transpose(t), g), t)
    if tgt != tuple(tuple(Fraction(diag[i] if i == j else 0) for j in range(3)) for i in range(3)):
        return False
    d1, d2, d3 = diag
    failing = cert["failing_places"]
    if not failing:
        return False
    for p in failing:
        place = p if p == "infinity" else int(p)
        if hilbert_symbol(-d1 * d3, -d2 * d3, place) != -1:
            return False
    trace = mod_descent_trace(cert["form"], 2, 3)
    return trace == cert["descent_trace"] and trace["all_zero_residues_divisible_by_p"]


# ---------------------------------------------------------------------------
# C03  the Beauville involutions


def run_c03(ctx):
    rows = []
    ok = True
    for k, op in ((1, ctx.M1), (2, ctx.M2)):
        h = ctx.hl.H(k) - ctx.hl.E
        expected = ctx.scn.expected_matrix(f"M{k}")
        match = expected is None or expected == op.matrix
        invol = (op @ op).is_identity()
        ok = ok and match and invol
        rows.append({
            "k": k,
            "h": h.as_strings(),
            "h_square": la.fmt(h.square()),
            "matrix": op.as_strings(),
            "expected": None if expected is None else _mstrs(expected),
            "matches_expected": match,
            "involution": invol,
        })
    return ok, {"gram": [list(r) for r in ctx.lat.gram], "basis": list(ctx.lat.basis), "operators": rows}


def check_c03(cert):
    g = _mat(cert["gram"])
    n = len(g)
    for row in cert["operators"]:
        h = _vec(row["h"])
        if _q(g, h, h) != 2:
            return False
        gh = la.matvec(g, h)
        formula = tuple(tuple(-Fraction(int(i == j)) + h[i] * gh[j] for j in range(n)) for i in range(n))
        m = _mat(row["matrix"])
        if m != formula:
            return False
        if la.matmul(la.matmul(la.transpose(m), g), m) != g or la.matmul(m, m) != la.identity(n):
            return False
        if row["expected"] is not None and _mat(row["expected"]) != m:
            return False
    return True


# ---------------------------------------------------------------------------
# C04  f^* and its characteristic polynomial


def run_c04(ctx):
    f = f_star(ctx.hl)
    expected = ctx.scn.expected_matrix("f_star")
    cp = char_poly(f)
    p = _poly.normalize(cp)
    roots = _poly.rational_roots(p)
    rest = p
    for r in roots:
        while _poly.degree(rest) > 0 and _poly.evaluate(rest, r) == 0:
            rest = _poly.divmod_poly(rest, (Fraction(1), -r))[0]
    match = expected is None or expected == f.matrix
    ok = match and f.determinant() in (1, -1)
    return ok, {
        "gram": [list(r) for r in ctx.lat.gram],
        "M1": ctx.M1.as_strings(),
        "M2": ctx.M2.as_strings(),
        "f_star": f.as_strings(),
        "expected": None if expected is None else _mstrs(expected),
        "matches_expected": match,
        "char_poly": list(cp),
        "char_poly_text": _poly.to_str(p, "x"),
        "rational_roots": [la.fmt(r) for r in roots],
        "remaining_factor": list(_poly.integer_coefficients(rest)) if _poly.degree(rest) > 0 else [1],
        "trace": la.fmt(f.trace()),
        "determinant": la.fmt(f.determinant()),
    }


def check_c04(cert):
    g = _mat(cert["gram"])
    m = la.matmul(_mat(cert["M1"]), _mat(cert["M2"]))
    if m != _mat(cert["f_star"]) or la.matmul(la.matmul(la.transpose(m), g), m) != g:
        return False
    if cert["expected"] is not None and _mat(cert["expected"]) != m:
        return False
    cp = _poly.integer_coefficients(_poly.charpoly(m))
    n = len(m)
    return (
        list(cp) == cert["char_poly"]
        and Fraction(cert["trace"]) == sum(m[i][i] for i in range(n))
        and Fraction(cert["determinant"]) == la.det(m)
    )


# ---------------------------------------------------------------------------
# C05  the fixed line of f^*


def run_c05(ctx):
    f = f_star(ctx.hl)
    n = ctx.lat.rank
    shifted = [[f.matrix[i][j] - int(i == j) for j in range(n)] for i in range(n)]
    ker = la.nullspace(shifted, n)
    if len(ker) != 1:
        return False, {"f_star": f.as_strings(), "fixed_dimension": len(ker)}
    w = ctx.lat.vec(la.sign_normalized(la.primitive_integral(ker[0])))
    img = f(w)
    i1 = ctx.M1(w)
    return img == w and i1 == -w, {
        "gram": [list(r) for r in ctx.lat.gram],
        "f_star": f.as_strings(),
        "M1": ctx.M1.as_strings(),
        "fixed_dimension": 1,
        "fixed_line": w.as_strings(),
        "fixed_label": str(w),
        "image": img.as_strings(),
        "iota1_image": i1.as_strings(),
        "square": la.fmt(w.square()),
    }


def check_c05(cert):
    g = _mat(cert["gram"])
    m = _mat(cert["f_star"])
    w = _vec(cert["fixed_line"])
    n = len(m)
    shifted = [[m[i][j] - int(i == j) for j in range(n)] for i in range(n)]
    return (
        la.matvec(m, w) == w
        and la.rank(shifted) == n - 1
        and la.matvec(_mat(cert["M1"]), w) == tuple(-c for c in w)
        and _q(g, w, w) == Fraction(cert["square"])
    )


# ---------------------------------------------------------------------------
# C06  no (-2)-class orthogonal to a polarization


def run_c06(ctx):
    g = ctx.scn.surface_gram
    rows = [orthogonal_square_classes(g, h, -2).to_dict() for h in ((1, 0), (0, 1))]
    return all(not r["classes"] for r in rows), {"surface_gram": [list(r) for r in g], "cases": rows}


def check_c06(cert):
    g = _mat(cert["surface_gram"])
    for row in cert["cases"]:
        v0, h = _vec(row["generator"]), _vec(row["h"])
        if _q(g, v0, h) != 0 or math.gcd(*(int(c) for c in v0)) != 1:
            return False
        q0 = _q(g, v0, v0)
        if q0 != row["generator_square"] or row["classes"]:
            return False
        if q0 != 0 and _is_int_square(Fraction(row["square"]) / q0):
            return False
    return True


# ---------------------------------------------------------------------------
# C07  (-2)-classes positive on h1 are positive on h2 (Pell equation)


def _pell_setup(a: int, b: int, d: int) -> dict:
    """T = v.h1 = a x + b y satisfies T^2 - D' y^2 = -2a with D' = b^2 - a d; divide out g = gcd(a, b)."""
    Dp, Np = b * b - a * d, -2 * a
    g = math.gcd(a, b)
    if Dp % (g * g) or Np % (g * g):
        g = 1
    return {"D_prime": Dp, "N_prime": Np, "g": g, "D": Dp // (g * g), "N": Np // (g * g)}


def run_c07(ctx):
    a, b, d = _surface(ctx)
    s = _pell_setup(a, b, d)
    D, N, g, Dp = s["D"], s["N"], s["g"], s["D_prime"]
    reps, pc = pell_fundamental_solutions(D, N)
    t_max = ctx.scn.pell_t_max
    sols = pell_solutions(D, N, t_max)
    # v.h2 = (b T - D' y)/a with T = g t
    c0 = math.gcd(b * g, Dp)
    coeff = Fraction(c0, a)
    alpha, beta = b * g // c0, Dp // c0
    violations = [[t, y] for t, y in sols if alpha * t - beta * y <= 0]
    integral = sum(1 for t, y in sols if (g * t - b * y) % a == 0)
    # (b T)^2 - (D' y)^2 = D' a d y^2 - 2 a b^2 and y != 0
    lead, const = Dp * a * d, 2 * a * b * b
    algebraic = a > 0 and b > 0 and Dp > 0 and lead - const > 0
    ok = not violations and algebraic and bool(sols)
    return ok, {
        "surface_gram": [[a, b], [b, d]],
        "reduction": s,
        "equation": f"t^2 - {D}*y^2 = {N}",
        "h1_pairing": f"{g}*t",
        "h2_pairing": f"({la.fmt(coeff)})*({alpha}*t - {beta}*y)",
        "inequality": [alpha, beta],
        "fundamental_solutions": [list(r) for r in reps],
        "unit": pc["unit"],
        "nagell_y_range": pc["y_range"],
        "t_max": t_max,
        "solution_count": len(sols),
        "integral_class_count": integral,
        "first_solutions": [list(x) for x in sols[:8]],
        "violations": violations,
        "algebraic_bound": {"y2_coefficient": lead, "constant": -const, "holds_for_all_y_nonzero": algebraic},
    }


def pell_brute_force(D: int, N: int, t_max: int) -> list[tuple[int, int]]:
    """All (t, y) with 0 < t <= t_max and t^2 - D y^2 = N, by direct search on y."""
    out = []
    y_max = math.isqrt(max(0, (t_max * t_max - N) // D)) + 1
    for y in range(y_max + 1):
        t2 = N + D * y * y
        if t2 <= 0:
            continue
        t = math.isqrt(t2)
        if t * t == t2 and t <= t_max:
            out.append((t, y))
            if y:
                out.append((t, -y))
    return sorted(out)


def check_c07(cert):
    (a, b), (_, d) = cert["surface_gram"]
    s = _pell_setup(a, b, d)
    if s != cert["reduction"]:
        return False
    D, N = s["D"], s["N"]
    sols = pell_brute_force(D, N, cert["t_max"])
    alpha, beta = cert["inequality"]
    if len(sols) != cert["solution_count"] or any(alpha * t - beta * y <= 0 for t, y in sols):
        return False
    u, v = cert["unit"]
    if u * u - D * v * v != 1:
        return False
    Dp = s["D_prime"]
    return Dp * a * d - 2 * a * b * b > 0 and a > 0 and b > 0


# ---------------------------------------------------------------------------
# C08  numerical inputs to very-ampleness


def run_c08(ctx):
    a, b, d = _surface(ctx)
    g = ctx.scn.surface_gram
    rows = []
    ok = True
    for h in ((1, 0), (0, 1)):
        gh = [g[0][0] * h[0] + g[0][1] * h[1], g[1][0] * h[0] + g[1][1] * h[1]]
        content = math.gcd(*gh)
        orth = orthogonal_square_classes(g, h, -2)
        primitive = math.gcd(*h) == 1
        good = content != 1 and not orth.classes and primitive
        ok = ok and good
        rows.append({
            "h": list(h),
            "pairing_functional": gh,
            "pairing_content": content,
            "pairing_one_impossible": content != 1,
            "pairing_zero_impossible": not orth.classes,
            "half_class_integral": all(c % 2 == 0 for c in h),
        })
    disc = 4 * b * b - 4 * a * d
    ok = ok and not _poly.is_square_int(disc)
    return ok, {"surface_gram": [[a, b], [b, d]], "rows": rows, "discriminant": disc,
                "represents_zero": _poly.is_square_int(disc)}


def check_c08(cert):
    g = _mat(cert["surface_gram"])
    disc = 4 * g[0][1] ** 2 - 4 * g[0][0] * g[1][1]
    if disc != cert["discriminant"] or _poly.is_square_int(int(disc)):
        return False
    for row in cert["rows"]:
        h = _vec(row["h"])
        gh = [int(c) for c in la.matvec(g, h)]
        if gh != row["pairing_functional"] or math.gcd(*gh) == 1:
            return False
        if all(int(c) % 2 == 0 for c in h):
            return False
        # the h-orthogonal line t*v0 carries square q0 t^2; -2 must not be of that form
        v0 = la.primitive_integral((gh[1], -gh[0]))
        q0 = _q(g, _vec(v0), _vec(v0))
        if q0 != 0 and _is_int_square(Fraction(-2) / q0):
            return False
    return True


# ---------------------------------------------------------------------------
# C09  the (-2)-classes 2h1 - h2 and 2h2 - h1 are irreducible


def _irreducibility_rows(g):
    a, b, d = g[0][0], g[0][1], g[1][1]
    rows = []
    for i in (0, 1):
        hi = (1, 0) if i == 0 else (0, 1)
        c = (2, -1) if i == 0 else (-1, 2)
        csq = g[0][0] * c[0] ** 2 + 2 * g[0][1] * c[0] * c[1] + g[1][1] * c[1] ** 2
        gh = [g[0][0] * hi[0] + g[0][1] * hi[1], g[1][0] * hi[0] + g[1][1] * hi[1]]
        deg = gh[0] * c[0] + gh[1] * c[1]
        step = math.gcd(*gh)
        aa = gh[i]  # h_i^2
        Dp = b * b - a * d
        cands = []
        for k in range(step, deg, step):
            # h_i^2 v^2 = k^2 - D' w^2 for w the other coordinate
            num = k * k + 2 * aa
            sols = []
            if num % Dp == 0 and _poly.is_square_int(num // Dp):
                w = math.isqrt(num // Dp)
                for ws in sorted({w, -w}):
                    if (k - b * ws) % aa == 0:
                        sols.append(ws)
            red = _pell_setup(aa, b, a if i else d)
            t = Fraction(k, red["g"])
            cands.append({
                "pairing": k,
                "equation": f"{Dp}*w^2 = {num}",
                "reduced_equation": f"{red['D']}*w^2 = {la.fmt(t * t - red['N'])}",
                "solutions": sols,
            })
        rows.append({"class": list(c), "square": csq, "h": list(hi), "degree": deg,
                     "pairing_step": step, "candidates": cands})
    return rows


def run_c09(ctx):
    g = ctx.scn.surface_gram
    rows = _irreducibility_rows(g)
    ok = all(r["square"] == -2 and r["degree"] > 0 and not any(c["solutions"] for c in r["candidates"])
             for r in rows)
    return ok, {"surface_gram": [list(r) for r in g], "rows": rows}


def check_c09(cert):
    rows = _irreducibility_rows(cert["surface_gram"])
    return rows == cert["rows"] and all(
        r["square"] == -2 and r["degree"] > 0 and not any(c["solutions"] for c in r["candidates"]) for r in rows
    )


# ---------------------------------------------------------------------------
# C10  every Mori generator satisfies an extremality predicate


def run_c10(ctx):
    hl = ctx.hl
    preds = ctx.predicates()
    box = ctx.scn.search_box or SearchBox(6, 12)
    rows = []
    for v in ctx.scn.vectors(hl, "mori_generators"):
        rep = v.primitive()
        m = matching_predicates(hl, rep, preds)
        rows.append({"generator": v.as_strings(), "representative": rep.as_strings(), "square": la.fmt(rep.square()),
                     "h1_pairing": la.fmt(pair(hl.lattice, rep, hl.H(1))), "predicates": [p.to_dict() for p in m]})
    cands = ht_candidates(hl, preds, box)
    cand_set = {c.coords for c in cands}
    in_box = all(tuple(_vec(r["representative"])) in cand_set for r in rows)
    ok = all(r["predicates"] for r in rows) and in_box
    return ok, {
        "lattice": ctx.lattice_payload(),
        "predicates": [p.to_dict() for p in preds],
        "search_box": box.to_dict(),
        "generators": rows,
        "candidate_count": len(cands),
        "candidates": [c.as_strings() for c in cands],
        "generators_among_candidates": in_box,
    }


def check_c10(cert):
    g = _mat(cert["lattice"]["gram"])
    basis = cert["lattice"]["basis"]
    ix, iy = basis.index("H1"), basis.index("H2")
    h1 = tuple(Fraction(int(i == ix)) for i in range(len(basis)))
    preds = [HTPredicate.from_dict(p) for p in cert["predicates"]]
    cands = {tuple(_vec(c)) for c in cert["candidates"]}
    for row in cert["generators"]:
        rep = _vec(row["representative"])
        if la.primitive_integral(_vec(row["generator"])) != tuple(int(c) for c in rep):
            return False
        sq = _q(g, rep, rep)
        if _q(g, rep, h1) < 0:
            return False
        if not any(p.square == sq and p.divisibility_ok(int(rep[ix]), int(rep[iy])) for p in preds):
            return False
        if rep not in cands:
            return False
    hl = _rebuild(cert)
    again = ht_candidates(hl, preds, SearchBox.from_dict(cert["search_box"]))
    return [c.as_strings() for c in again] == cert["candidates"]


# ---------------------------------------------------------------------------
# C11  replay of the extremal-ray enumeration


def run_c11(ctx):
    rep = mori_lemma_replay(ctx.hl, ctx.scn.vectors(ctx.hl, "mori_generators"), ctx.predicates())
    cert = dict(rep.certificate)
    cert["lattice"] = ctx.lattice_payload()
    return rep.passed, cert


def _case_summary(cases):
    return [(c["facet"], c["square"], c["status"], c["visited"], c["hits"], c["rejected_by_divisibility"])
            for c in cases]


def check_c11(cert):
    hl = _rebuild(cert)
    preds = [HTPredicate.from_dict(p) for p in cert["predicates"]]
    gens = [hl.lattice.vec(v) for v in cert["mori_generators"]]
    again = mori_lemma_replay(hl, gens, preds, cert["squares"], cert["e_denominator"]).to_dict()["certificate"]
    if _case_summary(again["cases"]) != _case_summary(cert["cases"]):
        return False
    g = hl.lattice.gram_matrix()
    for case in cert["cases"]:
        if case["status"] != "empty":
            return False
        for x, y, z in case["rejected_by_divisibility"]:
            r = hl.lattice.vec({"H1": x, "H2": y, "E": z}[lab] for lab in hl.lattice.basis)
            if _q(g, r.coords, r.coords) != case["square"]:
                return False
    return all(z["ok"] for z in cert["zero_pairing_lines"])


# ---------------------------------------------------------------------------
# C12  ample cone = q-dual of the Mori cone


def run_c12(ctx):
    mori = ctx.mori
    dual = dual_cone_q(ctx.lat, mori)
    dd = dual_cone_q(ctx.lat, dual)
    expected = [v.primitive() for v in ctx.ample]
    equal = same_rays(dual.rays, expected)
    back = same_rays(dd.rays, mori.rays)
    table = [[la.fmt(pair(ctx.lat, a, r)) for r in mori.rays] for a in expected]
    zeros = [sum(1 for x in row if x == "0") for row in table]
    ok = equal and back and all(z == ctx.lat.rank - 1 for z in zeros)
    return ok, {
        "gram": [list(r) for r in ctx.lat.gram],
        "mori_rays": [r.as_strings() for r in mori.rays],
        "dual_rays": [r.as_strings() for r in dual.rays],
        "expected_ample": [v.as_strings() for v in expected],
        "dual_equals_expected": equal,
        "dual_of_dual_equals_mori": back,
        "pairing_table": table,
        "zeros_per_ample_class": zeros,
    }


def check_c12(cert):
    """Rank-3 check: every ample class supports a facet through two independent Mori rays,
    the facets are distinct, and every Mori ray sits on exactly two of them."""
    g = _mat(cert["gram"])
    mori = [_vec(r) for r in cert["mori_rays"]]
    amp = [_vec(a) for a in cert["expected_ample"]]
    if len(g) != 3 or len(amp) != len(mori):
        return False
    tight_sets = []
    for a in amp:
        vals = [_q(g, a, r) for r in mori]
        if any(v < 0 for v in vals):
            return False
        tight = frozenset(i for i, v in enumerate(vals) if v == 0)
        if la.rank([list(mori[i]) for i in tight]) != 2:
            return False
        tight_sets.append(tight)
    if len(set(tight_sets)) != len(amp):
        return False
    for i in range(len(mori)):
        if sum(1 for t in tight_sets if i in t) != 2:
            return False
    table = [[la.fmt(_q(g, a, r)) for r in mori] for a in amp]
    return table == cert["pairing_table"]


# ---------------------------------------------------------------------------
# C13  pushforward identities in both index directions


def _pushforward_rows(hl, op_for):
    rows = []
    for i in (1, 2):
        j = 2 if i == 1 else 1
        op = op_for(i)
        Hi, Hj, E = hl.H(i), hl.H(j), hl.E
        Lj, Kj = L(hl, j), K(hl, j)
        cases = [
            ("L", L(hl, i), [Kj]),
            ("K", K(hl, i), [9 * Hi - 2 * Hj - Fraction(15, 2) * E, 5 * Lj + 2 * Kj + E]),
            ("E", E, [4 * Hi - 5 * E, 4 * Lj + E]),
        ]
        for name, src, targets in cases:
            c = curve(hl, src.coords)
            img = pushforward_on_curves(op, c)
            rows.append({
                "i": i,
                "source": f"{name}{i}",
                "class": src.as_strings(),
                "image": img.vec.as_strings(),
                "expected": [t.as_strings() for t in targets],
                "holds": all(img.vec == t for t in targets),
                "square_before": la.fmt(c.square()),
                "square_after": la.fmt(img.square()),
            })
    return rows


def run_c13(ctx):
    rows = _pushforward_rows(ctx.hl, lambda i: ctx.M1 if i == 1 else ctx.M2)
    ok = all(r["holds"] and r["square_before"] == r["square_after"] for r in rows)
    return ok, {"gram": [list(r) for r in ctx.lat.gram], "M1": ctx.M1.as_strings(), "M2": ctx.M2.as_strings(),
                "profile": list(default_profile(ctx.hl)), "rows": rows}


def check_c13(cert):
    g = _mat(cert["gram"])
    ops = {1: _mat(cert["M1"]), 2: _mat(cert["M2"])}
    prof = cert["profile"]
    for row in cert["rows"]:
        v = _vec(row["class"])
        img = la.matvec(ops[row["i"]], v)
        if any(_vec(t) != img for t in row["expected"]) or _strs(img) != row["image"]:
            return False
        if any(d % c.denominator for c, d in zip(img, prof)):
            return False
        if _q(g, v, v) != _q(g, img, img):
            return False
    return True


# ---------------------------------------------------------------------------
# C14  the subcones J1, J2 and the orbit of L1


def _cone_payload(cone):
    return {"rays": [r.as_strings() for r in cone.rays], "facets": [f.as_strings() for f in cone.facets]}


def run_c14(ctx):
    jc = ctx.jc
    inc1 = cone_inclusion_check(ctx.M1, jc.J1, jc.J2)
    inc2 = cone_inclusion_check(ctx.M2, jc.J2, jc.J1)
    steps = ctx.scn.orbit_steps
    rec = orbit(ctx.hl, L(ctx.hl, 1), steps)
    in_j1 = all(s.in_J1 for s in rec.steps)
    ok = inc1.passed and inc2.passed and in_j1
    return ok, {
        "lattice": ctx.lattice_payload(),
        "J1": _cone_payload(jc.J1),
        "J2": _cone_payload(jc.J2),
        "M1": ctx.M1.as_strings(),
        "M2": ctx.M2.as_strings(),
        "f_push": f_push(ctx.hl).as_strings(),
        "iota1_J1_in_J2": inc1.certificate,
        "iota2_J2_in_J1": inc2.certificate,
        "orbit": rec.to_dict(),
        "orbit_in_J1": in_j1,
    }


def _cone_ok(hl, payload) -> bool:
    again = cone_from_rays(hl.lattice, [hl.lattice.vec(r) for r in payload["rays"]])
    return _cone_payload(again) == payload


def _inside(g, facets, v) -> bool:
    return all(_q(g, _vec(f), v) >= 0 for f in facets)


def check_c14(cert):
    hl = _rebuild(cert)
    g = hl.lattice.gram_matrix()
    if not (_cone_ok(hl, cert["J1"]) and _cone_ok(hl, cert["J2"])):
        return False
    for key, m, dst in (("iota1_J1_in_J2", "M1", "J2"), ("iota2_J2_in_J1", "M2", "J1")):
        op = _mat(cert[m])
        for r in cert[key]["images"]:
            img = la.matvec(op, _vec(r["ray"]))
            if _strs(img) != r["image"] or not _inside(g, cert[dst]["facets"], img):
                return False
    fp = _mat(cert["f_push"])
    if fp != la.inverse(la.matmul(_mat(cert["M1"]), _mat(cert["M2"]))):
        return False
    v = _vec(cert["orbit"]["seed"])
    for step in cert["orbit"]["steps"]:
        if _strs(v) != step["class"] or not _inside(g, cert["J1"]["facets"], v):
            return False
        v = la.matvec(fp, v)
    return True


# ---------------------------------------------------------------------------
# C15  boundary pairings of the supporting ample class


def run_c15(ctx):
    rep = boundary_pairing_check(ctx.hl, ctx.ample)
    cert = dict(rep.certificate)
    cert["gram"] = [list(r) for r in ctx.lat.gram]
    cert["E"] = ctx.hl.E.as_strings()
    return rep.passed, cert


def check_c15(cert):
    g = _mat(cert["gram"])
    e = _vec(cert["E"])
    for row in cert["rows"]:
        if row["supporting_class"] is None:
            return False
        a = _vec(row["supporting_class"])
        vals = {"L": _q(g, a, _vec(row["L"])), "K": _q(g, a, _vec(row["K"])), "E": _q(g, a, e)}
        if {k: la.fmt(v) for k, v in vals.items()} != row["pairings"]:
            return False
        if not (vals["L"] > 0 and vals["K"] == 0 and vals["E"] == 0):
            return False
    return True


# ---------------------------------------------------------------------------
# C16  L1 is not in J2 (and L2 is not in J1)


def run_c16(ctx):
    jc = ctx.jc
    rows = []
    ok = True
    for i, cone in ((1, jc.J2), (2, jc.J1)):
        v = L(ctx.hl, i)
        vals = facet_pairings(cone, v)
        inside = contains(cone, v)
        ok = ok and not inside
        wit = next((f for f, x in zip(cone.facets, vals) if x < 0), None)
        rows.append({
            "class": v.as_strings(),
            "label": f"L{i}",
            "cone": f"J{3 - i}",
            "cone_rays": [r.as_strings() for r in cone.rays],
            "facet_pairings": [la.fmt(x) for x in vals],
            "contained": inside,
            "separating_facet": None if wit is None else wit.as_strings(),
        })
    return ok, {"gram": [list(r) for r in ctx.lat.gram], "rows": rows}


def check_c16(cert):
    g = _mat(cert["gram"])
    for row in cert["rows"]:
        if row["separating_facet"] is None:
            return False
        f = _vec(row["separating_facet"])
        if any(_q(g, f, _vec(r)) < 0 for r in row["cone_rays"]):
            return False
        if _q(g, f, _vec(row["class"])) >= 0:
            return False
    return True


# ---------------------------------------------------------------------------
# C17  the orbit of L1 is not periodic


def run_c17(ctx):
    rep = periodicity_certificate(ctx.hl, L(ctx.hl, 1), ctx.scn.orbit_steps)
    return rep.passed, dict(rep.certificate)


def check_c17(cert):
    m = _mat(cert["operator"])
    cp = _poly.integer_coefficients(_poly.charpoly(m))
    if list(cp) != cert["char_poly"]:
        return False
    if cert["irrational_factor_discriminant"] is not None:
        a, b, c = cert["irrational_factor"]
        disc = b * b - 4 * a * c
        if disc != cert["irrational_factor_discriminant"] or _poly.is_square_int(disc):
            return False
        # the quadratic factor must really divide the characteristic polynomial
        if _poly.divmod_poly(_poly.normalize(cp), _poly.normalize((a, b, c)))[1]:
            return False
    roots = _poly.rational_roots(_poly.normalize(cp))
    if [la.fmt(r) for r in roots] != cert["rational_roots"]:
        return False
    seed = _vec(cert["seed"])
    n = len(m)
    for lam in roots:
        shifted = [[m[i][j] - (lam if i == j else 0) for j in range(n)] for i in range(n)]
        ker = la.nullspace(shifted, n)
        if la.rank([list(k) for k in ker] + [list(seed)]) == len(ker):
            return False
    v = seed
    for _ in range(cert["max_m"]):
        v = la.matvec(m, v)
        if la.rank([list(seed), list(v)]) == 1:
            return False
    return True


# ---------------------------------------------------------------------------
# C18  no effective divisor is f-invariant


def run_c18(ctx):
    rep = invariant_divisor_report(ctx.hl)
    cert = dict(rep.certificate)
    cert["gram"] = [list(r) for r in ctx.lat.gram]
    cert["M1"] = ctx.M1.as_strings()
    cert["E"] = ctx.hl.E.as_strings()
    return rep.passed, cert


def check_c18(cert):
    g = _mat(cert["gram"])
    m = _mat(cert["operator"])
    w = _vec(cert["fixed_line"])
    n = len(m)
    shifted = [[m[i][j] - int(i == j) for j in range(n)] for i in range(n)]
    if la.matvec(m, w) != w or la.rank(shifted) != n - 1:
        return False
    if la.matvec(_mat(cert["M1"]), w) != tuple(-c for c in w):
        return False
    e = _vec(cert["E"])
    sq = _q(g, w, w)
    if la.fmt(sq) != cert["square"] or la.rank([list(w), list(e)]) == 1:
        return False
    return not _is_rational_square(_q(g, e, e) / sq)


# ---------------------------------------------------------------------------
# C19  numerical skeleton of the disjointness of the two planes


def run_c19(ctx):
    rep = intersection_emptiness_numerics(ctx.hl)
    cert = dict(rep.certificate)
    cert["surface_gram"] = [list(r) for r in ctx.scn.surface_gram]
    cert["M1"] = ctx.M1.as_strings()
    return rep.passed, cert


def check_c19(cert):
    g = _mat(cert["surface_gram"])
    h1, h2 = _vec((1, 0)), _vec((0, 1))
    deg = _q(g, h1, tuple(2 * a - b for a, b in zip(h1, h2)))
    neg = _q(g, tuple(b - a for a, b in zip(h1, h2)), h2)
    img = la.matvec(_mat(cert["M1"]), _vec(cert["iota1_source"]))
    return (
        la.fmt(deg) == cert["degree_h1_on_2h1_minus_h2"] == "4"
        and la.fmt(neg) == cert["pairing_h2_minus_h1_with_h2"]
        and neg < 0
        and _q(g, h2, h2) > 0
        and _strs(img) == cert["expected_image"]
    )


# ---------------------------------------------------------------------------
# C20  f has infinite order: spectral radius > 1


def run_c20(ctx):
    f = f_star(ctx.hl)
    enc = spectral_radius_enclosure(f, SPECTRAL_EPS)
    ok = enc.lo > 1 and enc.width <= SPECTRAL_EPS
    return ok, {"f_star": f.as_strings(), "eps": la.fmt(SPECTRAL_EPS), "enclosure": enc.to_dict(),
                "lower_bound_exceeds_one": enc.lo > 1}


def check_c20(cert):
    m = _mat(cert["f_star"])
    p = _poly.normalize(_poly.integer_coefficients(_poly.charpoly(m)))
    if list(_poly.integer_coefficients(p)) != cert["enclosure"]["polynomial"]:
        return False
    lo, hi = Fraction(cert["enclosure"]["lo"]), Fraction(cert["enclosure"]["hi"])
    if not (1 < lo <= hi and hi - lo <= Fraction(cert["eps"])):
        return False
    sf = _poly.squarefree(p)
    seq = _poly.sturm_sequence(sf)
    bound = _poly.root_bound(sf)
    # a root in [lo, hi] and no real root of larger modulus
    has_root = _poly.evaluate(sf, lo) == 0 or _poly.count_roots(seq, lo, hi) > 0
    above = _poly.count_roots(seq, hi, bound)
    below = _poly.count_roots(seq, -bound, -hi) - (1 if _poly.evaluate(sf, -hi) == 0 else 0)
    return has_root and above == 0 and below == 0


# ---------------------------------------------------------------------------
# geometric steps taken on trust


def _assumed(statement: str, inputs: list[str]):
    def run(ctx):
        return None, {"statement": statement, "numerical_inputs": inputs}
    return run


@dataclass(frozen=True)
class Claim:
    key: str
    slug: str
    title: str
    run: Callable
    check: Callable | None

    @property
    def claim_id(self) -> str:
        return f"{self.key}-{self.slug}"

    @property
    def assumed(self) -> bool:
        return self.check is None


_CLAIMS = [
    Claim("C01", "minus-two-class", "the surface carries a (-2)-class and its form does not represent 0", run_c01, check_c01),
    Claim("C02", "anisotropy", "q on NS(X) is anisotropic", run_c02, check_c02),
    Claim("C03", "beauville-matrices", "the Beauville involutions act by the reflection formula", run_c03, check_c03),
    Claim("C04", "f-star", "matrix and characteristic polynomial of f^*", run_c04, check_c04),
    Claim("C05", "fixed-line", "the fixed line of f^* and its square", run_c05, check_c05),
    Claim("C06", "no-orthogonal-minus-two", "no (-2)-class is orthogonal to h1 or h2", run_c06, check_c06),
    Claim("C07", "pell-sign", "(-2)-classes positive on h1 are positive on h2", run_c07, check_c07),
    Claim("C08", "very-ample-numerics", "pairings of (-2)-classes with h_i avoid 0 and 1", run_c08, check_c08),
    Claim("C09", "irreducibility", "2h1 - h2 and 2h2 - h1 do not split", run_c09, check_c09),
    Claim("C10", "mori-predicates", "the Mori generators satisfy extremality predicates", run_c10, check_c10),
    Claim("C11", "mori-replay", "no extremal class lies outside the Mori cone", run_c11, check_c11),
    Claim("C12", "ample-dual", "the ample cone is the q-dual of the Mori cone", run_c12, check_c12),
    Claim("C13", "pushforward", "pushforward of L_i, K_i and E under iota_i", run_c13, check_c13),
    Claim("C14", "j-cone-inclusions", "iota_i maps J_i into J_{i+1}; the orbit of L1 stays in J1", run_c14, check_c14),
    Claim("C15", "boundary-pairings", "the supporting ample class pairs (14, 0, 0) with (L, K, E)", run_c15, check_c15),
    Claim("C16", "L1-not-in-J2", "L1 lies outside J2 and L2 outside J1", run_c16, check_c16),
    Claim("C17", "non-periodicity", "the orbit of L1 never returns to its ray", run_c17, check_c17),
    Claim("C18", "no-invariant-divisor", "no f-invariant class is effective", run_c18, check_c18),
    Claim("C19", "intersection-numerics", "degree and sign computations for disjoint planes", run_c19, check_c19),
    Claim("C20", "infinite-order", "spectral radius of f^* exceeds 1", run_c20, check_c20),
    Claim("G01", "trisecant-disjointness", "the two indeterminacy planes are disjoint",
          _assumed("a point of both planes would give a trisecant line contradicting the degree count", ["C19"]), None),
    Claim("G02", "indeterminacy-induction", "iterates stay regular off finitely many planes",
          _assumed("the planes of the orbit family are lagrangian and the induction on their images holds", ["C14", "C15", "C16"]), None),
    Claim("G03", "closure-dimension", "the Zariski closure of the orbit is not four-dimensional",
          _assumed("symplectic argument via a generalized Jouanolou-Ghys theorem", ["C17", "C18"]), None),
]

REGISTRY: dict[str, Claim] = {c.key: c for c in _CLAIMS}
_BY_ID = {c.claim_id: c for c in _CLAIMS}


def lookup(name: str) -> Claim:
    c = REGISTRY.get(name) or _BY_ID.get(name)
    if c is None:
        raise UnknownClaimError(name)
    return c


def run_claim(claim: Claim, ctx: Context) -> ClaimReport:
    t0 = time.perf_counter()
    try:
        ok, cert = claim.run(ctx)
    except (ValueError, ArithmeticError) as exc:
        ok, cert = False, {"error": f"{type(exc).__name__}: {exc}"}
    elapsed = (time.perf_counter() - t0) * 1000
    status = ASSUMED if claim.assumed else (PASS if ok else FAIL)
    cert = {"claim": claim.title, **cert}
    return ClaimReport(claim.claim_id, status, cert, elapsed, claim.title)


def run_claims(scn, selection: Iterable[str] | None = None) -> list[ClaimReport]:
    names = list(selection) if selection is not None else list(scn.claim_ids)
    claims = [lookup(n) for n in names]
    ctx = Context(scn)
    return [run_claim(c, ctx) for c in claims]


def recheck_entry(entry: dict) -> str:
    """Re-validate one report entry from its certificate; returns the recomputed status."""
    claim = lookup(entry["id"])
    if claim.assumed:
        return ASSUMED
    try:
        ok = bool(claim.check(entry["certificate"]))
    except (KeyError, TypeError, ValueError, IndexError, ArithmeticError):
        ok = False
    return PASS if ok else FAIL
