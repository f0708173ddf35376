from fractions import Fraction

import pytest

from k3cone.conegeom import ConeError, cone_from_rays, contains
from k3cone.dynamics import (
    K,
    L,
    boundary_pairing_check,
    cone_inclusion_check,
    growth_report,
    intersection_emptiness_numerics,
    invariant_divisor_report,
    j_cones,
    orbit,
    periodicity_certificate,
)
from k3cone.hilbscheme import beauville_op, f_push, f_star
from k3cone.quadlat import identity_op, op_power, pair

h = Fraction(1, 2)


@pytest.fixture(scope="module")
def mori(lat, mori_rays):
    return cone_from_rays(lat, mori_rays)


@pytest.fixture(scope="module")
def jc(hl, mori):
    return j_cones(hl, mori)


def _in_sqrt48(lo, hi):
    """7 + 4 sqrt 3 lies in [lo, hi], decided with rational squares."""
    return lo - 7 > 0 and (lo - 7) ** 2 <= 48 <= (hi - 7) ** 2


def test_L_and_K(hl):
    assert L(hl, 1) == hl.vec(0, -3 * h, 1)
    assert L(hl, 2) == hl.vec(1, -3 * h, 0)
    assert K(hl, 1) == hl.vec(-1, -h, 2)
    assert K(hl, 2) == hl.vec(2, -h, -1)


def test_j_cones(hl, jc):
    assert {r.coords for r in jc.J1.rays} == {(0, -3, 2), (-2, -1, 4), (0, 1, 0)}
    assert contains(jc[1], hl.E)
    assert not contains(jc[1], L(hl, 2))
    assert not contains(jc[2], L(hl, 1))


def test_j_cones_reject_non_extremal(hl, lat):
    small = cone_from_rays(lat, [lat.vec(0, 1, 0), lat.vec(1, -1, 0), lat.vec(0, -1, 1)])
    with pytest.raises(ConeError):
        j_cones(hl, small)


@pytest.mark.parametrize("i", [1, 2])
def test_pushforward_identities(hl, i):
    j = 2 if i == 1 else 1
    iota = beauville_op(hl, i)
    assert iota(L(hl, i)) == K(hl, j)
    assert iota(K(hl, i)) == 5 * L(hl, j) + 2 * K(hl, j) + hl.E
    assert iota(K(hl, i)) == 9 * hl.H(i) - 2 * hl.H(j) - Fraction(15, 2) * hl.E
    assert iota(hl.E) == 4 * L(hl, j) + hl.E == 4 * hl.H(i) - 5 * hl.E


def test_cone_inclusions(hl, jc):
    assert cone_inclusion_check(beauville_op(hl, 1), jc.J1, jc.J2).passed
    assert cone_inclusion_check(beauville_op(hl, 2), jc.J2, jc.J1).passed
    assert cone_inclusion_check(identity_op(hl.lattice), jc.J1, jc.J1).passed
    bad = cone_inclusion_check(beauville_op(hl, 2), jc.J1, jc.J1)
    assert not bad.passed


def test_boundary_pairings(hl, ample_rays):
    rep = boundary_pairing_check(hl, ample_rays)
    assert rep.passed
    for row in rep.certificate["rows"]:
        assert row["pairings"] == {"L": "14", "K": "0", "E": "0"}
    a = hl.vec(-2, 0, 5)
    assert pair(hl.lattice, a, L(hl, 1)) == 14 and pair(hl.lattice, a, K(hl, 1)) == 0


def test_orbit_stays_in_J1_and_grows(hl):
    rec = orbit(hl, L(hl, 1), 20)
    assert all(s.in_J1 for s in rec.steps)
    assert [s.pairing for s in rec.steps[:4]] == [0, 84, 1232, 17220]
    ratios = rec.ratios()
    assert ratios[0] is None
    rep = growth_report(rec, f_push(hl), Fraction(1, 10**6))
    lo = Fraction(rep["spectral_radius"]["lo"])
    assert abs(ratios[6] - lo) / lo < Fraction(1, 100)
    assert abs(ratios[-1] - lo) / lo < Fraction(1, 10**6) * 10
    with pytest.raises(ValueError):
        orbit(hl, L(hl, 1), -1)


def test_f_push_orbit_matches_powers(hl):
    rec = orbit(hl, L(hl, 1), 7)
    assert rec.steps[7].cls == op_power(f_push(hl), 7)(L(hl, 1))


def test_periodicity(hl):
    rep = periodicity_certificate(hl, L(hl, 1), 20)
    c = rep.certificate
    assert rep.passed
    assert c["irrational_factor_discriminant"] == 192 and not c["discriminant_is_square"]
    assert c["ray_returns"] == [] and c["seed_on_eigenline"] == []
    hit = periodicity_certificate(hl, hl.vec(2, -7, 2), 5)
    assert not hit.passed and hit.certificate["seed_on_eigenline"] == ["1"]
    with pytest.raises(ValueError):
        periodicity_certificate(hl, hl.lattice.zero())


def test_invariant_divisor(hl):
    rep = invariant_divisor_report(hl)
    c = rep.certificate
    assert rep.passed
    assert c["fixed_line"] in (["2", "-7", "2"], ["-2", "7", "-2"])
    assert c["square"] == "-84"
    assert [Fraction(x) for x in c["iota1_image"]] == [-Fraction(x) for x in c["fixed_line"]]
    generic = invariant_divisor_report(hl, identity_op(hl.lattice))
    assert not generic.passed and generic.certificate["non_generic"]


def test_intersection_numerics(hl):
    rep = intersection_emptiness_numerics(hl)
    c = rep.certificate
    assert rep.passed
    assert c["degree_h1_on_2h1_minus_h2"] == "4"
    assert c["pairing_h2_minus_h1_with_h2"] == "-2"
    assert c["iota1_image"] == ["0", "-3/2", "1"]


def test_spectral_radius_of_push(hl):
    rep = growth_report(orbit(hl, L(hl, 1), 3), f_push(hl), Fraction(1, 100))
    enc = rep["spectral_radius"]
    assert _in_sqrt48(Fraction(enc["lo"]), Fraction(enc["hi"]))
    assert Fraction(enc["width"]) <= Fraction(1, 100)
    assert f_star(hl).inverse() == f_push(hl)
