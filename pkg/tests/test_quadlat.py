from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from k3cone.hilbscheme import beauville_op, f_push, f_star
from k3cone.quadlat import (
    DegenerateFormError,
    DimensionError,
    IsometryError,
    IsometryOp,
    IsotropicVectorError,
    LatticeError,
    QuadLattice,
    char_poly,
    identity_op,
    neg_reflection_op,
    op_compose,
    op_power,
    pair,
    rational_eigenlines,
    reflect,
    reflection_op,
    spectral_radius_enclosure,
)

M1 = [[5, 4, 8], [-6, -5, -8], [0, 0, -1]]
M2 = [[-1, 0, 0], [-8, -5, -6], [8, 4, 5]]
F_STAR = [[27, 12, 16], [-18, -7, -10], [-8, -4, -5]]


def _ints(op):
    return [[int(c) for c in row] for row in op.matrix]


def _sympy_charpoly(rows):
    lam = sympy.symbols("lam")
    return tuple(int(c) for c in sympy.Matrix(rows).charpoly(lam).all_coeffs())


def test_gram_of_X(lat):
    assert lat.gram == ((6, 0, 8), (0, -4, 0), (8, 0, 6))
    assert lat.basis == ("H1", "E", "H2")
    assert lat.determinant == -4 * (36 - 64)


@pytest.mark.parametrize(
    "v, w, expected",
    [
        ((0, 1, 0), (0, 1, 0), -4),
        ((1, 0, 0), (0, 0, 1), 8),
        ((1, 0, 0), (0, 1, 0), 0),
        ((1, -1, 0), (1, -1, 0), 2),
    ],
)
def test_pairings(lat, v, w, expected):
    assert pair(lat, lat.vec(v), lat.vec(w)) == expected


def test_surface_reflection(surface):
    r = surface.vec(2, -1)
    assert r.square() == -2
    assert reflect(surface, r, surface.vec(1, 0)) == surface.vec(9, -4)
    assert reflect(surface, r, r) == -r


def test_beauville_matrices(hl):
    assert _ints(beauville_op(hl, 1)) == M1
    assert _ints(beauville_op(hl, 2)) == M2
    assert _ints(f_star(hl)) == F_STAR
    assert f_push(hl) == f_star(hl).inverse()


def test_involutions(hl):
    for k in (1, 2):
        assert op_power(beauville_op(hl, k), 2).is_identity()
        assert beauville_op(hl, k).determinant() == 1


def test_char_polys_against_sympy(hl):
    for op, rows in ((beauville_op(hl, 1), M1), (beauville_op(hl, 2), M2), (f_star(hl), F_STAR)):
        assert char_poly(op) == _sympy_charpoly(rows)
    assert char_poly(f_star(hl)) == (1, -15, 15, -1)
    assert char_poly(beauville_op(hl, 1)) == (1, 1, -1, -1)


def test_power_and_inverse(hl):
    f = f_star(hl)
    f5 = op_power(f, 5)
    assert _ints(f5) == [[int(c) for c in row] for row in (sympy.Matrix(F_STAR) ** 5).tolist()]
    assert op_compose(op_power(f, -3), op_power(f, 3)).is_identity()
    assert op_power(f, 0) == identity_op(f.lattice)


def test_eigenline(hl, lat):
    lines = rational_eigenlines(f_star(hl))
    assert [e.eigenvalue for e in lines] == [1]
    (v,) = lines[0].basis
    assert v.coords in {(2, -7, 2), (-2, 7, -2)}
    assert v.square() == -84
    assert beauville_op(hl, 1)(v) == -v


def test_enclosure_contains_radius(hl):
    enc = spectral_radius_enclosure(f_star(hl), Fraction(1, 10**6))
    assert enc.width <= Fraction(1, 10**6)
    # 7 + 4 sqrt 3 in [lo, hi] iff lo - 7 <= 4 sqrt3 <= hi - 7, compared through squares
    assert enc.lo - 7 > 0 and (enc.lo - 7) ** 2 <= 48 <= (enc.hi - 7) ** 2
    assert enc.polynomial


@pytest.mark.parametrize(
    "gram, exc",
    [
        ([[1, 2], [2, 4]], DegenerateFormError),
        ([[1, 2], [3, 4]], LatticeError),
        ([[1, 2, 3], [2, 4]], DimensionError),
        ([], DimensionError),
        ([[Fraction(1, 2)]], LatticeError),
    ],
)
def test_bad_grams(gram, exc):
    with pytest.raises(exc):
        QuadLattice(gram)


def test_vector_errors(lat, surface):
    with pytest.raises(DimensionError):
        lat.vec(1, 2)
    with pytest.raises(DimensionError):
        pair(lat, lat.vec(1, 0, 0), surface.vec(1, 0))
    with pytest.raises(TypeError):
        lat.vec(0.5, 0, 0)
    with pytest.raises(IsotropicVectorError):
        reflect(QuadLattice([[0, 1], [1, 0]]), QuadLattice([[0, 1], [1, 0]]).vec(1, 0),
                QuadLattice([[0, 1], [1, 0]]).vec(0, 1))


def test_operator_errors(lat):
    with pytest.raises(IsometryError):
        IsometryOp([[1, 0, 0], [0, 1, 0], [0, 0, 2]], lat)
    with pytest.raises(DimensionError):
        IsometryOp([[1, 0], [0, 1]], lat)
    with pytest.raises(LatticeError):
        neg_reflection_op(lat, lat.vec(1, 0, 0))


def test_parse(lat):
    assert lat.parse("0, -3/2, 1") == lat.vec(0, Fraction(-3, 2), 1)


# properties

_small = st.integers(-6, 6)


@pytest.mark.property_suite
@settings(max_examples=1000)
@given(word=st.lists(st.sampled_from([1, 2]), min_size=1, max_size=12),
       v=st.tuples(_small, _small, _small), w=st.tuples(_small, _small, _small))
def test_words_in_involutions_are_isometries(hl, word, v, w):
    lat = hl.lattice
    m = [[int(i == j) for j in range(3)] for i in range(3)]
    for k in word:
        b = M1 if k == 1 else M2
        m = [[sum(m[i][t] * b[t][j] for t in range(3)) for j in range(3)] for i in range(3)]
    g = IsometryOp(m, lat)
    a, b = lat.vec(v), lat.vec(w)
    assert pair(lat, g(a), g(b)) == pair(lat, a, b)
    assert g.is_integral()
    assert abs(g.determinant()) == 1


_gram2 = st.tuples(st.integers(-8, 8), st.integers(-8, 8), st.integers(-8, 8)).filter(
    lambda t: t[0] * t[2] - t[1] * t[1] != 0
)


@pytest.mark.property_suite
@settings(max_examples=1000)
@given(g=_gram2, e=st.integers(-6, 6).filter(bool), root=st.tuples(_small, _small, _small),
       w=st.tuples(_small, _small, _small))
def test_reflection_is_an_involutive_isometry(g, e, root, w):
    lat = QuadLattice([[g[0], 0, g[1]], [0, e, 0], [g[1], 0, g[2]]])
    r = lat.vec(root)
    if pair(lat, r, r) == 0:
        with pytest.raises(IsotropicVectorError):
            reflect(lat, r, lat.vec(w))
        return
    x = lat.vec(w)
    assert reflect(lat, r, reflect(lat, r, x)) == x
    assert pair(lat, reflect(lat, r, x), reflect(lat, r, x)) == pair(lat, x, x)
    s = reflection_op(lat, r)
    assert op_power(s, 2).is_identity()
    assert s.determinant() == -1


@settings(max_examples=300)
@given(u=st.tuples(_small, _small, _small), v=st.tuples(_small, _small, _small),
       w=st.tuples(_small, _small, _small), a=st.fractions(max_denominator=7), b=st.integers(-5, 5))
def test_pairing_is_symmetric_bilinear(lat, u, v, w, a, b):
    U, V, W = lat.vec(u), lat.vec(v), lat.vec(w)
    assert pair(lat, U, V) == pair(lat, V, U)
    assert pair(lat, U * a + V * b, W) == a * pair(lat, U, W) + b * pair(lat, V, W)
