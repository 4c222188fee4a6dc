from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rank3frob.gauss import (
    BivarIntPoly,
    GaussError,
    GaussInt,
    GaussPoly,
    GaussRat,
    discriminant_cubic,
    poly_divrem,
    poly_expand_shaped,
    poly_gcd,
    squarefree_part,
)

gints = st.builds(GaussInt, st.integers(-50, 50), st.integers(-50, 50))
gpolys = st.lists(gints, min_size=0, max_size=5).map(GaussPoly)


def test_gauss_int_basics():
    z = GaussInt(1, 2)
    assert z.conj() == GaussInt(1, -2)
    assert z.norm() == 5
    assert z * z.conj() == 5
    assert str(z) == "1+2i" and str(GaussInt(-7, -10)) == "-7-10i" and str(GaussInt(0, 1)) == "i"
    assert GaussInt(1, 1).divides(GaussInt(2, 0))
    assert GaussInt(2, 0).exact_div(GaussInt(1, 1)) == GaussInt(1, -1)
    with pytest.raises(GaussError):
        GaussInt(3, 0).exact_div(GaussInt(2, 0))


def test_gauss_rat_inverse():
    z = GaussRat(Fraction(1, 2), Fraction(-3))
    assert z * z.inverse() == 1
    assert not z.is_integral()


@settings(max_examples=80, deadline=None)
@given(gints, gints, gints)
def test_ring_laws(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert (a * b).norm() == a.norm() * b.norm()
    assert (a * b).conj() == a.conj() * b.conj()


@settings(max_examples=60, deadline=None)
@given(gpolys, gpolys.filter(lambda f: not f.is_zero()))
def test_divrem(f, g):
    q, r = poly_divrem(f, g)
    assert q * g + r == f
    assert r.is_zero() or r.degree < g.degree


@settings(max_examples=40, deadline=None)
@given(gpolys.filter(lambda f: not f.is_zero()), gpolys.filter(lambda f: not f.is_zero()))
def test_gcd_divides_both(f, g):
    d = poly_gcd(f, g)
    assert poly_divrem(f, d)[1].is_zero()
    assert poly_divrem(g, d)[1].is_zero()


def test_zero_polynomial_degree():
    assert GaussPoly().degree is None
    assert GaussPoly([0, 0]).is_zero()


def test_frob3_factorization_exact():
    f = poly_expand_shaped(GaussInt(1, 2), 3)
    lin = GaussPoly([GaussInt(0, -3), 1])
    quad = GaussPoly([GaussInt(0, -9), GaussInt(-1, 1), 1])
    q, r = poly_divrem(f, lin)
    assert r.is_zero() and q == quad
    assert lin * quad == f


def test_poly_expand_shaped_rejects_bad_prime():
    with pytest.raises(GaussError):
        poly_expand_shaped(GaussInt(1, 0), 2)


def test_squarefree_and_discriminant():
    x = GaussPoly([0, 1])
    f = (x - 1) ** 2 * (x - GaussInt(0, 1))
    assert squarefree_part(f).degree == 2
    assert discriminant_cubic(f) == 0
    g = (x - 1) * (x - 2) * (x - 3)
    assert discriminant_cubic(g) == 4  # (1*1*2)^2


def test_render():
    f = poly_expand_shaped(GaussInt(1, 2), 3)
    assert f.render("T") == "T^3 - (1+2i)T^2 + (3-6i)T - 27"


@settings(max_examples=30, deadline=None)
@given(st.integers(-9, 9), st.integers(-9, 9), st.integers(-5, 5), st.integers(-5, 5))
def test_bivariate_substitution_and_evaluation(c, d, x, y):
    f = BivarIntPoly({(2, 1): c, (0, 3): d, (1, 0): 1})
    g = f.substitute_linear((0, 1), (-1, 0))  # f(y, -x)
    assert g.evaluate(x, y) == f.evaluate(y, -x)
