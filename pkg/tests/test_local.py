from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from rank3frob.gauss import GaussInt, GaussPoly, poly_expand_shaped
from rank3frob.local import (
    FrobCubic,
    LocalError,
    WeilBoundError,
    analyze_q2i,
    bp_from_ap,
    certified_roots,
    chi_minus2,
    cubic_from_ap,
    euler_factor,
    is_pure,
    newton_polygon,
    roots_in_Q2i,
    shape_check,
    unit_times_p_roots,
)

T = GaussPoly([0, 1])
gints = st.builds(GaussInt, st.integers(-40, 40), st.integers(-40, 40))

# frozen pipeline output (convention chi) for every good prime in [3, 67]
PIPELINE_B = {
    3: (1, 2), 5: (-1, -4), 7: (1, 4), 11: (-7, -10), 13: (-1, 4), 17: (7, 0),
    19: (1, -14), 23: (17, -4), 29: (-9, -12), 31: (1, 0), 37: (-25, 28), 41: (-5, 0),
    43: (-7, 30), 47: (17, 40), 53: (23, -20), 59: (-39, 22), 61: (63, 20), 67: (65, -22),
}


def test_chi_minus2():
    assert [chi_minus2(p) for p in (3, 5, 7, 11, 13, 17, 19, 23)] == [1, -1, -1, 1, -1, 1, 1, -1]
    with pytest.raises(LocalError):
        chi_minus2(2)


def test_bp_conventions():
    a = GaussInt(1, 4)
    assert bp_from_ap(a, 5, "chi") == GaussInt(-1, -4)
    assert bp_from_ap(a, 5, "none") == a
    assert bp_from_ap(GaussInt(1, 2), 3, "chi") == GaussInt(1, 2)
    with pytest.raises(WeilBoundError):
        bp_from_ap(GaussInt(10, 0), 3)
    with pytest.raises(LocalError):
        bp_from_ap(a, 5, "twisted")


def test_shape_check_displayed_frob11_fails():
    # T^3 + (7+10i)T^2 - 11(7+10i)T - 11^3 as printed
    c = GaussInt(7, 10)
    f = GaussPoly([-(11**3), -11 * c, c, 1])
    res = shape_check(f, 11)
    assert not res
    assert res.b == GaussInt(-7, -10)
    assert shape_check(poly_expand_shaped(GaussInt(-7, -10), 11), 11)
    assert shape_check(poly_expand_shaped(GaussInt(-7, 10), 11), 11)


def test_shape_check_rejects_other_defects():
    assert not shape_check(GaussPoly([1, 1]), 3)
    assert not shape_check(GaussPoly([-26, 3, -1, 1]), 3)
    assert not shape_check(GaussPoly([-27, 3, Fraction(1, 2), 1]), 3)


@settings(max_examples=60, deadline=None)
@given(gints, st.sampled_from([3, 5, 7, 11, 13, 61]))
def test_shape_round_trip(b, p):
    res = shape_check(poly_expand_shaped(b, p), p)
    assert res and res.b == b


def test_euler_factor_p3():
    ef = euler_factor(GaussInt(1, 2), 3)
    assert str(ef) == "1 - (1+2i)X + (3-6i)X^2 - 27X^3"
    # det(1 - X Frob) is the reversed characteristic polynomial
    cub = FrobCubic(3, GaussInt(1, 2)).poly
    assert ef.poly.coeffs == cub.coeffs[::-1]
    assert "X = 3^-s" in ef.render_l_factor()


@pytest.mark.parametrize("p,b", sorted(PIPELINE_B.items()))
def test_pipeline_cubics_are_pure(p, b):
    assert is_pure(poly_expand_shaped(GaussInt(*b), p), p, 2, 1e-9)


@pytest.mark.parametrize("b", [(-9, 0), (-8, -4), (-8, 2)])
def test_impure_cubics_detected(b):
    assert not is_pure(poly_expand_shaped(GaussInt(*b), 3), 3)


def test_is_pure_wrong_constant_term():
    assert not is_pure(GaussPoly([-26, 0, 0, 1]), 3)


def test_certified_roots_disjoint_and_accurate():
    f = poly_expand_shaped(GaussInt(1, 2), 3)
    roots = certified_roots(f)
    assert len(roots) == 3
    found = sorted(abs(complex(z) - 3j) for z, _ in roots)
    assert found[0] < 1e-30


def test_newton_polygon_slopes():
    # T^2 - (1+i): one hull segment of slope -1/2, roots of valuation 1/2
    segs = newton_polygon([GaussInt(-1, -1), GaussInt(0, 0), GaussInt(1, 0)])
    assert [s[2] for s in segs] == [Fraction(-1, 2)]


# distinct roots in Q_2(i) of the cubics above
PIPELINE_ROOTS = {
    3: 3, 5: 0, 7: 1, 11: 3, 13: 0, 17: 1, 19: 3, 23: 1, 29: 0, 31: 1, 37: 0, 41: 1,
    43: 1, 47: 3, 53: 0, 59: 1, 61: 0, 67: 1,
}


@pytest.mark.parametrize("p", sorted(PIPELINE_B))
def test_pipeline_root_counts(p):
    assert roots_in_Q2i(poly_expand_shaped(GaussInt(*PIPELINE_B[p]), p)) == PIPELINE_ROOTS[p]


@pytest.mark.parametrize("p", sorted(PIPELINE_B))
def test_root_count_is_conjugation_invariant(p):
    b = GaussInt(*PIPELINE_B[p])
    assert roots_in_Q2i(poly_expand_shaped(b.conj(), p)) == PIPELINE_ROOTS[p]


def test_p61_cubic_has_no_root_in_q2i():
    f = poly_expand_shaped(GaussInt(63, 20), 61)
    assert analyze_q2i(f).distinct_roots == 0


def test_p41_real_cubic_one_root():
    f = poly_expand_shaped(GaussInt(-5, 0), 41)
    assert roots_in_Q2i(f) == 1
    assert f(GaussInt(41, 0)) == 0


@settings(max_examples=50, deadline=None)
@given(gints, gints, gints)
def test_split_cubics_have_three_roots(r1, r2, r3):
    assume(len({r1, r2, r3}) == 3)
    f = (T - r1) * (T - r2) * (T - r3)
    assert analyze_q2i(f).distinct_roots == 3


@settings(max_examples=50, deadline=None)
@given(gints, st.sampled_from([GaussInt(1, 0), GaussInt(0, 1), GaussInt(3, 2)]))
def test_eisenstein_factor_contributes_no_root(r, u):
    # T^2 - (1+i)u is Eisenstein at pi = 1+i
    f = (T - r) * (T * T - GaussInt(1, 1) * u)
    assert analyze_q2i(f).distinct_roots == 1


@settings(max_examples=30, deadline=None)
@given(gints, gints)
def test_repeated_roots_counted_once(r1, r2):
    assume(r1 != r2)
    f = (T - r1) ** 2 * (T - r2)
    assert analyze_q2i(f).distinct_roots == 2


def test_analyze_rejects_non_integral():
    with pytest.raises(LocalError):
        analyze_q2i(GaussPoly([Fraction(1, 2), 1]))


def test_unit_times_p_roots_anchors():
    r3 = unit_times_p_roots(poly_expand_shaped(GaussInt(1, 2), 3), 3, 64)
    assert [(u.order, u.exact) for u in r3] == [(4, GaussInt(0, 3))]
    assert unit_times_p_roots(poly_expand_shaped(GaussInt(-1, -4), 5), 5, 64) == []


def test_unit_times_p_roots_sixth_roots():
    # b = 0: T^3 - p^3 has roots p, p*zeta_3, p*zeta_3^2
    roots = unit_times_p_roots(poly_expand_shaped(GaussInt(0, 0), 7), 7, 12)
    assert sorted(u.order for u in roots) == [1, 3, 3]


def test_cubic_from_ap():
    assert cubic_from_ap(GaussInt(1, 4), 5).b == GaussInt(-1, -4)


@pytest.mark.parametrize("p", [p for p in sorted(PIPELINE_B) if p not in (17, 31, 41)])
def test_root_counts_against_enumeration_oracle(p):
    """Brute-force count mod (1+i)^n with n above the discriminant valuation."""
    from oracles import q2i_roots_by_enumeration

    f = poly_expand_shaped(GaussInt(*PIPELINE_B[p]), p)
    n = 18 if p == 47 else 14
    assert analyze_q2i(f).disc_valuation < n
    coeffs = [(int(c.re), int(c.im)) for c in f.coeffs]
    assert q2i_roots_by_enumeration(coeffs, n) == PIPELINE_ROOTS[p]
