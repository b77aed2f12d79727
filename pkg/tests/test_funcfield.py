import pytest
from hypothesis import given, settings, strategies as st

from nsbasis.funcfield import (INF, Place, Poly, common_root_count, common_roots, const, ord_at, poly_arith,
                               poly_gcd, resultant, root_multiset_size, t_power)
from nsbasis.mwsections import exact_point
from nsbasis.numtower import TowerSpec

Q = TowerSpec()


def P(*coeffs):
    return Poly({i: Q.rational(c) for i, c in enumerate(coeffs)})


def test_pullback_of_two_torsion_point():
    p = exact_point(4, 2, 1)
    assert p.x.is_zero()
    assert p.y.substitute_power(30) == t_power(30, coeff=-1)


def test_product_and_derivative():
    assert poly_arith("mul", P(1, 1), P(-1, 1)) == P(-1, 0, 1)
    assert poly_arith("derivative", t_power(3)) == P(0, 0, 3)
    assert P(1, 2).compose(P(0, 0, 1)) == P(1, 0, 2)


def test_orders():
    assert ord_at(t_power(3) + t_power(5), Place.finite(0)) == 3
    assert ord_at(Poly(), Place.finite(0)) == INF
    assert ord_at(P(1, 2, 1), Place.finite(Q.rational(-1))) == 2
    assert ord_at(P(1, 2, 1), Place.infinity()) == -2
    assert ord_at((P(0, 1), P(0, 0, 1)), Place.finite(0)) == -1


def test_order_of_point_coordinate():
    x = exact_point(4, 5, 1).pullback(60).x
    assert ord_at(x, Place.finite(0)) == 24


def test_discriminant_order_family4():
    from nsbasis.weierstrass import build_family, invariants
    disc = invariants(build_family(4, 60))[2]
    assert ord_at(disc, Place.finite(0)) == 60


def test_resultant_standard_sign():
    # Res(t - 1, t + 1) = 2 in the Sylvester convention
    assert resultant(P(-1, 1), P(1, 1)).to_fraction() == 2
    assert resultant(P(1, 1), P(-1, 1)).to_fraction() == -2


def test_common_roots_of_sections_two_and_four():
    p = exact_point(4, 2, 1).pullback(60)
    q = exact_point(4, 4, 1).pullback(60)
    roots = common_roots(p.x - q.x, p.y - q.y)
    away = [(d, m) for d, m in roots if d[0] != "zero"]
    assert root_multiset_size(away) == 15
    assert all(m == 1 for _, m in away)


def test_squarefree_has_no_repeated_roots():
    f = P(-2, 0, 0, 1)
    assert common_roots(f, f.derivative()) == []


def test_common_root_count_deflates():
    f = t_power(6) - const(1)
    g = t_power(3) - const(1)
    assert common_root_count(f, g) == 3


# ------------------------------------------------------------ properties

coef = st.integers(-3, 3)
polys = st.lists(coef, min_size=1, max_size=5).map(lambda cs: P(*cs))
places = st.sampled_from([Place.finite(0), Place.finite(Q.rational(1)), Place.finite(Q.rational(-2)),
                          Place.infinity()])


@settings(max_examples=60, deadline=None)
@given(polys, polys, places)
def test_order_is_additive(f, g, place):
    if f.is_zero() or g.is_zero():
        return
    assert ord_at(f * g, place) == ord_at(f, place) + ord_at(g, place)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=1, max_size=3), st.lists(st.integers(-3, 3), min_size=1, max_size=3))
def test_degree_sum_over_all_places_vanishes(num_roots, den_roots):
    # f = prod (t - a) / prod (t - b) over integer roots; orders sum to zero
    num = P(1)
    for a in num_roots:
        num = num * P(-a, 1)
    den = P(1)
    for b in den_roots:
        den = den * P(-b, 1)
    total = 0
    for c in set(num_roots) | set(den_roots):
        total += ord_at((num, den), Place.finite(Q.rational(c)))
    total += ord_at((num, den), Place.infinity())
    assert total == 0


@settings(max_examples=60, deadline=None)
@given(polys, polys)
def test_resultant_vanishes_iff_common_factor(f, g):
    if f.is_zero() or g.is_zero() or f.degree + g.degree == 0:
        return
    if f.degree == 0 or g.degree == 0:
        return
    shared = poly_gcd(f, g).degree >= 1
    assert resultant(f, g).is_zero() == shared


def test_ball_zero_test_three_ways():
    import flint
    from nsbasis.funcfield import Ball, PrecisionExhausted
    third = Ball(flint.acb(flint.arb(1) / 3))
    assert not third.is_zero()
    assert (third - third).is_zero()
    wide = Ball(flint.acb(flint.arb(0, 2.0 ** -100)))
    with pytest.raises(PrecisionExhausted):
        wide.is_zero()
