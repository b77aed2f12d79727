import mpmath
import pytest

from nsbasis.funcfield import Poly
from nsbasis.mwsections import (ADMISSIBLE, CLASSES, DEG42_SEEDS, NUMERIC_POINTS, SectionPoint,
                                TIE_HINTS, admissible_set, catalog_points, deg42_root, divisors, euler_phi,
                                exact_point, is_admissible_ex1, mw_rank, numeric_point, solve_deg42_system,
                                units, verify_on_curve)
from nsbasis.numtower import TowerSpec
from nsbasis.weierstrass import build_family, mirror_point_1_to_2


def test_admissible_sets():
    assert admissible_set(1).members == (1, 2, 3, 7, 8, 10, 12, 15, 18, 20, 42)
    assert admissible_set(2).members == (1, 2, 5, 6, 8, 9, 12, 14, 20, 21, 30)
    assert admissible_set(3).members == (2,)
    assert admissible_set(4).members == (2, 3, 4, 5)
    assert admissible_set(5).members == (2, 3)
    assert 42 in admissible_set(1) and 5 not in admissible_set(1)


def test_admissibility_criterion():
    assert is_admissible_ex1(42)
    assert not is_admissible_ex1(5)
    with pytest.raises(ValueError):
        is_admissible_ex1(0)


def test_phi_and_divisors():
    assert [euler_phi(n) for n in (1, 2, 9, 42, 60, 97)] == [1, 1, 6, 12, 16, 96]
    assert divisors(60) == [1, 2, 3, 4, 5, 6, 10, 12, 15, 20, 30, 60]
    assert units(8) == [1, 3, 5, 7] and units(1) == [1]


def test_ranks():
    assert mw_rank(4, 60) == 9
    assert mw_rank(4, 5) == 4
    assert mw_rank(1, 42) == 22
    with pytest.raises(ValueError):
        mw_rank(4, 0)


def test_rank_matches_phi_sum():
    for family, adm in ADMISSIBLE.items():
        for n in range(1, 61):
            assert mw_rank(family, n) == sum(euler_phi(d) for d in adm if n % d == 0)


def test_five_torsion_points_on_sixty():
    K = TowerSpec(5, ((2, 5),))
    for k in units(5):
        p = next(q for q in catalog_points(4, 60) if (q.d, q.j) == (5, k))
        c = K.radical(2, 5) ** -2 * K.root_of_unity(5, 2 * k)
        assert p.x == Poly({24: c})
        assert p.y == Poly({24: c, 36: K.radical(2, 5) ** -3 * K.root_of_unity(5, 3 * k)})


def test_two_torsion_point_family4():
    p = catalog_points(4, 2)[0]
    assert p.x.is_zero() and p.y == Poly({1: TowerSpec().rational(-1)})
    assert verify_on_curve(p, build_family(4, 2)).status == "exact-pass"


def test_family5_cubic_point():
    K = TowerSpec(3, ((2, 3),))
    p = exact_point(5, 3, 1)
    c = K.radical(2, 3) ** 2 * K.root_of_unity(3, 1)
    assert p.x == Poly({1: c})
    assert p.y == Poly({1: c, 2: K.radical(2, 3) * K.root_of_unity(3, 2)})


def test_family3_point():
    p = catalog_points(3, 2)[0]
    K = TowerSpec(8, ((2, 2),))
    assert p.x == Poly({2: K.rational(-1 / 2)})
    assert p.y == Poly({3: K.radical(-2, 2) * K.rational(1 / 4)})
    assert verify_on_curve(p, build_family(3, 2)).status == "exact-pass"


@pytest.mark.parametrize("j", [1, 2])
def test_cube_root_points_exact(j):
    assert verify_on_curve(exact_point(4, 3, j), build_family(4, 3)).status == "exact-pass"


def test_zero_section_passes():
    assert verify_on_curve(None, build_family(4, 3)).status == "exact-pass"


def test_off_curve_point_fails_with_witness():
    K = TowerSpec()
    p = SectionPoint(Poly({1: K.one()}), Poly({1: K.one()}), 4, 2, 1, n=2)
    res = verify_on_curve(p, build_family(4, 2))
    assert not res and res.status == "fail" and res.witness[0] is not None


def test_family_mismatch():
    with pytest.raises(ValueError):
        verify_on_curve(exact_point(4, 2, 1), build_family(5, 2))


@pytest.mark.parametrize("family", range(1, 6))
def test_catalog_sizes(family):
    for n in range(1, 61):
        if any((family, d) in NUMERIC_POINTS for d in divisors(n)):
            continue  # sizes of numeric catalogs are covered by the acceptance run
        assert len(catalog_points(family, n)) == mw_rank(family, n)


@pytest.mark.parametrize("family,n", [(4, 60), (4, 12), (5, 6), (1, 30), (2, 28), (1, 14), (2, 30)])
def test_pullback_consistency(family, n):
    pts = catalog_points(family, n)
    for d in divisors(n):
        if d not in ADMISSIBLE[family] or (family, d) in NUMERIC_POINTS:
            continue
        base = catalog_points(family, d)
        mine = [p for p in pts if p.d == d]
        for b, p in zip([q for q in base if q.d == d], mine):
            q = b.pullback(n)
            assert q.x == p.x and q.y == p.y


def _same_up_to_sign(a, b):
    return (a[0] - b[0]).is_zero() and ((a[1] - b[1]).is_zero() or (a[1] + b[1]).is_zero())


@pytest.mark.parametrize("d", [2, 5, 6, 14, 30])
def test_family2_points_are_mirrors(d):
    n = 2 * d
    mirrored = [mirror_point_1_to_2(p.x, p.y, n) for p in catalog_points(1, n) if p.is_exact()]
    for q in catalog_points(2, n):
        if q.d == d:
            assert any(_same_up_to_sign((q.x, q.y), m) for m in mirrored), q.label


def test_family2_unit_point_is_mirror_of_two_torsion_like_point():
    # (0, -t) on family 1 with n = 2 maps to (0, -t^2)
    K = TowerSpec()
    x, y = mirror_point_1_to_2(Poly(), Poly({1: K.rational(-1)}), 2)
    q = catalog_points(2, 2)[0]
    assert q.d == 1 and q.x == x and q.y == y


# ------------------------------------------------------------ numeric points

@pytest.mark.parametrize("family,d", sorted(NUMERIC_POINTS))
def test_numeric_points_certify(family, d):
    m = build_family(family, d)
    for p in catalog_points(family, d):
        if p.d == d:
            res = verify_on_curve(p, m)
            assert res.status == "certified-pass" and res.precision >= 133


def test_numeric_point_records_choice():
    p = numeric_point(1, 18, 5)
    assert p.meta["source"] == "table" and p.meta["ties"] >= 1
    assert p.exactness == "certified-numeric"


def test_class_members_are_twists():
    # P_{18,11}(t) = P_{18,1}(zeta_18^10 t) since both come from one class solution
    import cmath
    assert CLASSES[18][11] == CLASSES[18][1]
    a, b = numeric_point(1, 18, 1), numeric_point(1, 18, 11)
    for pa, pb in ((a.x, b.x), (a.y, b.y)):
        assert sorted(pa.terms) == sorted(pb.terms)
        for e, c in pa.terms.items():
            z = cmath.exp(2j * cmath.pi * 10 * e / 18)
            assert abs(complex(c) * z - complex(pb.terms[e])) < 1e-12


def test_tie_hints_are_reproduced():
    from nsbasis.nslattice import select_branches
    import numpy as np
    chosen = select_branches(18, [(1, 18, "q"), (2, 9, "z")])
    for (d, cls), v in chosen.items():
        if (d, cls) in TIE_HINTS:
            assert np.max(np.abs(np.array(v) - np.array(TIE_HINTS[(d, cls)]))) < 1e-4


@pytest.fixture(scope="module")
def deg42():
    return solve_deg42_system(40, 192)


def test_deg42_low_precision_rejected():
    with pytest.raises(ValueError):
        solve_deg42_system(5, 64)


def test_deg42_named_equations(deg42):
    with mpmath.workprec(224):
        bound = mpmath.mpf(2) ** -96
        for s in deg42:
            a1, a2, a5 = s[0], s[1], s[4]
            b1, b2, b7 = s[5], s[6], s[11]
            assert abs(b1 ** 2 - (a1 ** 3 + 1)) < bound
            assert abs(2 * b1 * b2 - 3 * a1 ** 2 * a2) < bound
            assert abs(b7 ** 2 - a5 ** 3) < bound


def test_deg42_sorted_and_distinct(deg42):
    keys = [tuple((round(float(mpmath.re(c)), 9), round(float(mpmath.im(c)), 9)) for c in s) for s in deg42]
    assert len(set(keys)) == len(keys)


def test_deg42_point():
    p = numeric_point(1, 42, 1)
    assert p.meta["source"] == "deg42-multistart"
    assert verify_on_curve(p, build_family(1, 42)).status == "certified-pass"
    root = deg42_root()
    assert all(abs(c) > 1e-10 for c in root) and len(root) == 12 and DEG42_SEEDS >= 100
