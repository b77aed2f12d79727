import itertools

import pytest
from conftest import instance

from nsbasis.funcfield import Place, common_roots, root_multiset_size
from nsbasis.intersect import component_at, incidence_profiles, pair_intersection, zero_section_intersection
from nsbasis.kodaira import fiber_config
from nsbasis.mwsections import exact_point
from nsbasis.weierstrass import build_family, infinity_chart, transport_point

M60 = build_family(4, 60)


def p60(d, j):
    return exact_point(4, d, j).pullback(60)


def zero_fiber():
    return fiber_config(M60)[0]


@pytest.mark.parametrize("d,j,comp", [(2, 1, 30), (3, 1, 20), (3, 2, 20), (4, 1, 15), (4, 3, 0),
                                      (5, 1, 24), (5, 4, 24)])
def test_components_at_zero(d, j, comp):
    assert component_at(p60(d, j), Place.finite(0), zero_fiber(), M60) == comp


def test_pair_examples():
    assert pair_intersection(p60(2, 1), p60(4, 1), M60) == 15
    assert pair_intersection(p60(5, 1), p60(5, 3), M60) == 2
    assert pair_intersection(p60(3, 1), p60(3, 2), M60) == 0


def test_zero_section_examples():
    assert zero_section_intersection(p60(4, 1), M60) == 5
    assert zero_section_intersection(p60(5, 2), M60) == 2
    assert zero_section_intersection(p60(2, 1), M60) == 0


def test_identical_sections_rejected():
    with pytest.raises(ValueError):
        pair_intersection(p60(2, 1), p60(2, 1), M60)


# the full table on the n = 60 surface of family 4
TABLE60 = {
    ("P_2,1", "P_3,*"): 0, ("P_2,1", "P_4,*"): 15, ("P_2,1", "P_5,*"): 0,
    ("P_3,*", "P_3,*"): 0, ("P_3,*", "P_4,1"): 5, ("P_3,*", "P_4,3"): 10, ("P_3,*", "P_5,*"): 0,
    ("P_4,1", "P_4,3"): 0, ("P_4,1", "P_5,*"): 8, ("P_4,3", "P_5,*"): 12, ("P_5,*", "P_5,*"): 2,
}


def _match(pattern, label):
    return pattern == label or (pattern.endswith("*") and label.startswith(pattern[:-1]))


def expected_pair(a, b):
    for (u, v), val in TABLE60.items():
        if (_match(u, a) and _match(v, b)) or (_match(u, b) and _match(v, a)):
            return val
    raise KeyError((a, b))


def test_sixty_table(e60):
    labels = [p.label for p in e60.points]
    for i, j in itertools.combinations(range(len(labels)), 2):
        assert e60.pairs[(i, j)] == expected_pair(labels[i], labels[j]), (labels[i], labels[j])


@pytest.mark.parametrize("family,n", [(4, 12), (4, 30), (5, 6), (5, 12), (3, 4), (1, 10), (2, 10), (1, 15)])
def test_symmetric_and_nonnegative(family, n):
    inst = instance(family, n)
    for (i, j), v in inst.pairs.items():
        assert v >= 0 and inst.pairs[(j, i)] == v
    assert all(inc.zero >= 0 for inc in inst.incidences)
    pts = inst.points
    for i, j in itertools.combinations(range(min(len(pts), 4)), 2):
        assert pair_intersection(pts[j], pts[i], inst.model) == inst.pairs[(i, j)]


def _meet_at_origin(x1, y1, x2, y2) -> bool:
    return any(d[0] == "zero" for d, _ in common_roots(x1 - x2, y1 - y2))


@pytest.mark.parametrize("family,n", [(4, 4), (4, 12), (4, 20), (4, 60)])
def test_degree_conservation(family, n):
    # pairs that avoid each other over t = 0 and t = inf meet only at
    # finite transversal points, counted by the common roots
    inst = instance(family, n)
    inf = infinity_chart(inst.model)
    checked = 0
    for i, j in itertools.combinations(range(len(inst.points)), 2):
        p, q = inst.points[i], inst.points[j]
        if inst.incidences[i].zero and inst.incidences[j].zero:
            continue
        if _meet_at_origin(p.x, p.y, q.x, q.y):
            continue
        xp, yp = transport_point(p.x, p.y, inf.chart)
        xq, yq = transport_point(q.x, q.y, inf.chart)
        if min(xp.low, xq.low) >= 0 and _meet_at_origin(xp, yp, xq, yq):
            continue
        finite = common_roots(p.x - q.x, p.y - q.y)
        if any(m > 1 for _, m in finite):
            continue
        assert inst.pairs[(i, j)] == root_multiset_size(finite), (p.label, q.label)
        checked += 1
    assert checked


def test_profiles(e60):
    profs = incidence_profiles(e60.points, M60)
    by_label = {p.section.label: p for p in profs}
    assert by_label["P_2,1"].components["zero"] == 30
    assert by_label["P_4,1"].pair_numbers["O"] == 5
    assert by_label["P_4,1"].pair_numbers[(2, 1)] == 15
    assert by_label["P_4,3"].components["zero"] == 0
