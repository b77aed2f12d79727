"""Intersection numbers on the smooth (Kodaira-Neron) model.

Away from t = 0 and t = inf the Weierstrass models of the families are
smooth, and sections meet only along smooth fiber points, so the local
number at a common point is min(ord dx, ord dy).  At t = 0 and t = inf the
local chart is used: intersections with the zero section come from the
pole of x, and sections through the singular point of the fiber are placed
on exceptional components by valuations:

* I_N: with xi the critical point of the cubic (so F = (x - xi)^2 G + F(xi)),
  the two branches U, V = y -+ (x - xi) sqrt(G) satisfy U V = F(xi); the
  section meets component ord V, and two sections on one component k meet
  with multiplicity ord(V_p - V_q) - k.
* additive fibers: depressed coordinates X = x + a2/3; the component is
  read from the leading coefficients (see ``_additive_component``).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .funcfield import INF, Ball, Place, Poly, common_root_count, is_zero
from .kodaira import FiberData, KodairaType, local_type
from .mwsections import SectionPoint
from .numtower import TowerElement
from .weierstrass import (WeierstrassModel, depressed, infinity_chart, transport_point,
                          zero_chart)


class UnsupportedFiberGeometry(ValueError):
    pass


# ------------------------------------------------------------ series helpers

def _mul_trunc(a: Poly, b: Poly, T: int) -> Poly:
    out: dict = {}
    for e1, c1 in a.terms.items():
        for e2, c2 in b.terms.items():
            e = e1 + e2
            if e < T:
                p = c1 * c2
                out[e] = out[e] + p if e in out else p
    return Poly(out)


def _sqrt_one_plus(h: Poly, T: int) -> Poly:
    """sqrt(1 + h) mod s^T for h with h(0) = 0 (binomial series)."""
    if h.is_zero():
        return Poly({0: Fraction(1)})
    if h.low < 1:
        raise ValueError("h must vanish at 0")
    out = Poly({0: Fraction(1)})
    term = Poly({0: Fraction(1)})
    coef = Fraction(1)
    k = 0
    while True:
        k += 1
        term = _mul_trunc(term, h, T)
        if term.is_zero():
            break
        coef = coef * (Fraction(1, 2) - (k - 1)) / k
        out = out + term * coef
    return out


def _rational_sqrt(c):
    """sqrt of an exact rational constant, or None."""
    if isinstance(c, TowerElement):
        if not c.is_rational():
            return None
        c = c.to_fraction()
    if isinstance(c, Ball):
        return None
    c = Fraction(c)
    if c <= 0:
        return None
    import math

    n, d = math.isqrt(c.numerator), math.isqrt(c.denominator)
    if n * n == c.numerator and d * d == c.denominator:
        return Fraction(n, d)
    return None


def _const(p: Poly):
    return p.coeff(0) if p.coeff(0) is not None else 0


def _embed(c) -> complex:
    if isinstance(c, (int, Fraction)):
        return complex(c)
    return complex(c)


# ------------------------------------------------------------ local charts

@dataclass
class LocalChart:
    place: Place
    model: WeierstrassModel
    fiber: KodairaType
    _cache: dict = field(default_factory=dict)

    @property
    def N(self) -> int:
        return self.fiber.n if self.fiber.symbol == "I" else 0


def local_charts(model: WeierstrassModel) -> dict:
    got = getattr(model, "_charts", None)
    if got is not None:
        return got
    z = zero_chart(model)
    i = infinity_chart(model)
    charts = {
        "zero": LocalChart(Place.finite(0), z, local_type(z)),
        "infinity": LocalChart(Place.infinity(), i, local_type(i)),
    }
    model._charts = charts
    return charts


def _local_xy(p: SectionPoint, chart: LocalChart):
    return transport_point(p.x, p.y, chart.model.chart)


def _meets_zero_section(x: Poly, y: Poly) -> int:
    """Local multiplicity against O: the pole order of x is 2k."""
    ox = x.low
    if ox == INF or ox >= 0:
        return 0
    if ox % 2:
        raise UnsupportedFiberGeometry("odd pole order of x")
    return -ox // 2


def _through_singular_point(x: Poly, y: Poly, chart: LocalChart) -> bool:
    t = chart.fiber
    if t.epsilon == 0 or (t.symbol == "I" and t.n == 1) or t.symbol in ("II", "II*"):
        return False
    if x.low < 0:
        return False
    if t.symbol == "I":
        xi0 = _node_x0(chart)
        return is_zero(_const(x) - xi0) and y.low >= 1
    a2 = chart.model.a2
    X0 = _const(x) + _const(a2) * Fraction(1, 3)
    return is_zero(X0) and y.low >= 1


# ------------------------------------------------------------ I_N components

def _node_x0(chart: LocalChart):
    """x-coordinate of the node of the reduced cubic (double root)."""
    got = chart._cache.get("x0")
    if got is not None:
        return got
    a2, a4, a6 = (Fraction(0) if _const(c) == 0 else _const(c) for c in chart.model.coefficients())
    A, B = (_const(c) for c in depressed(chart.model))
    if is_zero(A):
        raise UnsupportedFiberGeometry("cusp where a node was expected")
    X0 = -3 * B / (2 * A) if not is_zero(B) else 0 * A
    x0 = X0 - a2 * Fraction(1, 3)
    chart._cache["x0"] = x0
    return x0


def _branch_V(x: Poly, y: Poly, chart: LocalChart, T: int) -> Poly:
    """V = y + (x - xi) sqrt(G) mod s^T."""
    key = ("xi", T)
    model = chart.model
    a2, a4 = model.a2.truncate(T), model.a4.truncate(T)
    xi = chart._cache.get(key)
    x0 = _node_x0(chart)
    if xi is None:
        # xi = (-a2 + sqrt(a2^2 - 3 a4)) / 3 with xi(0) = x0
        disc = _mul_trunc(a2, a2, T) - a4 * 3
        c0 = _const(disc)
        r0 = _rational_sqrt(c0)
        if r0 is None:
            raise UnsupportedFiberGeometry("critical point needs an irrational square root")
        root = _sqrt_one_plus((disc - Poly({0: c0})) * (1 / Fraction(c0) if isinstance(c0, Fraction) else 1 / c0.to_fraction()), T) * r0
        cand = (root - a2) * Fraction(1, 3)
        if not is_zero(_const(cand) - x0):
            cand = (-root - a2) * Fraction(1, 3)
        xi = cand
        chart._cache[key] = xi
    G = (x + xi * 2 + a2).truncate(T)
    g0 = _const(G)
    r0 = _rational_sqrt(g0)
    if r0 is None:
        raise UnsupportedFiberGeometry("node tangent slope is not rational")
    g0f = Fraction(g0) if not isinstance(g0, TowerElement) else g0.to_fraction()
    sq = _sqrt_one_plus((G - Poly({0: g0})) * (1 / g0f), T) * r0
    return (y + _mul_trunc(x - xi, sq, T)).truncate(T)


def _multiplicative_component(x, y, chart: LocalChart) -> int:
    N = chart.N
    V = _branch_V(x, y, chart, N + 1)
    k = V.low
    if k == INF or k >= N:
        return 0
    return k


# ------------------------------------------------------------ additive components

def _depressed_xy(x: Poly, chart: LocalChart):
    return x + chart.model.a2 * Fraction(1, 3)


def _principal_sqrt_sign(val, sq_of) -> int:
    """+1 if val is the principal square root of sq_of, else -1."""
    v = _embed(val)
    import cmath

    r = cmath.sqrt(_embed(sq_of))
    if abs(v - r) < abs(v + r):
        return 1
    return -1


def _additive_component(x: Poly, y: Poly, chart: LocalChart) -> int:
    t = chart.fiber
    X = _depressed_xy(x, chart)
    A, B = depressed(chart.model)
    if t.symbol == "III":
        return 1
    if t.symbol == "III*":
        return 6
    if t.symbol == "IV":
        # y = s y1, y1(0)^2 = (B/s^2)(0)
        y1 = y.coeff(1)
        return 1 if _principal_sqrt_sign(y1, B.coeff(2)) > 0 else 2
    if t.symbol == "IV*":
        if X.low < 2:
            raise UnsupportedFiberGeometry("IV* section with ord X < 2")
        y2 = y.coeff(2)
        return 1 if _principal_sqrt_sign(y2, B.coeff(4)) > 0 else 5
    if t.symbol == "I*" and t.n == 0:
        alpha = X.coeff(1)
        roots = _d4_roots(chart)
        z = _embed(alpha if alpha is not None else 0)
        best = min(range(3), key=lambda i: abs(roots[i] - z))
        return best + 1
    raise UnsupportedFiberGeometry(f"component incidence on {t.name} not supported")


def _d4_roots(chart: LocalChart):
    got = chart._cache.get("d4")
    if got is not None:
        return got
    import mpmath

    A, B = depressed(chart.model)
    a = _embed(A.coeff(2) or 0)
    b = _embed(B.coeff(3) or 0)
    roots = [complex(r) for r in mpmath.polyroots([1, 0, a, b])]
    roots.sort(key=lambda z: (round(z.real, 9), round(z.imag, 9)))
    chart._cache["d4"] = roots
    return roots


# ------------------------------------------------------------ public API

def _chart_for(place: Place, model: WeierstrassModel) -> LocalChart:
    charts = local_charts(model)
    return charts["infinity"] if place.kind == "infinity" else charts["zero"]


def component_at(p: SectionPoint, place: Place, fiber: FiberData | None = None,
                 model: WeierstrassModel | None = None) -> int:
    """Index of the fiber component met by p (0 = identity component)."""
    if model is None:
        raise ValueError("model is required")
    if place.kind == "finite" and not place.is_zero():
        return 0
    chart = _chart_for(place, model)
    x, y = _local_xy(p, chart)
    if not _through_singular_point(x, y, chart):
        return 0
    if chart.fiber.symbol == "I":
        return _multiplicative_component(x, y, chart)
    return _additive_component(x, y, chart)


def _local_pair(p: SectionPoint, q: SectionPoint, chart: LocalChart) -> int:
    xp, yp = _local_xy(p, chart)
    xq, yq = _local_xy(q, chart)
    op, oq = _meets_zero_section(xp, yp), _meets_zero_section(xq, yq)
    if op and oq:
        # local fiber parameter near O is w = x / y
        num = xp * yq - xq * yp
        return num.low - yp.low - yq.low
    if op or oq:
        return 0
    sp, sq = _through_singular_point(xp, yp, chart), _through_singular_point(xq, yq, chart)
    if not sp and not sq:
        return min((xp - xq).low, (yp - yq).low)
    if sp != sq:
        return 0
    if chart.fiber.symbol == "I":
        N = chart.N
        T = N + 4 * max(xp.degree, xq.degree, yp.degree, yq.degree, 1) + 16
        Vp, Vq = _branch_V(xp, yp, chart, T), _branch_V(xq, yq, chart, T)
        kp = Vp.low
        kq = Vq.low
        if kp != kq:
            return 0
        d = (Vp - Vq).low
        if d == INF:
            raise UnsupportedFiberGeometry("truncation too short to separate the sections")
        return d - kp
    kp, kq = _additive_component(xp, yp, chart), _additive_component(xq, yq, chart)
    if kp != kq:
        return 0
    dx, dy = (xp - xq).low, (yp - yq).low
    shift = {"III": ("y", 1), "IV": ("x", 1), "I*": ("y", 2), "IV*": ("x", 2), "III*": ("y", 3)}
    which, s = shift[chart.fiber.symbol]
    return (dy if which == "y" else dx) - s


def pair_intersection(p: SectionPoint, q: SectionPoint, model: WeierstrassModel) -> int:
    """(P).(Q) on the smooth model, for distinct sections."""
    dx, dy = p.x - q.x, p.y - q.y
    if dx.is_zero() and dy.is_zero():
        raise ValueError("identical sections")
    finite = common_root_count(dx, dy, exclude_zero=True)
    charts = local_charts(model)
    return finite + _local_pair(p, q, charts["zero"]) + _local_pair(p, q, charts["infinity"])


def zero_section_intersection(p: SectionPoint, model: WeierstrassModel) -> int:
    if p.x.low < 0 or p.y.low < 0:
        raise ValueError("catalog points are polynomial in the finite chart")
    total = 0
    for chart in local_charts(model).values():
        x, y = _local_xy(p, chart)
        total += _meets_zero_section(x, y)
    return total


@dataclass
class IncidenceProfile:
    section: SectionPoint
    components: dict  # place kind -> component index
    pair_numbers: dict  # label or 'O' -> int


def incidence_profiles(points: list, model: WeierstrassModel) -> list:
    out = []
    nums = {}
    for i, p in enumerate(points):
        for j in range(i + 1, len(points)):
            nums[(i, j)] = nums[(j, i)] = pair_intersection(p, points[j], model)
    for i, p in enumerate(points):
        comps = {k: component_at(p, c.place, model=model) for k, c in local_charts(model).items()}
        pn = {"O": zero_section_intersection(p, model)}
        for j, q in enumerate(points):
            if j != i:
                pn[(q.d, q.j)] = nums[(i, j)]
        out.append(IncidenceProfile(p, comps, pn))
    return out
