"""Admissible sets, the Mordell-Weil rank formula and the explicit section
catalogs of the five families.

Points with closed-form coefficients are built exactly in a number tower.
The points whose coefficients come from tables (family 1 with d in
{8, 12, 18, 20}, family 2 with d in {8, 9, 12, 20}) and the degree-42 system
are computed numerically: the tabled values seed a Newton iteration on the
coefficient equations and the converged solution is certified by interval
evaluation of the curve residual.
"""
from __future__ import annotations

import cmath
import math
from fractions import Fraction
from dataclasses import dataclass, field
from functools import lru_cache

import flint
import mpmath
import numpy as np

from .funcfield import Ball, Poly, PrecisionExhausted
from .numtower import TowerSpec
from .weierstrass import WeierstrassModel

ADMISSIBLE = {
    1: (1, 2, 3, 7, 8, 10, 12, 15, 18, 20, 42),
    2: (1, 2, 5, 6, 8, 9, 12, 14, 20, 21, 30),
    3: (2,),
    4: (2, 3, 4, 5),
    5: (2, 3),
}

# (family, d) pairs whose points are numeric (certified) rather than exact
NUMERIC_POINTS = {(1, 8), (1, 12), (1, 18), (1, 20), (1, 42), (2, 8), (2, 9), (2, 12), (2, 20), (2, 21)}


class RootSelectionFailed(RuntimeError):
    pass


class NoSolutionFound(RuntimeError):
    pass


@dataclass(frozen=True)
class AdmissibleSet:
    family: int
    members: tuple

    def __contains__(self, d):
        return d in self.members

    def __iter__(self):
        return iter(self.members)


def admissible_set(family: int) -> AdmissibleSet:
    if family not in ADMISSIBLE:
        raise ValueError("family must be 1..5")
    return AdmissibleSet(family, ADMISSIBLE[family])


def is_admissible_ex1(d: int) -> bool:
    """True iff every j with 9d <= 12j <= 10d shares a factor with d."""
    if d < 1:
        raise ValueError("d must be positive")
    lo = -(-9 * d // 12)
    hi = 10 * d // 12
    return all(math.gcd(j, d) > 1 for j in range(lo, hi + 1))


def euler_phi(n: int) -> int:
    # trial division is plenty at this scale
    out, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            out -= out // p
        p += 1
    if m > 1:
        out -= out // m
    return out


def divisors(n: int) -> list:
    small = [d for d in range(1, math.isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def units(d: int) -> list:
    return [j for j in range(1, d + 1) if math.gcd(j, d) == 1] if d > 1 else [1]


def mw_rank(family: int, n: int) -> int:
    if n < 1:
        raise ValueError("n must be positive")
    adm = ADMISSIBLE[family]
    return sum(euler_phi(d) for d in divisors(n) if d in adm)


@dataclass
class SectionPoint:
    x: Poly
    y: Poly
    family: int
    d: int
    j: int
    exactness: str = "exact-tower"  # or 'certified-numeric'
    precision: int | None = None
    note: str = ""
    n: int | None = None  # the surface the point currently lives on
    meta: dict = field(default_factory=dict)

    @property
    def label(self) -> str:
        return f"P_{self.d},{self.j}"

    def pullback(self, n: int) -> "SectionPoint":
        if n % self.d:
            raise ValueError(f"{self.d} does not divide {n}")
        e = n // (self.n or self.d)
        return SectionPoint(self.x.substitute_power(e), self.y.substitute_power(e), self.family, self.d,
                            self.j, self.exactness, self.precision, self.note, n, self.meta)

    def is_exact(self) -> bool:
        return self.exactness == "exact-tower"


# ------------------------------------------------------------ exact points

class _Gen:
    """Shorthand constructors inside one tower."""

    def __init__(self, N: int, radicals=()):
        self.K = TowerSpec(N, tuple(radicals))

    def z(self, m, e=1):
        return self.K.root_of_unity(m, e)

    @property
    def i(self):
        return self.K.root_of_unity(4, 1)

    def root(self, p, num, den):
        # p^(num/den), real and positive
        return self.K.radical(p, den) ** num

    def q(self, v):
        return self.K.rational(v)

    def poly(self, terms: dict) -> Poly:
        return Poly({e: (c if not isinstance(c, (int,)) else self.q(c)) for e, c in terms.items()})


def _exact_family4(d, j):
    if d == 2:
        g = _Gen(1)
        return g.poly({}), g.poly({1: -1})
    if d == 3:
        g = _Gen(3)
        c = -g.z(3, j)
        return g.poly({1: c}), g.poly({1: c})
    if d == 4 and j == 1:
        g = _Gen(8, [(2, 2)])
        s2 = g.K.radical(2, 2)
        return g.poly({1: s2, 2: 2}), g.poly({1: s2, 2: 3, 3: 2 * s2})
    if d == 4 and j == 3:
        g = _Gen(8)
        # (-1)^(1/4) = zeta_8^5; with zeta_8 itself the section meets P_{4,1} at t^4 = -4
        w = g.z(8, 5)
        return g.poly({0: -2, 1: 2 * w}), g.poly({0: -2 * g.i, 1: 4 * g.i * w, 2: 1})
    if d == 5:
        g = _Gen(5, [(2, 5)])
        c = g.root(2, -2, 5) * g.z(5, 2 * j)
        return g.poly({2: c}), g.poly({2: c, 3: g.root(2, -3, 5) * g.z(5, 3 * j)})
    raise KeyError((4, d, j))


def _exact_family5(d, j):
    if d == 2:
        g = _Gen(4)
        return g.poly({1: g.i}), g.poly({1: g.i})
    if d == 3:
        g = _Gen(3, [(2, 3)])
        c = g.root(2, 2, 3) * g.z(3, j)
        return g.poly({1: c}), g.poly({1: c, 2: g.root(2, 1, 3) * g.z(3, 2 * j)})
    raise KeyError((5, d, j))


def _exact_family3(d, j):
    if d == 2:
        g = _Gen(8, [(2, 2)])
        c = g.K.radical(-2, 2) * g.q(Fraction(1, 4))
        return g.poly({2: g.q(Fraction(-1, 2))}), g.poly({3: c})
    raise KeyError((3, d, j))


def _exact_family1(d, j):
    if d == 1:
        g = _Gen(4)
        return g.poly({0: -1}), g.poly({0: g.i})
    if d == 2:
        g = _Gen(4)
        return g.poly({1: g.i}), g.poly({1: -1})
    if d == 3:
        g = _Gen(12)
        return g.poly({1: -g.z(3, j)}), g.poly({2: g.i * g.z(3, 2 * j)})
    if d == 7:
        g = _Gen(28)
        z = lambda e: g.z(7, e * j)
        return (g.poly({2: -z(2), 3: -z(3)}),
                g.poly({3: g.i * z(3), 4: g.i * z(4), 5: g.i * z(5)}))
    if d == 10:
        g = _Gen(10, [(2, 5)])
        z = lambda e: g.z(10, e * j)
        return (g.poly({4: g.root(2, 2, 5) * z(4)}),
                g.poly({5: -z(5), 7: -g.root(2, 1, 5) * z(7)}))
    if d == 15:
        g = _Gen(60, [(3, 5)])
        z = lambda e: g.z(15, e * j)
        r = lambda k: g.root(3, k, 5)
        x = g.poly({5: -z(5), 6: -r(1) * z(6), 7: -r(2) * z(7)})
        y = g.poly({8: g.i * r(3) * z(8), 9: g.i * r(4) * z(9), 10: g.i * 2 * z(10), 11: g.i * r(1) * z(11)})
        return x, y
    raise KeyError((1, d, j))


def _exact_family2(d, j):
    if d == 1:
        g = _Gen(1)
        return g.poly({}), g.poly({1: -1})
    if d == 2:
        g = _Gen(4)
        return g.poly({1: g.i}), g.poly({2: -1})
    if d == 5:
        g = _Gen(5, [(2, 5)])
        return (g.poly({3: g.root(2, 2, 5) * g.z(5, 3 * j)}),
                g.poly({4: -g.root(2, 1, 5) * g.z(5, 4 * j), 5: -1}))
    if d == 6:
        g = _Gen(12)
        return g.poly({4: -g.z(6, 4 * j)}), g.poly({5: g.i * g.z(6, 5 * j)})
    if d == 14:
        g = _Gen(28)
        z = lambda e: g.z(14, e * j)
        return (g.poly({8: -z(8), 10: -z(10)}),
                g.poly({11: g.i * z(11), 13: g.i * z(13), 15: g.i * z(15)}))
    if d == 30:
        g = _Gen(60, [(3, 5)])
        z = lambda e: g.z(30, e * j)
        r = lambda k: g.root(3, k, 5)
        x = g.poly({16: -r(2) * z(16), 18: -r(1) * z(18), 20: -z(20)})
        y = g.poly({23: g.i * r(1) * z(23), 25: g.i * 2 * z(25), 27: g.i * r(4) * z(27), 29: g.i * r(3) * z(29)})
        return x, y
    raise KeyError((2, d, j))


_EXACT = {1: _exact_family1, 2: _exact_family2, 3: _exact_family3, 4: _exact_family4, 5: _exact_family5}


def exact_point(family: int, d: int, j: int) -> SectionPoint:
    x, y = _EXACT[family](d, j)
    return SectionPoint(x, y, family, d, j, n=d)


# ------------------------------------------------------------ catalogs

def catalog_points(family: int, n: int, precision: int = 256, overrides=None) -> list:
    """The r(n) points P_{d,j}, d | n admissible, j a unit mod d, on the n-th surface.

    ``overrides`` maps (degree, class) to rough coefficients and replaces the
    default branch choice for the numeric points built from that class.
    """
    out = []
    for d in divisors(n):
        if d not in ADMISSIBLE[family]:
            continue
        for j in units(d):
            base = _point(family, d, j, precision, overrides or {})
            out.append(base.pullback(n) if n != d else base)
    return out


def _point(family, d, j, precision, overrides):
    if (family, d) in NUMERIC_POINTS:
        return numeric_point(family, d, j, precision, overrides.get(branch_class(family, d, j)))
    return exact_point(family, d, j)


# ------------------------------------------------------------ numeric points

@dataclass(frozen=True)
class CoefficientShape:
    """Unknown coefficients of x = sum a_k t^ex[k], y = sum b_k t^ey[k] on
    y^2 = x^3 + t^n x + t^n (family 1, n = d)."""

    ex: tuple
    ey: tuple
    n: int

    @property
    def size(self) -> int:
        return len(self.ex) + len(self.ey)

    def support(self) -> list:
        sup = {e1 + e2 for e1 in self.ey for e2 in self.ey}
        sup |= {e1 + e2 + e3 for e1 in self.ex for e2 in self.ex for e3 in self.ex}
        sup |= {e + self.n for e in self.ex} | {self.n}
        return sorted(sup)

    def _dense(self, exps, coeffs, size):
        out = [mpmath.mpc(0)] * size
        for e, c in zip(exps, coeffs):
            out[e] += c
        return out

    def residual(self, v) -> list:
        k = len(self.ex)
        top = max(self.support()) + 1
        x = self._dense(self.ex, v[:k], top)
        y = self._dense(self.ey, v[k:], top)
        yy, xx = _conv(y, y, top), _conv(x, x, top)
        xxx = _conv(xx, x, top)
        R = [yy[i] - xxx[i] for i in range(top)]
        for i in range(top - self.n):
            R[i + self.n] -= x[i]
        R[self.n] -= 1
        return [R[s] for s in self.support()]

    def jacobian(self, v) -> list:
        k = len(self.ex)
        sup = self.support()
        top = max(sup) + 1
        x = self._dense(self.ex, v[:k], top)
        y = self._dense(self.ey, v[k:], top)
        # dR/da_i = -(3x^2 + t^n) t^ex[i], dR/db_i = 2y t^ey[i]
        g = [3 * c for c in _conv(x, x, top)]
        g[self.n] += 1
        cols = []
        for e in self.ex:
            cols.append([-(g[s - e] if s >= e else 0) for s in sup])
        for e in self.ey:
            cols.append([2 * y[s - e] if s >= e else mpmath.mpc(0) for s in sup])
        return [[cols[c][r] for c in range(len(cols))] for r in range(len(sup))]


def _conv(a, b, top):
    out = [mpmath.mpc(0)] * top
    nz = [(i, c) for i, c in enumerate(a) if c != 0]
    for j, d in enumerate(b):
        if d == 0:
            continue
        for i, c in nz:
            if i + j < top:
                out[i + j] += c * d
    return out


SHAPES = {
    8: CoefficientShape((2, 3, 4), (3, 4, 5, 6), 8),
    12: CoefficientShape((4, 5, 6), (6, 7, 8, 9), 12),
    18: CoefficientShape((6, 8, 10), (9, 11, 13, 15), 18),
    20: CoefficientShape((6, 8, 10), (9, 11, 13, 15), 20),
    42: CoefficientShape((14, 16, 18, 20, 22), (21, 23, 25, 27, 29, 31, 33), 42),
}


def gauss_newton(shape: CoefficientShape, seed, prec: int = 256, maxit: int = 200, active=None, tol_bits=None):
    """Damped Gauss-Newton from ``seed``; returns (solution, last step norm).

    Unknowns outside ``active`` are held at zero.
    """
    n = shape.size
    act = list(range(n)) if active is None else list(active)
    tol_bits = prec if tol_bits is None else tol_bits
    with mpmath.workprec(prec + 32):
        v = [mpmath.mpc(c) if i in act else mpmath.mpc(0) for i, c in enumerate(seed)]
        tol = mpmath.mpf(2) ** (-tol_bits)
        step_tol = mpmath.mpf(2) ** (-tol_bits + 16)
        step = mpmath.inf
        fnorm = mpmath.norm(shape.residual(v))
        for _ in range(maxit):
            if fnorm < tol and step < step_tol:
                return v, step
            full = shape.jacobian(v)
            J = mpmath.matrix([[row[i] for i in act] for row in full])
            f = mpmath.matrix(shape.residual(v))
            try:
                if J.rows == J.cols:
                    dv = mpmath.lu_solve(J, -f)
                else:
                    JH = J.H
                    dv = mpmath.lu_solve(JH * J, -(JH * f))
            except ZeroDivisionError:
                raise NoSolutionFound("singular Jacobian")
            lam = mpmath.mpf(1)
            while True:
                w = list(v)
                for k, i in enumerate(act):
                    w[i] = v[i] + lam * dv[k]
                wn = mpmath.norm(shape.residual(w))
                if wn < fnorm or lam < mpmath.mpf(2) ** -20:
                    break
                lam /= 2
            step = mpmath.norm(dv) * lam
            v, fnorm = w, wn
            if mpmath.norm(v) > 10 ** 6:
                raise NoSolutionFound("iteration diverged")
        if fnorm < tol:
            return v, step
        raise NoSolutionFound(f"no convergence (residual {mpmath.nstr(fnorm, 5)})")


def refine(shape: CoefficientShape, seed, prec: int = 256):
    """Converge from ``seed`` and polish at ``prec`` bits.

    Coefficients that vanish at low precision are set to exact zero; the
    remaining system is regular at the solution, so the polish converges
    quadratically.  Returns (coefficients, step, active indices).
    """
    given = [i for i, c in enumerate(seed) if c != 0]
    rough, _ = gauss_newton(shape, seed, 64, maxit=300, tol_bits=40, active=given)
    scale = max(1, max(abs(c) for c in rough))
    order = sorted(range(shape.size), key=lambda i: abs(rough[i]))
    # singular roots converge slowly along vanishing coordinates; drop the
    # smallest coordinates until the reduced system is regular
    zeros = {i for i in order if abs(rough[i]) < 1e-7 * scale or i not in given}
    for i in [None] + [i for i in order if i not in zeros and abs(rough[i]) < 1e-2 * scale]:
        if i is not None:
            zeros.add(i)
        active = [k for k in range(shape.size) if k not in zeros]
        try:
            v, step = gauss_newton(shape, rough, prec, maxit=60, active=active)
        except NoSolutionFound:
            continue
        return v, step, tuple(active)
    raise NoSolutionFound("polish failed for every zero pattern")


def _mpf_to_arb(x) -> flint.arb:
    if not isinstance(x, mpmath.mpf):
        x = mpmath.mpf(x)
    if x == 0:
        return flint.arb(0)
    sign, m, e, _ = x._mpf_
    return flint.arb(-int(m) if sign else int(m)) * flint.arb(2) ** int(e)


def _ball_coeffs(v, step, prec):
    # radius covers the Newton step and the working precision
    with mpmath.workprec(64):
        rad = _mpf_to_arb(max(step * 4, mpmath.mpf(2) ** (-prec + 8)))
    return [Ball(flint.acb(flint.arb(_mpf_to_arb(c.real).mid(), rad), flint.arb(_mpf_to_arb(c.imag).mid(), rad)))
            for c in v]


# ------------------------------------------------------------ tabled seeds
#
# Every coefficient given as "a root of ..." or as a fractional power is
# expanded over all of its branches.  The seeds only need to land in the
# basin of the intended solution; the curve equation decides the rest.

def _branches(z, k):
    r = z ** (1 / k) if z != 0 else 0
    w = cmath.exp(2j * cmath.pi / k)
    return [r * w ** m for m in range(k)]


def _roots(coeffs):
    """Numeric roots of sum coeffs[i] z^i."""
    with mpmath.workdps(30):
        return [complex(r) for r in mpmath.polyroots(list(reversed(coeffs)), maxsteps=200, extraprec=60)]


def _seeds_8(j):
    i, s2, z8 = 1j, math.sqrt(2), cmath.exp(1j * math.pi / 4)
    if j == 1:
        return [[2 ** -0.5, 0, 0, 2 ** -0.75, 0, 2 ** -0.25, 0]]
    if j == 3:
        return [[-s2, 2 ** 0.75, -1, -(2 ** 0.75) * i, 3 * i, -(2 ** 0.75) * i, cmath.sqrt(-2)]]
    if j == 5:
        c = i + z8 + 1
        return [[c, 0, i, r, 0, 0, (3 * z8 * (i - 1) - 4) / r] for r in _branches(c ** 3, 2)]
    out = []
    for a2 in _branches(-2 * s2 - 3, 2):
        for q in _branches(a2, 4):
            for u in _branches(2 * s2 + 2 * (s2 + 1) ** 0.25, 2):
                for w in _branches(2 * s2 + 2 * (s2 - 1) ** 0.25, 2):
                    out.append([0, q * (2 ** 2.5 + 4), a2, 0, 1, q ** 3 * u, q ** 6 * w])
    return out


def _b_12(a0, a1, a2, S):
    h = a2 ** 3 + a2
    b3 = S
    b2 = a1 * (3 * a2 ** 2 + 1) / S
    b1 = (4 * a0 * a2 * (a2 ** 2 + 1) * (3 * a2 ** 2 + 1) + a1 ** 2 * (3 * a2 ** 4 + 6 * a2 ** 2 - 1)) / (8 * h * S)
    b0 = (4 * a0 * a1 * a2 * (a2 ** 2 + 1) * (3 * a2 ** 4 + 6 * a2 ** 2 - 1)
          - a1 ** 3 * (a2 ** 2 - 1) * (a2 ** 4 + 6 * a2 ** 2 + 1)) / (16 * h ** 2 * S)
    return [b0, b1, b2, b3]


def _seeds_12(j):
    out = []
    small = cmath.sqrt(2 / 3 * math.sqrt(3) - 1)
    if j == 1:
        a2s = _branches(2 * math.sqrt(3) + 3, 2)
    else:
        a2s = _branches(small ** 2, 2)
    for a2 in a2s:
        if j == 1:
            triples = [(-a1 ** 2 * a2 * (-33 + 5 * a2 ** 2) / 12, a1, a2)
                       for a1 in _roots([180 * a2 + 388 * a2 ** 3, 0, 0, 0, 0, 0, 1])]
        elif j == 11:
            triples = [(a1 ** 2 * a2 * (5 + 3 * a2 ** 2) / 4, a1, a2)
                       for a1 in _roots([-12 * a2 + 36 * a2 ** 3, 0, 0, 0, 0, 0, 1])]
        else:
            triples = [(-1 if j == 5 else (1 + cmath.sqrt(-3)) / 2, 0, a2)]
        for a0, a1, a2_ in triples:
            for S in _branches(a2_ ** 3 + a2_, 2):
                out.append([a0, a1, a2_] + _b_12(a0, a1, a2_, S))
    return out


def _seeds_18(j):
    """Seeds for the untwisted coefficients (P_{18,j}(t) = B(zeta_18^j t))."""
    out = []
    if j in (1, 11):
        return [[0, -(2 ** 0.4) * 3 ** -0.2, 2 ** -0.4 * 3 ** -0.4, 1, 0, 0, -(2 ** (-1 / 3)) / 3]]
    if j in (5, 13):
        for b0 in _roots([9, -9, -9, 1]):
            for b1 in _roots([8919936 - 8011872 * b0 - 9735552 * b0 ** 2] + [0] * 8 + [1]):
                b2 = b1 ** 2 * (-45 - 15 * b0 + 2 * b0 ** 2) / 36
                out.append([2 * b1 * b2 - b2 ** 6, b2 ** 2, 0, b0, b1, b2, 0])
        return out
    for a0 in _branches(-4, 3):
        for a1 in _roots([4, 0, 0, 3 * a0 ** 2, 0, 0, 6 * a0, 0, 0, 1]):
            a2 = -a1 ** 2 * (5 * a0 ** 2 + 6 * a0 * a1 ** 3 + a1 ** 6) / 12
            if a2 == 0:
                continue
            for h in _branches(a2, 2):
                b3 = h ** 3
                b2 = (3 * a1 * a2 ** 2 + a2) / (2 * h ** 3)
                b1 = (12 * a0 * a2 ** 3 + 3 * a1 ** 2 * a2 ** 2 - 2 * a1 * a2 - 1) / (8 * h ** 5)
                b0 = ((12 * a1 * a2 ** 4 - 4 * a2 ** 3) * a0 - a1 ** 3 * a2 ** 3 + 3 * a1 ** 2 * a2 ** 2
                      + 5 * a1 * a2 + 1) / (16 * h ** 9)
                out.append([a0, a1, a2, b0, b1, b2, b3])
    return out


def _b_20(a0, a1, a2, h):
    # h is a branch of a0^(1/2)
    b0 = h ** 3
    b1 = (3 * a0 ** 2 * a1 + 1) / h ** 3
    b2 = (12 * a0 ** 5 * a2 + 3 * a0 ** 4 * a1 ** 2 - 6 * a0 ** 2 * a1 - 1) / (8 * h ** 9)
    b3 = (12 * (a0 ** 4 * a1 - a0 ** 3) * a2 - a0 ** 3 * a1 ** 3 + 15 * a0 ** 4 * a1 ** 2 + 9 * a0 ** 2 * a1
          + 1) / (16 * h ** 15)
    return [b0, b1, b2, b3]


def _seeds_20(j):
    out = []
    if j in (1, 3, 7, 9):
        for a2 in _roots([1, 0, 2, 0, 5]):
            for a1 in _roots([56 - 328 * a2 ** 2, 0, 0, 0, 0, -2500 * a2 ** 2, 0, 0, 0, 0, 625]):
                a0 = a1 ** 2 * a2 * (172 - 220 * a2 ** 2 + 117 * a1 ** 5 + 205 * a1 ** 5 * a2 ** 2) / 80
                out.extend([a0, a1, a2] + _b_20(a0, a1, a2, h) for h in _branches(a0, 2) if a0 != 0)
    else:
        for a2 in _roots([1, 0, -52, 0, -26, 0, 12, 0, 1]):
            for a1 in _roots([1 - 45 * a2 ** 2 - 15 * a2 ** 4 + 15 * a2 ** 6, 0, 0, 0, 0, 1]):
                a0 = -a1 ** 2 * a2 * (-191 - 188 * a2 ** 2 + 69 * a2 ** 4 + 6 * a2 ** 6) / 16
                out.extend([a0, a1, a2] + _b_20(a0, a1, a2, h) for h in _branches(a0, 2) if a0 != 0)
    return out


TABLE_SEEDS = {8: _seeds_8, 12: _seeds_12, 18: _seeds_18, 20: _seeds_20}


# ------------------------------------------------------------ solution pools

POOL_STARTS = 1500
CLASSES = {
    18: {1: 1, 11: 1, 5: 5, 13: 5, 7: 7, 17: 7},
    20: {1: 1, 3: 1, 7: 1, 9: 1, 11: 11, 13: 11, 17: 11, 19: 11},
}
# tie-breaks among equally table-consistent branches, as found by
# nslattice.select_branches(18, [(1, 18, 'q'), (2, 9, 'z')]); the default
# (first) branches make P_{18,j} dependent
TIE_HINTS = {
    (18, 5): (-2.28537 - 3.958376j, -2.948519 - 1.073173j, 0, 9.822948, 7.668215 - 6.434397j,
              0.307595 - 1.744458j, 0),
    (18, 7): (-1.587401, -0.71127, -0.681112, -1.732051j, -1.552166j, -1.486355j, -0.562119j),
}


def _np_system(shape: CoefficientShape, v):
    sup = shape.support()
    top = max(sup) + 1
    k = len(shape.ex)
    x = np.zeros(top, complex)
    y = np.zeros(top, complex)
    x[list(shape.ex)] = v[:k]
    y[list(shape.ey)] = v[k:]
    xx = np.convolve(x, x)[:top]
    R = np.convolve(y, y)[:top] - np.convolve(xx, x)[:top]
    R[shape.n:] -= x[:top - shape.n]
    R[shape.n] -= 1
    g = 3 * xx
    g[shape.n] += 1
    J = np.zeros((len(sup), shape.size), complex)
    for c, e in enumerate(shape.ex):
        J[:, c] = [-g[s - e] if s >= e else 0 for s in sup]
    for c, e in enumerate(shape.ey):
        J[:, k + c] = [2 * y[s - e] if s >= e else 0 for s in sup]
    return R[sup], J


def _np_newton(shape, v, maxit=100, active=None):
    v = np.array(v, complex)
    act = np.arange(shape.size) if active is None else np.array(active)
    for _ in range(maxit):
        R, J = _np_system(shape, v)
        if np.linalg.norm(R) < 1e-13:
            return v
        dv = np.linalg.lstsq(J[:, act], -R, rcond=None)[0]
        v[act] += dv
        if not np.all(np.isfinite(v)) or np.linalg.norm(v) > 1e4:
            return None
    R, _ = _np_system(shape, v)
    return v if np.linalg.norm(R) < 1e-8 else None


def _np_solve(shape, seed):
    """Rough solution with vanishing coordinates snapped to zero."""
    v = _np_newton(shape, seed)
    if v is None:
        return None
    scale = max(1.0, float(np.max(np.abs(v))))
    small = np.abs(v) < 1e-4 * scale
    if not small.any():
        return v
    w = np.where(small, 0, v)
    w = _np_newton(shape, w, 30, active=np.flatnonzero(~small))
    return w if w is not None else v


def _symmetries(shape: CoefficientShape, v):
    # t -> zeta_n t, P -> -P and complex conjugation preserve the curve
    k = len(shape.ex)
    z = np.exp(2j * np.pi / shape.n)
    rot = np.array([z ** e for e in shape.ex + shape.ey])
    neg = np.concatenate([v[:k], -v[k:]])
    return [v * rot, neg, np.conj(v)]


@lru_cache(maxsize=None)
def solution_pool(d: int) -> tuple:
    """Low-precision solutions of the coefficient system for degree d.

    Table seeds plus a fixed multistart, closed under the curve's symmetries.
    """
    shape = SHAPES[d]
    rng = np.random.default_rng(d)
    starts = []
    if d in TABLE_SEEDS:
        for j in sorted(set(CLASSES.get(d, {j: j for j in units(d)}).values())):
            starts.extend(TABLE_SEEDS[d](j))
    for _ in range(POOL_STARTS):
        starts.append((rng.normal(size=shape.size) + 1j * rng.normal(size=shape.size)) * rng.uniform(0.3, 3))
    found = []
    for s in starts:
        v = _np_solve(shape, s)
        if v is not None:
            found.append(v)
    pool: list = []
    queue = found
    while queue:
        v = queue.pop()
        if any(np.max(np.abs(u - v)) < 1e-7 for u in pool):
            continue
        pool.append(v)
        queue.extend(_symmetries(shape, v))
    pool.sort(key=_canonical_key)
    return tuple(pool)


def _canonical_key(v):
    return tuple(x for c in v for x in (round(c.real, 5), round(c.imag, 5)))


def _agreement(v, seed) -> int:
    return sum(abs(a - b) < 1e-6 * max(1.0, abs(b)) for a, b in zip(v, seed))


def branch_candidates(d: int, j: int) -> list:
    """Pool solutions matching the most tabled coefficients, nearest first.

    Score: number of coefficients agreeing with one branch combination of
    the table, then the distance to that combination.
    """
    seeds = [np.array(s, complex) for s in TABLE_SEEDS[d](j)]
    scored = []
    for v in solution_pool(d):
        best = max((_agreement(v, s), -round(float(np.max(np.abs(v - s))), 6)) for s in seeds)
        scored.append((best, v))
    top = max(b for b, _ in scored)
    return [v for b, v in scored if b == top], top


def choose_rough(d: int, j: int):
    """Rough coefficients of the untwisted point for degree d, class j."""
    if d == 42:
        return deg42_root(), {"source": "deg42-multistart"}
    cands, score = branch_candidates(d, j)
    hint = TIE_HINTS.get((d, j))
    if hint is not None:
        cands = sorted(cands, key=lambda v: float(np.max(np.abs(v - np.array(hint)))))
    meta = {"source": "table", "agreement": int(score[0]), "seed_distance": -score[1], "ties": len(cands)}
    return cands[0], meta


@lru_cache(maxsize=None)
def _polish(d: int, rough: tuple, prec: int):
    return refine(SHAPES[d], list(rough), prec)


def _base_polys(d, j, prec, rough=None):
    if rough is None:
        rough, meta = choose_rough(d, j)
    else:
        meta = {"source": "override"}
    v, step, active = _polish(d, tuple(complex(c) for c in rough), prec)
    shape = SHAPES[d]
    balls = _ball_coeffs(v, step, prec)
    k = len(shape.ex)
    x = Poly({e: balls[i] for i, e in enumerate(shape.ex) if i in active})
    y = Poly({e: balls[k + i] for i, e in enumerate(shape.ey) if k + i in active})
    meta = dict(meta, active=active)
    return x, y, meta


def _twist(p: Poly, m: int, j: int) -> Poly:
    # p(zeta_m^j t)
    K = TowerSpec(m)
    return Poly({e: c * K.root_of_unity(m, (e * j) % m) for e, c in p.terms.items()})


def _mirror(x: Poly, y: Poly, m: int):
    # (x, y, t) -> (x / t^(2m), y / t^(3m), 1 / t)
    return x.reciprocal(2 * m), y.reciprocal(3 * m)


def numeric_point(family: int, d: int, j: int, precision: int = 256, rough=None) -> SectionPoint:
    """Certified point P_{d,j}; ``rough`` overrides the branch choice of its class."""
    if family == 1:
        cls = 1 if d == 42 else CLASSES.get(d, {}).get(j, j)
        x, y, meta = _base_polys(d, cls, precision, rough)
        if d in (18, 20, 42):
            x, y = _twist(x, d, j), _twist(y, d, j)
        note = f"class {cls}" if d in CLASSES else ""
    elif family == 2 and d in (8, 12):
        x, y, meta = _base_polys(d, j, precision, rough)
        x, y = _mirror(x, y, d // 2)
        note = "mirror of family 1"
    elif family == 2 and d == 20:
        x, y, meta = _base_polys(20, CLASSES[20][j], precision, rough)
        x, y = _mirror(x, y, 10)
        x, y = _twist(x, 20, j), _twist(y, 20, j)
        note = "mirror of family 1"
    elif family == 2 and d in (9, 21):
        jt = (j if j % 2 else j + 9) if d == 9 else 1
        cls = CLASSES[18][jt] if d == 9 else 1
        x, y, meta = _base_polys(2 * d, cls, precision, rough)
        x, y = _mirror(x, y, d)
        x, y = x.deflate(2), y.deflate(2)
        x, y = _twist(x, d, j), _twist(y, d, j)
        note = f"mirror of family 1, degree {2 * d}" + (f", j~ = {jt}" if d == 9 else "")
    else:
        raise KeyError((family, d, j))
    return SectionPoint(x, y, family, d, j, "certified-numeric", precision, note, n=d, meta=meta)


def branch_class(family: int, d: int, j: int):
    """(degree, class) of the untwisted family-1 solution behind P_{d,j}."""
    if family == 1:
        return d, (1 if d == 42 else CLASSES.get(d, {}).get(j, j))
    if d in (8, 12):
        return d, j
    if d == 20:
        return 20, CLASSES[20][j]
    if d == 9:
        return 18, CLASSES[18][j if j % 2 else j + 9]
    if d == 21:
        return 42, 1
    raise KeyError((family, d, j))


# ------------------------------------------------------------ degree 42

DEG42_SEEDS = 200


def solve_deg42_system(seed_count: int = DEG42_SEEDS, precision: int = 256) -> list:
    """Solutions (a_1..a_5, b_1..b_7) of the degree-42 coefficient system.

    Multistart Newton on all 13 equations in 12 unknowns; every returned
    tuple has all 13 residuals below 2^(-precision/2).
    """
    if precision < 128:
        raise ValueError("precision must be at least 128 bits")
    shape = SHAPES[42]
    rng = np.random.default_rng(42)
    rough = []
    for _ in range(seed_count):
        s = (rng.normal(size=shape.size) + 1j * rng.normal(size=shape.size)) * rng.uniform(0.3, 2)
        v = _np_solve(shape, s)
        if v is not None and not any(np.max(np.abs(u - v)) < 1e-7 for u in rough):
            rough.append(v)
    out = []
    bound = mpmath.mpf(2) ** (-precision // 2)
    for v0 in sorted(rough, key=_canonical_key):
        try:
            v, step, active = _polish(42, tuple(complex(c) for c in v0), precision)
        except NoSolutionFound:
            continue
        with mpmath.workprec(precision + 32):
            if max(abs(r) for r in shape.residual(v)) < bound:
                out.append(tuple(v))
    if not out:
        raise NoSolutionFound(f"no solution after {seed_count} starts")
    return out


@lru_cache(maxsize=None)
def deg42_root():
    """The solution used for P_{42,1}: the first, in canonical order, with no
    vanishing coefficient."""
    sols = solve_deg42_system(DEG42_SEEDS, 160)
    generic = [s for s in sols if all(abs(c) > 1e-20 for c in s)]
    if not generic:
        raise NoSolutionFound("no solution with all coefficients nonzero")
    return np.array([complex(c) for c in generic[0]])


# ------------------------------------------------------------ verification

@dataclass(frozen=True)
class OnCurveResult:
    status: str  # 'exact-pass', 'certified-pass' or 'fail'
    precision: int | None = None
    witness: tuple | None = None  # (exponent, coefficient) of the first failure

    def __bool__(self):
        return self.status != "fail"


def verify_on_curve(p: SectionPoint | None, model: WeierstrassModel) -> OnCurveResult:
    """Exact check in the tower, or a ball check: zero-tested coefficients
    (balls around 0 narrower than 2^-133) are dropped, anything left fails."""
    if p is None:
        # the zero section
        return OnCurveResult("exact-pass")
    if model.family is not None and p.family != model.family:
        raise ValueError("point and model belong to different families")
    try:
        R = model.residual(p.x, p.y)
    except PrecisionExhausted as exc:
        return OnCurveResult("fail", witness=(None, str(exc)))
    if R.terms:
        e = min(R.terms)
        return OnCurveResult("fail", witness=(e, R.terms[e]))
    if p.is_exact():
        return OnCurveResult("exact-pass")
    return OnCurveResult("certified-pass", p.precision)
