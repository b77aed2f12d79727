"""Polynomials (and Laurent polynomials) in t over tower fields or complex balls.

Coefficients are either exact ``TowerElement`` values or ``Ball`` values
(certified complex intervals).  Storage is sparse: pulled-back points such
as x(t^30) would otherwise carry long runs of zeros.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import flint
import mpmath

from .numtower import TowerElement, TowerSpec

INF = math.inf

# coefficients whose ball contains 0 and is narrower than this are zero
ZERO_TOL_BITS = 133  # 2^-133 ~ 1e-40

# working precision for ball arithmetic; numeric points carry ~256 bits
WORKING_PREC = 384
flint.ctx.prec = max(flint.ctx.prec, WORKING_PREC)


class PrecisionExhausted(ArithmeticError):
    """A ball coefficient is neither certainly zero nor certainly nonzero."""


class Ball:
    """A complex ball with an explicit zero test."""

    __slots__ = ("v",)

    def __init__(self, v):
        self.v = v if isinstance(v, flint.acb) else flint.acb(v)

    def _o(self, other):
        if isinstance(other, Ball):
            return other.v
        if isinstance(other, TowerElement):
            return other.embed(flint.ctx.prec)
        if isinstance(other, Fraction):
            return flint.acb(flint.fmpq(other.numerator, other.denominator))
        return flint.acb(other)

    def __add__(self, o):
        return Ball(self.v + self._o(o))

    __radd__ = __add__

    def __sub__(self, o):
        return Ball(self.v - self._o(o))

    def __rsub__(self, o):
        return Ball(self._o(o) - self.v)

    def __mul__(self, o):
        return Ball(self.v * self._o(o))

    __rmul__ = __mul__

    def __truediv__(self, o):
        return Ball(self.v / self._o(o))

    def __rtruediv__(self, o):
        return Ball(self._o(o) / self.v)

    def __neg__(self):
        return Ball(-self.v)

    def __pow__(self, e: int):
        return Ball(self.v ** e)

    def inv(self):
        return Ball(1 / self.v)

    def radius(self) -> float:
        return float(max(self.v.real.rad(), self.v.imag.rad()))

    def is_zero(self) -> bool:
        if not self.v.contains(0):
            return False
        tol = flint.arb(2) ** (-ZERO_TOL_BITS)
        if self.v.real.rad() < tol and self.v.imag.rad() < tol:
            return True
        raise PrecisionExhausted(f"cannot decide whether {self.v} is zero")

    def __complex__(self):
        return complex(float(self.v.real.mid()), float(self.v.imag.mid()))

    def __repr__(self):
        return f"Ball({self.v})"


def is_zero(c) -> bool:
    if isinstance(c, (int, Fraction)):
        return c == 0
    return c.is_zero()


def to_ball(c, prec: int) -> Ball:
    if isinstance(c, Ball):
        return c
    if isinstance(c, TowerElement):
        return Ball(c.embed(prec))
    return Ball(flint.acb(flint.fmpq(Fraction(c).numerator, Fraction(c).denominator)))


class Poly:
    """Sparse Laurent polynomial sum c_e t^e with exact or ball coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        if terms is None:
            terms = {}
        elif isinstance(terms, (list, tuple)):
            terms = {i: c for i, c in enumerate(terms)}
        self.terms = {e: c for e, c in terms.items() if not is_zero(c)}

    @staticmethod
    def monomial(c, e: int = 0) -> "Poly":
        return Poly({e: c})

    @staticmethod
    def gen(spec: TowerSpec | None = None) -> "Poly":
        spec = spec or TowerSpec()
        return Poly({1: spec.one()})

    # structure
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self):
        return max(self.terms) if self.terms else -INF

    @property
    def low(self):
        """Lowest exponent (the order at t = 0); +inf for zero."""
        return min(self.terms) if self.terms else INF

    @property
    def coeffs(self) -> list:
        """Dense coefficient list, lowest degree first (polynomials only)."""
        if not self.terms:
            return []
        if self.low < 0:
            raise ValueError("dense view needs a polynomial, not a Laurent polynomial")
        zero = _zero_like(next(iter(self.terms.values())))
        return [self.terms.get(i, zero) for i in range(self.degree + 1)]

    def lc(self):
        return self.terms[self.degree]

    def coeff(self, e: int):
        return self.terms.get(e)

    def is_exact(self) -> bool:
        return not any(isinstance(c, Ball) for c in self.terms.values())

    def spec(self) -> TowerSpec:
        spec = TowerSpec()
        for c in self.terms.values():
            if isinstance(c, TowerElement):
                spec = spec.merge(c.spec)
        return spec

    # arithmetic
    def __add__(self, other):
        other = _as_poly(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out[e] + c if e in out else c
        return Poly(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            if is_zero(other):
                return Poly()
            return Poly({e: c * other for e, c in self.terms.items()})
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = e1 + e2
                p = c1 * c2
                out[e] = out[e] + p if e in out else p
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = Poly({0: _one_like(next(iter(self.terms.values())))}) if self.terms else Poly()
        if not self.terms:
            return Poly() if k > 0 else out
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def shift(self, k: int) -> "Poly":
        """Multiply by t^k (k may be negative)."""
        return Poly({e + k: c for e, c in self.terms.items()})

    def substitute_power(self, s: int) -> "Poly":
        """t -> t^s."""
        return Poly({e * s: c for e, c in self.terms.items()})

    def reciprocal(self, m: int) -> "Poly":
        """t^m * f(1/t); used to move to the chart at infinity."""
        return Poly({m - e: c for e, c in self.terms.items()})

    def derivative(self) -> "Poly":
        return Poly({e - 1: c * e for e, c in self.terms.items() if e != 0})

    def compose(self, g: "Poly") -> "Poly":
        if self.low < 0:
            raise ValueError("compose needs a polynomial")
        out = Poly()
        for c in reversed(self.coeffs):
            out = out * g + Poly({0: c})
        return out

    def evaluate(self, x):
        total = None
        for e, c in self.terms.items():
            term = c * (x ** e)
            total = term if total is None else total + term
        return total if total is not None else 0

    def truncate(self, n: int) -> "Poly":
        """Drop terms of exponent >= n."""
        return Poly({e: c for e, c in self.terms.items() if e < n})

    def deflation(self) -> int:
        g = 0
        for e in self.terms:
            g = math.gcd(g, e)
        return g

    def deflate(self, g: int) -> "Poly":
        return Poly({e // g: c for e, c in self.terms.items()})

    def map_coeffs(self, fn) -> "Poly":
        return Poly({e: fn(c) for e, c in self.terms.items()})

    def to_ball(self, prec: int) -> "Poly":
        return self.map_coeffs(lambda c: to_ball(c, prec))

    def lift(self, spec: TowerSpec) -> "Poly":
        return self.map_coeffs(lambda c: c.lift(spec) if isinstance(c, TowerElement) else c)

    def __eq__(self, other):
        if not isinstance(other, Poly):
            other = _as_poly(other)
        return (self - other).is_zero()

    def __hash__(self):
        return hash(tuple(sorted((e, hash(c)) for e, c in self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"({c})*t^{e}" for e, c in sorted(self.terms.items()))


def _as_poly(x) -> Poly:
    if isinstance(x, Poly):
        return x
    if isinstance(x, (int, Fraction)):
        return Poly({0: TowerSpec().rational(x)}) if x != 0 else Poly()
    return Poly({0: x})


def _zero_like(c):
    if isinstance(c, TowerElement):
        return c.spec.zero()
    if isinstance(c, Ball):
        return Ball(0)
    return 0


def _one_like(c):
    if isinstance(c, TowerElement):
        return c.spec.one()
    if isinstance(c, Ball):
        return Ball(1)
    return 1


def _inv(c):
    return c.inv()


def const(c, spec: TowerSpec | None = None) -> Poly:
    if isinstance(c, (int, Fraction)):
        c = (spec or TowerSpec()).rational(c)
    return Poly({0: c})


def t_power(e: int, spec: TowerSpec | None = None, coeff=1) -> Poly:
    spec = spec or TowerSpec()
    c = spec.rational(coeff) if isinstance(coeff, (int, Fraction)) else coeff
    return Poly({e: c})


# ---------------------------------------------------------------- places

@dataclass(frozen=True)
class Place:
    """A point of P^1: ``kind`` is 'finite' (with value t0) or 'infinity'."""

    kind: str
    t0: object = None

    @staticmethod
    def finite(t0=0) -> "Place":
        return Place("finite", t0)

    @staticmethod
    def infinity() -> "Place":
        return Place("infinity")

    def is_zero(self) -> bool:
        return self.kind == "finite" and (self.t0 == 0 or (hasattr(self.t0, "is_zero") and self.t0.is_zero()))

    def __repr__(self):
        return "inf" if self.kind == "infinity" else f"t={self.t0}"


def ord_at(f, place: Place):
    """Order of vanishing of a polynomial or (num, den) pair at ``place``."""
    if isinstance(f, tuple):
        num, den = f
        a, b = ord_at(num, place), ord_at(den, place)
        if b == INF:
            raise ZeroDivisionError("zero denominator")
        return a - b if a != INF else INF
    if f.is_zero():
        return INF
    if place.kind == "infinity":
        return -f.degree
    if place.is_zero():
        return f.low
    # finite nonzero place: repeated synthetic division by (t - t0)
    t0 = place.t0
    order = 0
    g = f
    while True:
        rem, quo = _synthetic_div(g, t0)
        if not is_zero(rem):
            return order
        order += 1
        g = quo


def _synthetic_div(f: Poly, t0):
    if f.low < 0:
        raise ValueError("ord at a nonzero finite place needs a polynomial")
    c = f.coeffs
    n = len(c)
    quo = [None] * (n - 1)
    acc = c[-1]
    for i in range(n - 2, -1, -1):
        quo[i] = acc
        acc = c[i] + acc * t0
    return acc, Poly(quo) if quo else Poly()


# ---------------------------------------------------------------- exact gcd / resultant

def poly_divmod(f: Poly, g: Poly):
    """Division with remainder over the coefficient field (exact coefficients)."""
    if g.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    r = Poly(dict(f.terms))
    q: dict = {}
    dg = g.degree
    inv_lc = _inv(g.lc())
    while not r.is_zero() and r.degree >= dg:
        e = r.degree - dg
        c = r.lc() * inv_lc
        q[e] = c
        r = r - Poly({k + e: v * c for k, v in g.terms.items()})
        if not r.is_zero() and r.degree >= dg + e:
            # the leading term cancels exactly; enforce for ball arithmetic
            r.terms.pop(dg + e, None)
    return Poly(q), r


def monic(f: Poly) -> Poly:
    return f * _inv(f.lc())


def poly_gcd(f: Poly, g: Poly) -> Poly:
    """Monic gcd over the coefficient field (Euclid; inputs are small)."""
    f, g = _strip_common(f), _strip_common(g)
    if f.is_zero():
        return monic(g) if not g.is_zero() else Poly()
    if g.is_zero():
        return monic(f)
    a, b = (f, g) if f.degree >= g.degree else (g, f)
    while not b.is_zero():
        _, r = poly_divmod(a, b)
        a, b = b, (monic(r) if not r.is_zero() else r)
    return monic(a)


def _strip_common(f: Poly) -> Poly:
    if f.is_zero():
        return f
    spec = f.spec()
    return f.lift(spec) if f.is_exact() else f


def resultant(f: Poly, g: Poly):
    """Resultant via the Euclidean remainder sequence."""
    if f.is_zero() or g.is_zero():
        raise ValueError("resultant of a zero polynomial")
    spec = f.spec().merge(g.spec())
    f, g = f.lift(spec), g.lift(spec)
    one = spec.one()
    res = one
    a, b = f, g
    while True:
        da, db = a.degree, b.degree
        if db == 0:
            return res * b.lc() ** da
        _, r = poly_divmod(a, b)
        if r.is_zero():
            return spec.zero()
        if (da * db) % 2:
            res = -res
        res = res * b.lc() ** (da - r.degree)
        a, b = b, r


def common_root_count(f: Poly, g: Poly, exclude_zero: bool = True) -> int:
    """Number of common roots of f and g counted with min(ord f, ord g).

    Roots at t = 0 are skipped when ``exclude_zero``.  Exact coefficients use
    gcd degrees; ball coefficients use clustered numerical roots.
    """
    if f.is_zero() and g.is_zero():
        raise ValueError("both polynomials vanish identically")
    if f.is_zero() or g.is_zero():
        h = g if f.is_zero() else f
        return h.degree - h.low if exclude_zero else h.degree
    at_zero = 0 if exclude_zero else min(f.low, g.low)
    f0, g0 = f.shift(-f.low), g.shift(-g.low)
    # both are polynomials in t^s: each root in s gives s roots in t
    s = math.gcd(f0.deflation(), g0.deflation()) or 1
    if s > 1:
        f0, g0 = f0.deflate(s), g0.deflate(s)
    if f0.is_exact() and g0.is_exact():
        d = poly_gcd(f0, g0).degree
    else:
        d = _numeric_common_roots(f0, g0)
    return s * d + at_zero


def _numeric_common_roots(f: Poly, g: Poly, prec: int | None = None) -> int:
    """Common roots (away from 0) of two ball polynomials, by root clustering."""
    if f.degree == 0 or g.degree == 0:
        return 0
    a, b = (f, g) if f.degree <= g.degree else (g, f)
    prec = prec or flint.ctx.prec
    dps = max(int(prec / 3.33), 30)
    with mpmath.workdps(dps + 20):
        ca = [_mpc(c) for c in reversed(a.coeffs)]
        roots = mpmath.polyroots(ca, maxsteps=400, extraprec=4 * prec, error=False)
        cluster_tol = mpmath.mpf(10) ** (-dps // 4)
        clusters: list[list] = []
        for r in roots:
            for cl in clusters:
                if abs(cl[0] - r) < cluster_tol * max(1, abs(r)):
                    cl.append(r)
                    break
            else:
                clusters.append([r])
        total = 0
        bcoef = [_mpc(c) for c in b.coeffs]
        zero_tol = mpmath.mpf(10) ** (-dps // 3)
        for cl in clusters:
            center = sum(cl) / len(cl)
            total += min(len(cl), _numeric_order(bcoef, center, len(cl), zero_tol))
        return total


def _numeric_order(coef: list, z, cap: int, tol) -> int:
    # smallest k < cap whose Taylor coefficient at z is not negligible
    for k in range(cap):
        val = 0
        scale = 0
        for i in range(k, len(coef)):
            w = mpmath.binomial(i, k) * z ** (i - k)
            val += coef[i] * w
            scale += abs(coef[i] * w)
        if abs(val) > tol * scale:
            return k
    return cap


def _mpc(c):
    b = c if isinstance(c, Ball) else to_ball(c, flint.ctx.prec)
    return mpmath.mpc(_arb_to_mpf(b.v.real), _arb_to_mpf(b.v.imag))


def _arb_to_mpf(x: flint.arb):
    m, e = x.mid().man_exp()
    return mpmath.mpf(int(m)) * mpmath.mpf(2) ** int(e)


def common_roots(f: Poly, g: Poly) -> list:
    """Common roots as a multiset of (descriptor, multiplicity).

    A binomial gcd c0 + c1 t^s is described as ('binomial', s, -c0/c1),
    meaning the s roots of t^s = -c0/c1; t = 0 is reported as ('zero',);
    other factors as ('factor', degree).
    """
    out = []
    z = min(f.low, g.low) if not (f.is_zero() or g.is_zero()) else (g.low if f.is_zero() else f.low)
    if z and z != INF:
        out.append((("zero",), z))
    f0 = f.shift(-f.low) if not f.is_zero() else f
    g0 = g.shift(-g.low) if not g.is_zero() else g
    h = poly_gcd(f0, g0)
    # Yun-style layers: rad_k collects roots of multiplicity >= k
    rads = []
    while h.degree > 0:
        sqf = poly_gcd(h, h.derivative())
        rad, _ = poly_divmod(h, sqf)
        rads.append(monic(rad))
        h = sqf
    for k, rad in enumerate(rads, start=1):
        exact = rad if k == len(rads) else monic(poly_divmod(rad, rads[k])[0])
        if exact.degree > 0:
            out.extend((d, k) for d in _describe(exact))
    return out


def _describe(p: Poly) -> list:
    if len(p.terms) == 2 and p.low == 0:
        s = p.degree
        return [("binomial", s, -p.terms[0] / p.lc())]
    return [("factor", p.degree)]


def root_multiset_size(roots: list) -> int:
    total = 0
    for d, m in roots:
        if d[0] == "zero":
            total += m
        else:
            total += d[1] * m
    return total


def poly_arith(op: str, a: Poly, b=None) -> Poly:
    """Dispatcher mirroring the named operations of the module."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "compose":
        return a.compose(b)
    if op == "derivative":
        return a.derivative()
    if op == "substitute_power":
        return a.substitute_power(b)
    raise ValueError(f"unknown operation {op!r}")
