"""Exact arithmetic in fields Q(zeta_N)(p_1^(1/K_1), ..., p_m^(1/K_m)).

Radicals are kept per prime: a request for r^(1/k) with r = prod p^v is
rewritten as a product of prime radicals u_p = p^(1/K_p) times a rational.
An element is stored as a map from radical exponent tuples to polynomials
in zeta_N reduced modulo the N-th cyclotomic polynomial.

When sqrt(p) already lies in Q(zeta_N) and K_p is even, the relation
u_p^(K_p/2) = sqrt(p) (a Gauss sum) is applied so that the monomial basis
stays linearly independent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

import flint
from flint import fmpq, fmpq_poly, fmpz, fmpz_poly

DEFAULT_DEGREE_CAP = 4096


class GeneratorNotInSpec(ValueError):
    pass


class SpecMergeOverflow(ValueError):
    pass


class TowerSpecError(ValueError):
    pass


def _phi(n: int) -> int:
    return int(fmpz(n).euler_phi()) if n > 1 else 1


def _canon_conductor(n: int) -> int:
    # Q(zeta_n) = Q(zeta_{n/2}) when n = 2 mod 4
    return n // 2 if n % 4 == 2 else n


def _quad_disc(s: int) -> int:
    s_free = s
    return s_free if s_free % 4 == 1 else 4 * s_free


def _factor_rational(q: Fraction) -> dict[int, int]:
    out: dict[int, int] = {}
    for part, sign in ((q.numerator, 1), (q.denominator, -1)):
        if abs(part) > 1:
            for p, e in fmpz(abs(part)).factor():
                out[int(p)] = out.get(int(p), 0) + sign * int(e)
    return {p: e for p, e in out.items() if e}


@dataclass(frozen=True)
class TowerSpec:
    """The field Q(zeta_N)(p^(1/K) for (p, K) in radicals).

    ``radicals`` may be given as (r, k) pairs with r any nonzero rational;
    they are normalised to sorted (prime, K) pairs.  A negative r forces
    zeta_{2k} into the cyclotomic part.
    """

    N: int = 1
    radicals: tuple = ()
    degree_cap: int = DEFAULT_DEGREE_CAP

    def __post_init__(self):
        if self.N < 1:
            raise TowerSpecError("conductor must be positive")
        n = self.N
        ks: dict[int, int] = {}
        for r, k in self.radicals:
            r = Fraction(r)
            if r == 0 or k < 1:
                raise TowerSpecError(f"bad radical ({r}, {k})")
            if r < 0:
                n = math.lcm(n, 2 * k)
            for p, v in _factor_rational(abs(r)).items():
                need = k // math.gcd(v, k)
                if need > 1:
                    ks[p] = math.lcm(ks.get(p, 1), need)
        object.__setattr__(self, "N", _canon_conductor(n))
        object.__setattr__(self, "radicals", tuple(sorted(ks.items())))
        _check_kummer(self.N, self.radicals)
        if self.degree > self.degree_cap:
            raise SpecMergeOverflow(f"tower degree {self.degree} exceeds cap {self.degree_cap}")

    @property
    def primes(self) -> tuple:
        return tuple(p for p, _ in self.radicals)

    @property
    def degree(self) -> int:
        return _phi(self.N) * math.prod(_data(self.N, self.radicals).bounds)

    def merge(self, other: "TowerSpec") -> "TowerSpec":
        if self == other:
            return self
        n = math.lcm(self.N, other.N)
        rads = dict(self.radicals)
        for p, k in other.radicals:
            rads[p] = math.lcm(rads.get(p, 1), k)
        return TowerSpec(n, tuple(rads.items()), max(self.degree_cap, other.degree_cap))

    def contains(self, other: "TowerSpec") -> bool:
        return self.merge(other) == self

    # constructors
    def zero(self) -> "TowerElement":
        return TowerElement(self, {})

    def one(self) -> "TowerElement":
        return self.rational(1)

    def rational(self, q) -> "TowerElement":
        q = Fraction(q)
        if q == 0:
            return self.zero()
        return TowerElement(self, {self._zero_key: fmpq_poly([fmpq(q.numerator, q.denominator)])})

    def root_of_unity(self, m: int, e: int = 1) -> "TowerElement":
        """zeta_m^e with zeta_m = exp(2 pi i / m)."""
        n = self.N
        e %= m
        if n % m == 0:
            return self._zeta_power(e * (n // m))
        if n % 2 == 1 and (2 * n) % m == 0:
            # zeta_{2n} = -zeta_n^((n+1)/2)
            a = e * (2 * n // m)
            val = self._zeta_power(a * (n + 1) // 2)
            return -val if a % 2 else val
        raise GeneratorNotInSpec(f"zeta_{m} not in Q(zeta_{n})")

    def radical(self, r, k: int) -> "TowerElement":
        """Principal r^(1/k): positive real root, times exp(i pi/k) if r < 0."""
        r = Fraction(r)
        if r == 0 or k < 1:
            raise GeneratorNotInSpec(f"bad radical ({r}, {k})")
        out = self.one()
        if r < 0:
            out = self.root_of_unity(2 * k, 1)
        for p, v in _factor_rational(abs(r)).items():
            out = out * self._prime_power(p, Fraction(v, k))
        return out

    def sqrt_rational(self, r) -> "TowerElement":
        return self.radical(r, 2)

    @property
    def _zero_key(self) -> tuple:
        return (0,) * len(self.radicals)

    def _zeta_power(self, a: int) -> "TowerElement":
        d = _data(self.N, self.radicals)
        return TowerElement(self, {self._zero_key: d.zeta_pow(a)})

    def _prime_power(self, p: int, frac: Fraction) -> "TowerElement":
        # p^frac for rational frac, as rational * u_p^e
        whole = math.floor(frac)
        part = frac - whole
        base = self.rational(Fraction(p) ** whole)
        if part == 0:
            return base
        rads = dict(self.radicals)
        if p not in rads or (rads[p] * part).denominator != 1:
            raise GeneratorNotInSpec(f"{p}^{part} not in spec")
        idx = self.primes.index(p)
        key = [0] * len(self.radicals)
        key[idx] = int(rads[p] * part)
        return base * _monomial(self, tuple(key))


class _Data:
    """Reduction data: cyclotomic modulus and per-prime radical relations."""

    def __init__(self, n: int, radicals: tuple):
        self.n = n
        self.phi = fmpq_poly(fmpz_poly.cyclotomic(n).coeffs()) if n > 1 else fmpq_poly([-1, 1])
        self.dim = _phi(n)
        self._zeta_cache: dict[int, fmpq_poly] = {}
        bounds = []
        relations = []
        for p, k in radicals:
            g = _sqrt_in_cyclotomic(p, n, self) if k % 2 == 0 else None
            if g is None:
                bounds.append(k)
                relations.append(fmpq_poly([p]))
            else:
                bounds.append(k // 2)
                relations.append(g)
        self.bounds = tuple(bounds)
        self.relations = tuple(relations)

    def zeta_pow(self, a: int) -> fmpq_poly:
        a %= self.n
        got = self._zeta_cache.get(a)
        if got is None:
            got = fmpq_poly([0] * a + [1]) % self.phi
            self._zeta_cache[a] = got
        return got


def _sqrt_in_cyclotomic(p: int, n: int, data: _Data):
    if n % _quad_disc(p) != 0:
        return None
    if p == 2:
        return (data.zeta_pow(n // 8) + data.zeta_pow(7 * n // 8)) % data.phi
    g = fmpq_poly([0])
    for a in range(1, p):
        leg = pow(a, (p - 1) // 2, p)
        sign = 1 if leg == 1 else -1
        g += sign * data.zeta_pow(a * (n // p))
    if p % 4 == 3:
        g = -(data.zeta_pow(n // 4) * g)
    return g % data.phi


def _check_kummer(n: int, radicals: tuple) -> None:
    # a product of square roots of distinct primes can fall into Q(zeta_n)
    # even if no single factor does; such towers are not linearly disjoint
    open_primes = [p for p, k in radicals if k % 2 == 0 and n % _quad_disc(p) != 0]
    for size in range(2, len(open_primes) + 1):
        for combo in combinations(open_primes, size):
            if n % _quad_disc(math.prod(combo)) == 0:
                raise TowerSpecError(f"sqrt({math.prod(combo)}) lies in Q(zeta_{n}); unsupported tower")


@lru_cache(maxsize=None)
def _data(n: int, radicals: tuple) -> _Data:
    return _Data(n, radicals)


def _monomial(spec: TowerSpec, key: tuple) -> "TowerElement":
    d = _data(spec.N, spec.radicals)
    poly = fmpq_poly([1])
    key = list(key)
    for i, b in enumerate(d.bounds):
        while key[i] >= b:
            key[i] -= b
            poly = poly * d.relations[i]
    return TowerElement(spec, {tuple(key): poly % d.phi})


class TowerElement:
    """Immutable exact element of a TowerSpec field."""

    __slots__ = ("spec", "_c", "_hash")

    def __init__(self, spec: TowerSpec, coeffs: dict):
        self.spec = spec
        self._c = {k: v for k, v in coeffs.items() if not v.is_zero()}
        self._hash = None

    # coercion
    def lift(self, spec: TowerSpec) -> "TowerElement":
        if spec == self.spec:
            return self
        if not spec.contains(self.spec):
            raise GeneratorNotInSpec("target spec does not contain source spec")
        step = spec.N // self.spec.N if spec.N % self.spec.N == 0 else None
        if step is None:
            # source conductor odd and target contains zeta_{2N}
            z = spec.root_of_unity(self.spec.N, 1)
        out = spec.zero()
        for key, poly in self._c.items():
            # cyclotomic part
            if step is not None:
                cyc = TowerElement(spec, {spec._zero_key: _substitute(poly, step, spec)})
            else:
                cyc = spec.zero()
                zp = spec.one()
                for c in poly.coeffs():
                    if c != 0:
                        cyc = cyc + zp * spec.rational(Fraction(int(c.p), int(c.q)))
                    zp = zp * z
            mono = spec.one()
            for (p, k), e in zip(self.spec.radicals, key):
                if e:
                    mono = mono * spec._prime_power(p, Fraction(e, k))
            out = out + cyc * mono
        return out

    def _coerce(self, other):
        if isinstance(other, TowerElement):
            if other.spec == self.spec:
                return self, other
            spec = self.spec.merge(other.spec)
            return self.lift(spec), other.lift(spec)
        if isinstance(other, (int, Fraction, fmpq)):
            return self, self.spec.rational(Fraction(other) if not isinstance(other, fmpq) else Fraction(int(other.p), int(other.q)))
        return NotImplemented

    # arithmetic
    def __add__(self, other):
        pair = self._coerce(other)
        if pair is NotImplemented:
            return NotImplemented
        a, b = pair
        out = dict(a._c)
        for k, v in b._c.items():
            out[k] = out[k] + v if k in out else v
        return TowerElement(a.spec, out)

    __radd__ = __add__

    def __neg__(self):
        return TowerElement(self.spec, {k: -v for k, v in self._c.items()})

    def __sub__(self, other):
        pair = self._coerce(other)
        if pair is NotImplemented:
            return NotImplemented
        a, b = pair
        return a + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        pair = self._coerce(other)
        if pair is NotImplemented:
            return NotImplemented
        a, b = pair
        d = _data(a.spec.N, a.spec.radicals)
        if not a._c or not b._c:
            return a.spec.zero()
        acc: dict = {}
        for e1, f1 in a._c.items():
            for e2, f2 in b._c.items():
                f = f1 * f2
                key = list(e1)
                for i, x in enumerate(e2):
                    key[i] += x
                    if key[i] >= d.bounds[i]:
                        key[i] -= d.bounds[i]
                        f = f * d.relations[i]
                key = tuple(key)
                acc[key] = acc[key] + f if key in acc else f
        return TowerElement(a.spec, {k: v % d.phi for k, v in acc.items()})

    __rmul__ = __mul__

    def inv(self) -> "TowerElement":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero tower element")
        return _inverse(self, len(self.spec.radicals))

    def __truediv__(self, other):
        pair = self._coerce(other)
        if pair is NotImplemented:
            return NotImplemented
        a, b = pair
        return a * b.inv()

    def __rtruediv__(self, other):
        return self.inv() * other

    def __pow__(self, e: int):
        if e < 0:
            return self.inv() ** (-e)
        out = self.spec.one()
        base = self
        while e:
            if e & 1:
                out = out * base
            e >>= 1
            if e:
                base = base * base
        return out

    # predicates and views
    def is_zero(self) -> bool:
        return not self._c

    def __bool__(self):
        return bool(self._c)

    def is_rational(self) -> bool:
        if not self._c:
            return True
        return list(self._c) == [self.spec._zero_key] and self._c[self.spec._zero_key].degree() == 0

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("element is not rational")
        if not self._c:
            return Fraction(0)
        c = self._c[self.spec._zero_key].coeffs()[0]
        return Fraction(int(c.p), int(c.q))

    def coords(self) -> dict:
        """Sparse view {(a, e_1, ..., e_m): Fraction} in the monomial basis."""
        out = {}
        for key, poly in self._c.items():
            for a, c in enumerate(poly.coeffs()):
                if c != 0:
                    out[(a,) + key] = Fraction(int(c.p), int(c.q))
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.spec.rational(other)
        if not isinstance(other, TowerElement):
            return NotImplemented
        a, b = self._coerce(other)
        return a._c == b._c

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(sorted(self.coords().items())))
        return self._hash

    def embed(self, prec: int = 128) -> flint.acb:
        """Certified complex ball around the principal-branch value."""
        if prec < 32:
            raise ValueError("precision must be at least 32 bits")
        if not self._c:
            return flint.acb(0)
        with flint.ctx.workprec(prec + 16):
            zeta, us = _embedding_consts(self.spec.N, self.spec.radicals, prec + 16)
            total = flint.acb(0)
            for key, poly in self._c.items():
                val = flint.acb(0)
                for a, c in enumerate(poly.coeffs()):
                    if c != 0:
                        val += flint.acb(flint.arb(c)) * zeta[a]
                for u, e in zip(us, key):
                    if e:
                        val *= u ** e
                total += val
            return +total

    def __complex__(self):
        v = self.embed(64)
        return complex(float(v.real.mid()), float(v.imag.mid()))

    def __repr__(self):
        if not self._c:
            return "0"
        parts = []
        names = [f"{p}^(1/{k})" for p, k in self.spec.radicals]
        for key, poly in sorted(self._c.items()):
            mono = "*".join(f"{n}^{e}" for n, e in zip(names, key) if e)
            cyc = str(poly).replace("x", f"z{self.spec.N}")
            parts.append(f"({cyc})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)


@lru_cache(maxsize=256)
def _embedding_consts(n: int, radicals: tuple, prec: int):
    z = flint.acb(flint.arb(2) / n).exp_pi_i()
    zeta = [flint.acb(1)]
    for _ in range(max(_phi(n), 1)):
        zeta.append(zeta[-1] * z)
    us = [flint.acb(flint.arb(p).root(k)) for p, k in radicals]
    return zeta, us


def _substitute(poly: fmpq_poly, step: int, spec: TowerSpec) -> fmpq_poly:
    d = _data(spec.N, spec.radicals)
    out = fmpq_poly([0])
    for a, c in enumerate(poly.coeffs()):
        if c != 0:
            out += c * d.zeta_pow(a * step)
    return out % d.phi


def _restrict(x: TowerElement, level: int, k: int) -> TowerElement:
    # coefficient of u_level^k, viewed as an element of the lower sub-tower
    out = {}
    for key, poly in x._c.items():
        if key[level - 1] == k:
            nk = list(key)
            nk[level - 1] = 0
            out[tuple(nk)] = poly
    return TowerElement(x.spec, out)


def _inverse(x: TowerElement, level: int) -> TowerElement:
    spec = x.spec
    d = _data(spec.N, spec.radicals)
    if level == 0:
        poly = x._c[spec._zero_key]
        g, s, _ = poly.xgcd(d.phi)
        return TowerElement(spec, {spec._zero_key: (s / g.coeffs()[0]) % d.phi})
    b = d.bounds[level - 1]
    if all(key[level - 1] == 0 for key in x._c):
        return _inverse(x, level - 1)
    if _has_root_of_unity(spec.N, b):
        # multiply by the Kummer conjugates u -> zeta_b^k u; the norm lies
        # in the lower sub-tower
        conj = spec.one()
        for k in range(1, b):
            conj = conj * _kummer_conjugate(x, level, k, b)
        norm = conj * x
        return conj * _inverse(norm, level - 1)
    # Euclid in F[X] with F the sub-tower, modulus X^b - c
    a = [_restrict(x, level, k) for k in range(b)]
    c = TowerElement(spec, {spec._zero_key: d.relations[level - 1]})
    m = [-c] + [spec.zero()] * (b - 1) + [spec.one()]
    s = _poly_modinv(_trim(a), m, level - 1)
    out = spec.zero()
    unit = [0] * len(spec.radicals)
    for k, coeff in enumerate(s):
        if coeff.is_zero():
            continue
        unit[level - 1] = k
        out = out + coeff * TowerElement(spec, {tuple(unit): fmpq_poly([1])})
    return out


def _has_root_of_unity(n: int, b: int) -> bool:
    return n % b == 0 or (n % 2 == 1 and (2 * n) % b == 0)


def _kummer_conjugate(x: TowerElement, level: int, k: int, b: int) -> TowerElement:
    spec = x.spec
    out = spec.zero()
    for key, poly in x._c.items():
        e = key[level - 1]
        term = TowerElement(spec, {key: poly})
        if (k * e) % b:
            term = term * spec.root_of_unity(b, k * e)
        out = out + term
    return out


def _trim(p: list) -> list:
    p = list(p)
    while p and p[-1].is_zero():
        p.pop()
    return p


def _poly_divmod(a: list, b: list, level: int):
    a = list(a)
    q = [b[0].spec.zero()] * max(len(a) - len(b) + 1, 1)
    inv_lc = _inverse(b[-1], level)
    while a and len(a) >= len(b):
        coef = a[-1] * inv_lc
        shift = len(a) - len(b)
        q[shift] = coef
        for i, bc in enumerate(b):
            a[shift + i] = a[shift + i] - coef * bc
        a = _trim(a)
    return q, a


def _poly_mul(a: list, b: list) -> list:
    if not a or not b:
        return []
    out = [a[0].spec.zero()] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return out


def _poly_sub(a: list, b: list) -> list:
    n = max(len(a), len(b))
    z = (a or b)[0].spec.zero()
    return _trim([(a[i] if i < len(a) else z) - (b[i] if i < len(b) else z) for i in range(n)])


def _poly_modinv(a: list, m: list, level: int) -> list:
    # returns s with s*a = 1 mod m, coefficients in the level sub-tower
    r0, r1 = m, a
    s0, s1 = [], [a[0].spec.one()]
    while len(r1) > 1:
        q, r = _poly_divmod(r0, r1, level)
        r0, r1 = r1, r
        s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
    if not r1:
        raise ZeroDivisionError("element is not invertible (tower not a field?)")
    inv_c = _inverse(r1[0], level)
    return [inv_c * c for c in s1]


def construct(kind: str, spec: TowerSpec, *args) -> TowerElement:
    """construct('rational', spec, q) / ('root_of_unity', spec, m, e) / ('radical', spec, r, k)."""
    if kind == "rational":
        return spec.rational(*args)
    if kind == "root_of_unity":
        return spec.root_of_unity(*args)
    if kind == "radical":
        return spec.radical(*args)
    raise ValueError(f"unknown generator kind {kind!r}")


def common_spec(*elems) -> TowerSpec:
    spec = TowerSpec()
    for e in elems:
        if isinstance(e, TowerElement):
            spec = spec.merge(e.spec)
    return spec
