"""Holomorphic 2-form counts and eigenvalue witnesses for family 1.

The exponents of a basis of holomorphic 2-forms on the n-th surface of family
1 are read off a twelve-periodic table.  They determine the window J(n) of
exponents whose roots of unity occur as eigenvalues of the order-n
automorphism on transcendental cohomology; a divisor d of n whose primitive
d-th roots all miss that window would not be covered.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .mwsections import ADMISSIBLE, divisors

# (a offset, b offset) for k = 1..12: a = 9l + a_off, b = l + b_off
_ROWS = {
    1: (-1, -1), 2: (0, -1), 3: (1, -1), 4: (2, -1), 5: (2, 0), 6: (3, -1),
    7: (4, -1), 8: (5, -1), 9: (5, 0), 10: (6, 0), 11: (7, 0), 12: (8, -1),
}

NO_FORMS = frozenset({1, 2, 3, 4, 6, 7, 8, 12})


class JIdentityViolated(AssertionError):
    pass


class WitnessNotFound(AssertionError):
    pass


@dataclass(frozen=True)
class HodgeTable:
    n: int
    l: int
    k: int
    a: int
    b: int  # b < 0 means there are no holomorphic 2-forms

    @property
    def forms(self) -> int:
        return max(self.b + 1, 0)

    def exponents(self) -> list:
        """Powers of t in the basis forms t^e dt dx/y."""
        return [2 * self.n - self.a - i - 3 for i in range(self.b + 1)]


def hodge_table(n: int) -> HodgeTable:
    if n < 1:
        raise ValueError("n must be positive")
    l, k = divmod(n - 1, 12)
    k += 1
    da, db = _ROWS[k]
    return HodgeTable(n, l, k, 9 * l + da, l + db)


def window(n: int) -> frozenset:
    """{j : 9n < 12j < 10n}."""
    return frozenset(j for j in range(9 * n // 12 + 1, -(-10 * n // 12)) if 9 * n < 12 * j < 10 * n)


def j_set(n: int) -> frozenset:
    h = hodge_table(n)
    from_table = frozenset(range(h.a + 2, h.a + h.b + 3))
    direct = window(n)
    if from_table != direct:
        raise JIdentityViolated(f"n={n}: table gives {sorted(from_table)}, window gives {sorted(direct)}")
    return from_table


def uncovered_divisors(n: int) -> list:
    """Divisors of n outside the admissible set of family 1 and outside {4, 6}."""
    skip = set(ADMISSIBLE[1]) | {4, 6}
    return [d for d in divisors(n) if d not in skip]


@dataclass(frozen=True)
class SpanningWitness:
    n: int
    pairs: tuple  # ((d, j), ...), sorted by d

    @property
    def trivial(self) -> bool:
        return not self.pairs

    @property
    def verdict(self) -> str:
        return "trivial" if self.trivial else "witnessed"


def spanning_witness(n: int, family: int = 1) -> SpanningWitness:
    """For each uncovered divisor d, the least unit j mod d with jn/d in J(n)."""
    if family != 1:
        raise NotImplementedError("witnesses are only defined for family 1")
    J = j_set(n)
    out = []
    for d in uncovered_divisors(n):
        step = n // d
        hit = next((j for j in range(1, d) if math.gcd(j, d) == 1 and j * step in J), None)
        if hit is None:
            raise WitnessNotFound(f"no unit j mod {d} with j*{step} in J({n})")
        out.append((d, hit))
    return SpanningWitness(n, tuple(out))
