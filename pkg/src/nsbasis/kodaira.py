"""Kodaira fiber types from (ord c4, ord c6, ord Delta), fiber configurations
of the family models and the numerical invariants derived from them."""
from __future__ import annotations

from dataclasses import dataclass

from .funcfield import Place, poly_gcd
from .weierstrass import WeierstrassModel, infinity_chart, invariants, zero_chart


class NonMinimal(ValueError):
    pass


class Unclassifiable(ValueError):
    pass


class EpsilonSumNotDivisible(ValueError):
    pass


class UnsupportedDiscriminant(ValueError):
    pass


@dataclass(frozen=True)
class KodairaType:
    symbol: str  # 'I', 'I*', 'II', 'III', 'IV', 'IV*', 'III*', 'II*'
    n: int = 0

    @property
    def name(self) -> str:
        if self.symbol == "I":
            return f"I{self.n}"
        if self.symbol == "I*":
            return f"I{self.n}*"
        return self.symbol

    @property
    def components(self) -> int:
        return {
            "I": max(self.n, 1), "II": 1, "III": 2, "IV": 3,
            "I*": self.n + 5, "IV*": 7, "III*": 8, "II*": 9,
        }[self.symbol]

    @property
    def epsilon(self) -> int:
        return {
            "I": self.n, "II": 2, "III": 3, "IV": 4,
            "I*": self.n + 6, "IV*": 8, "III*": 9, "II*": 10,
        }[self.symbol]

    @property
    def simple_components(self) -> int:
        return {
            "I": max(self.n, 1), "II": 1, "III": 2, "IV": 3,
            "I*": 4, "IV*": 3, "III*": 2, "II*": 1,
        }[self.symbol]

    @property
    def root_lattice(self):
        """(letter, rank) of the lattice spanned by the non-identity components."""
        rank = self.components - 1
        if rank == 0:
            return None
        letter = {"I": "A", "III": "A", "IV": "A", "I*": "D", "IV*": "E", "III*": "E", "II*": "E"}[self.symbol]
        return letter, rank

    def is_multiplicative(self) -> bool:
        return self.symbol == "I" and self.n > 0

    def __str__(self):
        return self.name


def parse_type(name: str) -> KodairaType:
    if name in ("II", "III", "IV", "IV*", "III*", "II*"):
        return KodairaType(name)
    if name.startswith("I") and name.endswith("*"):
        return KodairaType("I*", int(name[1:-1]))
    if name.startswith("I") and name[1:].isdigit():
        return KodairaType("I", int(name[1:]))
    raise ValueError(f"unknown Kodaira symbol {name!r}")


def classify(ord_c4, ord_c6, ord_disc) -> KodairaType:
    """Kodaira type over an algebraically closed residue field of char 0."""
    c4, c6, d = ord_c4, ord_c6, ord_disc
    if d >= 12 and c4 >= 4:
        raise NonMinimal(f"non-minimal triple {(c4, c6, d)}")
    if d == 0:
        return KodairaType("I", 0)
    if c4 == 0:
        if c6 != 0:
            raise Unclassifiable(f"{(c4, c6, d)}")
        return KodairaType("I", d)
    # additive reduction: c4 and c6 both vanish
    if c6 == 0:
        raise Unclassifiable(f"{(c4, c6, d)}")
    if d == 2 and c6 == 1:
        return KodairaType("II")
    if d == 3 and c4 == 1 and c6 >= 2:
        return KodairaType("III")
    if d == 4 and c4 >= 2 and c6 == 2:
        return KodairaType("IV")
    if d == 6 and c4 >= 2 and c6 >= 3 and (c4 == 2 or c6 == 3):
        return KodairaType("I*", 0)
    if d > 6 and c4 == 2 and c6 == 3:
        return KodairaType("I*", d - 6)
    if d == 8 and c4 >= 3 and c6 == 4:
        return KodairaType("IV*")
    if d == 9 and c4 == 3 and c6 >= 5:
        return KodairaType("III*")
    if d == 10 and c4 >= 4 and c6 == 5:
        return KodairaType("II*")
    raise Unclassifiable(f"no Kodaira type for {(c4, c6, d)}")


@dataclass(frozen=True)
class FiberData:
    place: Place
    kodaira_type: KodairaType
    count: int = 1  # number of conjugate places sharing this description
    roots: tuple | None = None  # ('binomial', k, c): roots of t^k = c

    @property
    def m(self) -> int:
        return self.kodaira_type.components

    @property
    def epsilon(self) -> int:
        return self.kodaira_type.epsilon

    @property
    def simple_components(self) -> int:
        return self.kodaira_type.simple_components


def local_type(model: WeierstrassModel) -> KodairaType:
    """Type at the origin of the chart ``model`` lives in."""
    c4, c6, disc, _ = invariants(model)
    return classify(c4.low, c6.low, disc.low)


def fiber_config(model: WeierstrassModel) -> list:
    c4, c6, disc, _ = invariants(model)
    out = []
    z = zero_chart(model)
    t0 = local_type(z)
    if t0.epsilon:
        out.append(FiberData(Place.finite(0), t0))
    rest = disc.shift(-disc.low)
    if rest.degree > 0:
        if rest.degree != rest.deflation() or len(rest.terms) != 2:
            sq = poly_gcd(rest, rest.derivative())
            if sq.degree > 0:
                raise UnsupportedDiscriminant("repeated roots away from 0 and inf")
            out.append(FiberData(Place.finite(None), KodairaType("I", 1), rest.degree, ("factor", rest.degree)))
        else:
            k = rest.degree
            c = -rest.coeff(0) / rest.coeff(k)
            out.append(FiberData(Place.finite(None), KodairaType("I", 1), k, ("binomial", k, c)))
    inf_model = infinity_chart(model)
    out.append(FiberData(Place.infinity(), local_type(inf_model)))
    return out


def euler_and_canonical(config) -> tuple:
    total = sum(f.epsilon * f.count for f in config)
    if total % 12:
        raise EpsilonSumNotDivisible(f"sum of epsilon is {total}")
    d = total // 12
    return d, d - 2, -d


def correction_sum(config) -> int:
    """Sum of (m_t - 1) over the singular fibers."""
    return sum((f.m - 1) * f.count for f in config)
