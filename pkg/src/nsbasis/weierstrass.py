"""Short Weierstrass models y^2 = x^3 + a2 x^2 + a4 x + a6 over Q(t), the
five families used throughout, and the local charts at t = 0 and t = inf.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .funcfield import INF, Poly, const, t_power
from .numtower import TowerSpec


class SingularModel(ValueError):
    pass


class NonMinimalChart(ValueError):
    pass


# documentation only: the source equations before the change of variables
ORIGINAL_EQUATIONS = {
    4: "Y^2 = 4X^3 - 3u^(4n) X + u^(5n)(u^n - 2)",
    1: "Y^2 = 4X^3 - 3u^(4n) X + ... (Example 1 form)",
    2: "Y^2 = 4X^3 - 3u^n X - u^(2n)",
    3: "Y^2 = 4X^3 - 3u^(3n)(u^n - 8/9) X + u^(4n)(u^(2n) - (4/3)u^n + 8/27)",
    5: "Y^2 = 4X^3 - 3u^(12k+3)(u^(4k+1) - 3/4) X - u^(20k+5)(u^(4k+1) - 9/8)",
}

FAMILY_EQUATIONS = {
    1: "y^2 = x^3 + t^n x + t^n",
    2: "y^2 = x^3 + t^n x + t^(2n)",
    3: "y^2 = x^3 + x^2 + t^n x + t^(2n)/4",
    4: "y^2 = x^3 + x^2 + t^n",
    5: "y^2 = x^3 + x^2 + t^n x",
}


@dataclass(frozen=True)
class Chart:
    kind: str  # 'finite', 'infinity' or 'zero'
    twist: int = 0


@dataclass
class WeierstrassModel:
    a2: Poly
    a4: Poly
    a6: Poly
    chart: Chart = field(default_factory=lambda: Chart("finite"))
    family: int | None = None
    n: int | None = None

    def coefficients(self):
        return self.a2, self.a4, self.a6

    def rhs(self, x: Poly) -> Poly:
        return x * x * x + self.a2 * x * x + self.a4 * x + self.a6

    def residual(self, x: Poly, y: Poly) -> Poly:
        return y * y - self.rhs(x)

    def spec(self) -> TowerSpec:
        return self.a2.spec().merge(self.a4.spec()).merge(self.a6.spec())

    def __repr__(self):
        return f"WeierstrassModel(a2={self.a2}, a4={self.a4}, a6={self.a6}, chart={self.chart})"


def build_family(example: int, n: int) -> WeierstrassModel:
    if n < 1:
        raise ValueError("n must be positive")
    one = const(1)
    zero = Poly()
    tn = t_power(n)
    t2n = t_power(2 * n)
    if example == 1:
        a2, a4, a6 = zero, tn, tn
    elif example == 2:
        a2, a4, a6 = zero, tn, t2n
    elif example == 3:
        a2, a4, a6 = one, tn, t_power(2 * n, coeff=Fraction(1, 4))
    elif example == 4:
        a2, a4, a6 = one, zero, tn
    elif example == 5:
        a2, a4, a6 = one, tn, zero
    else:
        raise ValueError("family must be 1..5")
    return WeierstrassModel(a2, a4, a6, Chart("finite"), example, n)


def invariants(model: WeierstrassModel):
    """(c4, c6, Delta, j) with j returned as a (numerator, denominator) pair."""
    a2, a4, a6 = model.coefficients()
    c4 = a2 * a2 * 16 - a4 * 48
    c6 = a2 * a2 * a2 * (-64) + a2 * a4 * 288 - a6 * 864
    disc = (a2 * a2 * a2 * a6 * 4 - a2 * a2 * a4 * a4 + a4 * a4 * a4 * 4 + a6 * a6 * 27 - a2 * a4 * a6 * 18) * (-16)
    if disc.is_zero():
        raise SingularModel("discriminant vanishes identically")
    return c4, c6, disc, (c4 * c4 * c4, disc)


def _ords_at_zero(model: WeierstrassModel):
    return tuple(p.low for p in model.coefficients())


def infinity_chart(model: WeierstrassModel) -> WeierstrassModel:
    """Local model at t = inf: xb = x/t^(2m), yb = y/t^(3m), tb = 1/t with the
    smallest twist m making the coefficients polynomial in tb."""
    if model.chart.kind != "finite":
        raise ValueError("expected a finite-chart model")
    m = 0
    for i, a in zip((1, 2, 3), model.coefficients()):
        if not a.is_zero():
            m = max(m, -(-a.degree // (2 * i)))
    a2, a4, a6 = (a.reciprocal(2 * i * m) for i, a in zip((1, 2, 3), model.coefficients()))
    out = WeierstrassModel(a2, a4, a6, Chart("infinity", m), model.family, model.n)
    _require_minimal(out)
    return out


def zero_chart(model: WeierstrassModel) -> WeierstrassModel:
    """Local model at t = 0: x' = x/t^(2s), y' = y/t^(3s) with the largest s
    keeping the coefficients integral at 0."""
    if model.chart.kind != "finite":
        raise ValueError("expected a finite-chart model")
    s = None
    for i, a in zip((1, 2, 3), model.coefficients()):
        if not a.is_zero():
            cap = a.low // (2 * i)
            s = cap if s is None else min(s, cap)
    s = s or 0
    a2, a4, a6 = (a.shift(-2 * i * s) for i, a in zip((1, 2, 3), model.coefficients()))
    out = WeierstrassModel(a2, a4, a6, Chart("zero", s), model.family, model.n)
    _require_minimal(out)
    return out


def _require_minimal(model: WeierstrassModel) -> None:
    c4, _, disc, _ = invariants(model)
    if disc.low >= 12 and c4.low >= 4:
        raise NonMinimalChart(f"model is not minimal at the chart origin: {model}")


def transport_point(x: Poly, y: Poly, chart: Chart):
    """Express a finite-chart point in a local chart (Laurent polynomials)."""
    if chart.kind == "finite":
        return x, y
    m = chart.twist
    if chart.kind == "zero":
        return x.shift(-2 * m), y.shift(-3 * m)
    # infinity: x(1/tb) * tb^(2m)
    return x.reciprocal(2 * m), y.reciprocal(3 * m)


def depressed(model: WeierstrassModel):
    """(A, B) with y^2 = X^3 + A X + B, X = x + a2/3."""
    a2, a4, a6 = model.coefficients()
    third = Fraction(1, 3)
    A = a4 - a2 * a2 * third
    B = a6 - a2 * a4 * third + a2 * a2 * a2 * Fraction(2, 27)
    return A, B


def mirror_family1_to_2(model: WeierstrassModel) -> WeierstrassModel:
    """Transport family 1 with n = 2m through x/t^(2m), y/t^(3m), 1/t."""
    if model.family != 1 or model.n % 2:
        raise ValueError("needs family 1 with even n")
    m = model.n // 2
    a2, a4, a6 = (a.reciprocal(2 * i * m) for i, a in zip((1, 2, 3), model.coefficients()))
    return WeierstrassModel(a2, a4, a6, Chart("finite"), 2, model.n)


def mirror_point_1_to_2(x: Poly, y: Poly, n: int):
    m = n // 2
    return x.reciprocal(2 * m), y.reciprocal(3 * m)


def ord_inf(p: Poly):
    return -p.degree if not p.is_zero() else INF
