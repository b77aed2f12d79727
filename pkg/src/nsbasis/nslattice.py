"""Fibral Gram matrices, the fibral correction, the matrix N, exact
determinants and basis certificates."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .funcfield import Place
from .intersect import component_at, pair_intersection, zero_section_intersection
from .kodaira import FiberData, KodairaType, correction_sum, euler_and_canonical, fiber_config
from .mwsections import CLASSES, branch_candidates, catalog_points, mw_rank, units
from .weierstrass import build_family

# surfaces that are rational, where the divisors should form a Z-basis
RATIONAL_CASES = {
    1: {1, 2, 3, 4, 6, 7, 8, 12},
    2: {1, 2, 3, 4, 5, 6, 8, 9, 12},
    3: {1, 2, 3},
    4: {1, 2, 3, 4, 5, 6},
    5: {1, 2, 3, 4},
}


class CertificationFailed(RuntimeError):
    def __init__(self, msg, det=None, submatrix=None):
        super().__init__(msg)
        self.det = det
        self.submatrix = submatrix


class CrosscheckMismatch(AssertionError):
    pass


# ------------------------------------------------------------ Gram matrices

def _edges(kt: KodairaType):
    """Edges of the dual graph on the non-identity components 1..m-1."""
    s, r = kt.symbol, kt.components - 1
    if r == 0:
        return []
    if s in ("I", "III", "IV"):
        return [(i, i + 1) for i in range(1, r)]
    if s == "I*":
        if kt.n:
            raise NotImplementedError("I_n* with n > 0 does not occur in the families")
        return [(1, 4), (2, 4), (3, 4)]
    if s == "IV*":
        return [(1, 2), (2, 3), (3, 4), (4, 5), (3, 6)]
    if s == "III*":
        return [(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (3, 7)]
    if s == "II*":
        return [(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (5, 8)]
    raise ValueError(kt)


@dataclass(frozen=True)
class FiberGram:
    label: str
    matrix: tuple

    @property
    def size(self) -> int:
        return len(self.matrix)

    def as_lists(self):
        return [list(r) for r in self.matrix]


def fiber_gram(f) -> FiberGram:
    kt = f.kodaira_type if isinstance(f, FiberData) else f
    r = kt.components - 1
    if kt.symbol == "I" and kt.n == 2:
        m = [[-2]]
    else:
        m = [[-2 if i == j else 0 for j in range(r)] for i in range(r)]
        for a, b in _edges(kt):
            m[a - 1][b - 1] = m[b - 1][a - 1] = 1
    return FiberGram(kt.name, tuple(tuple(row) for row in m))


def a_inverse_row(n: int, j: int) -> list:
    """Row j of the inverse of the A_{n-1} Gram (entries c_1..c_{n-1})."""
    if not 1 <= j <= n - 1:
        raise ValueError("need 1 <= j <= n-1")
    return [Fraction(-min(i, j) * (n - max(i, j)), n) for i in range(1, n)]


# ------------------------------------------------------------ exact linear algebra

def det_exact(A) -> Fraction:
    """Determinant by fraction-free Bareiss elimination on a scaled integer copy."""
    n = len(A)
    if n == 0:
        return Fraction(1)
    rows = [[Fraction(v) for v in row] for row in A]
    if any(len(r) != n for r in rows):
        raise ValueError("matrix must be square")
    den = 1
    for r in rows:
        for v in r:
            den = den * v.denominator // math.gcd(den, v.denominator)
    M = [[int(v * den) for v in r] for r in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k]:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        piv = M[k][k]
        for i in range(k + 1, n):
            row_i, row_k = M[i], M[k]
            f = row_i[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * piv - f * row_k[j]) // prev
            row_i[k] = 0
        prev = piv
    return Fraction(sign * M[n - 1][n - 1], den ** n)


def solve_exact(A, b) -> list:
    """Solve A x = b over Q by Gauss-Jordan (small systems)."""
    n = len(A)
    M = [[Fraction(v) for v in row] + [Fraction(bi)] for row, bi in zip(A, b)]
    for c in range(n):
        p = next(r for r in range(c, n) if M[r][c] != 0)
        M[c], M[p] = M[p], M[c]
        inv = 1 / M[c][c]
        M[c] = [v * inv for v in M[c]]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c]
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    return [M[r][n] for r in range(n)]


def _inverse_gram(g: FiberGram) -> list:
    n = g.size
    cols = [solve_exact(g.matrix, [1 if i == j else 0 for i in range(n)]) for j in range(n)]
    return [[cols[j][i] for j in range(n)] for i in range(n)]


# ------------------------------------------------------------ incidences and N

@dataclass
class Incidence:
    """Per-section data needed by the lattice computations."""

    label: tuple
    components: dict  # place key -> component index (0 = identity)
    zero: int  # (P).O


def _special_fibers(config) -> dict:
    # fibers with non-identity components, keyed like intersect.local_charts
    out = {}
    for f in config:
        if f.m > 1:
            if f.place.kind == "infinity":
                out["infinity"] = f
            elif f.place.is_zero():
                out["zero"] = f
            else:
                raise CertificationFailed("reducible fiber away from 0 and inf")
    return out


def phi_correction(components: dict, grams: dict) -> dict:
    """Per place the rational vector a with sum_k a_k F_k.F_l = -D.F_l."""
    out = {}
    for key, g in grams.items():
        k = components.get(key, 0)
        if g.size == 0:
            continue
        if k == 0:
            out[key] = [Fraction(0)] * g.size
            continue
        rhs = [Fraction(-1 if l == k else 0) for l in range(1, g.size + 1)]
        out[key] = solve_exact(g.matrix, rhs)
    return out


def _phi_closed_form(n: int, k: int) -> list:
    # a_l = min(k, l)(n - max(k, l))/n for I_n
    return [Fraction(min(k, l) * (n - max(k, l)), n) for l in range(1, n)]


def n_matrix(incidences: list, pairs: dict, grams: dict, chi: int) -> list:
    r = len(incidences)
    phis = [phi_correction(inc.components, grams) for inc in incidences]
    N = [[Fraction(0)] * r for _ in range(r)]
    for i, a in enumerate(incidences):
        for j, b in enumerate(incidences):
            if i == j:
                dd = -2 * chi - 2 * a.zero
            else:
                dd = pairs[(i, j)] - a.zero - b.zero - chi
            corr = Fraction(0)
            for key, vec in phis[i].items():
                kj = b.components.get(key, 0)
                if kj:
                    corr += vec[kj - 1]
            N[i][j] = Fraction(dd) + corr
    return N


_CONTR_SAME = {"III": Fraction(1, 2), "IV": Fraction(2, 3), "I*": Fraction(1), "IV*": Fraction(4, 3),
               "III*": Fraction(3, 2)}
_CONTR_DIFF = {"IV": Fraction(1, 3), "I*": Fraction(1, 2), "IV*": Fraction(2, 3)}


def local_contribution(kt: KodairaType, k: int, l: int) -> Fraction:
    """Standard local height correction contr(P, Q) for components k, l."""
    if k == 0 or l == 0:
        return Fraction(0)
    if kt.symbol == "I":
        a, b = min(k, l), max(k, l)
        return Fraction(a * (kt.n - b), kt.n)
    if k == l:
        return _CONTR_SAME[kt.symbol]
    return _CONTR_DIFF[kt.symbol]


def height_crosscheck(incidences: list, pairs: dict, fibers: dict, chi: int, N=None) -> list:
    """Height pairing matrix; checked against -N when N is given."""
    r = len(incidences)
    H = [[Fraction(0)] * r for _ in range(r)]
    for i, a in enumerate(incidences):
        for j, b in enumerate(incidences):
            pq = -chi if i == j else pairs[(i, j)]
            contr = sum((local_contribution(f.kodaira_type, a.components.get(key, 0), b.components.get(key, 0))
                         for key, f in fibers.items()), Fraction(0))
            H[i][j] = chi + a.zero + b.zero - pq - contr
    if N is not None:
        for i in range(r):
            for j in range(r):
                if H[i][j] != -N[i][j]:
                    raise CrosscheckMismatch(f"H[{i}][{j}] = {H[i][j]} but -N = {-N[i][j]}")
    return H


def full_matrix(incidences: list, pairs: dict, grams: dict, chi: int):
    """Intersection matrix of C0, inf, D_i, F_{t,a} and its divisor labels."""
    labels = ["C0", "inf"] + [f"D_{a.label[0]},{a.label[1]}" for a in incidences]
    fib = []
    for key in sorted(grams):
        for a in range(1, grams[key].size + 1):
            fib.append((key, a))
            labels.append(f"F_{key},{a}")
    r = len(incidences)
    size = 2 + r + len(fib)
    M = [[0] * size for _ in range(size)]
    M[0][1] = M[1][0] = 1
    M[1][1] = -chi
    for i, a in enumerate(incidences):
        M[1][2 + i] = M[2 + i][1] = a.zero + chi
        for j, b in enumerate(incidences):
            if i == j:
                M[2 + i][2 + j] = -2 * chi - 2 * a.zero
            else:
                M[2 + i][2 + j] = pairs[(i, j)] - a.zero - b.zero - chi
        for f, (key, comp) in enumerate(fib):
            v = 1 if a.components.get(key, 0) == comp else 0
            M[2 + i][2 + r + f] = M[2 + r + f][2 + i] = v
    for f, (key, comp) in enumerate(fib):
        for g, (key2, comp2) in enumerate(fib):
            if key == key2:
                M[2 + r + f][2 + r + g] = grams[key].matrix[comp - 1][comp2 - 1]
    return M, labels


def fibral_orthogonality(incidences: list, grams: dict) -> bool:
    """(D_i + Phi_i).F_{t,l} = 0 for every fibral component."""
    for inc in incidences:
        phi = phi_correction(inc.components, grams)
        for key, g in grams.items():
            vec = phi.get(key, [Fraction(0)] * g.size)
            k = inc.components.get(key, 0)
            for l in range(1, g.size + 1):
                total = (1 if k == l else 0) + sum(vec[a] * g.matrix[a][l - 1] for a in range(g.size))
                if total != 0:
                    return False
    return True


# ------------------------------------------------------------ pipeline

@dataclass
class BasisCertificate:
    family: int
    n: int
    divisors: list
    N: list
    detN: Fraction
    detM: Fraction
    detM_blocks: Fraction
    rho: int
    rank: int
    verdict: str
    chi: int
    fibers: list = field(default_factory=list)
    points: list = field(default_factory=list)
    incidences: list = field(default_factory=list)
    pairs: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)


@dataclass
class Instance:
    """Everything needed to assemble N and M for one surface."""

    family: int
    n: int
    model: object
    config: list
    chi: int
    points: list
    incidences: list
    pairs: dict
    fibers: dict
    grams: dict


def build_instance(family: int, n: int, precision: int = 256, points=None, overrides=None) -> Instance:
    model = build_family(family, n)
    config = fiber_config(model)
    chi = euler_and_canonical(config)[0]
    if points is None:
        points = catalog_points(family, n, precision=precision, overrides=overrides)
    pts = points
    fibers = _special_fibers(config)
    grams = {key: fiber_gram(f) for key, f in fibers.items()}
    places = {"zero": Place.finite(0), "infinity": Place.infinity()}
    incs = []
    for p in pts:
        comps = {key: component_at(p, places[key], fibers[key], model) for key in fibers}
        incs.append(Incidence((p.d, p.j), comps, zero_section_intersection(p, model)))
    pairs = {}
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            pairs[(i, j)] = pairs[(j, i)] = pair_intersection(pts[i], pts[j], model)
    return Instance(family, n, model, config, chi, pts, incs, pairs, fibers, grams)


def certificate_from_instance(inst: Instance, strict: bool = False) -> BasisCertificate:
    N = n_matrix(inst.incidences, inst.pairs, inst.grams, inst.chi)
    notes = []
    for i in range(len(N)):
        for j in range(i):
            if N[i][j] != N[j][i]:
                raise CertificationFailed(f"N is not symmetric at ({i}, {j})")
    height_crosscheck(inst.incidences, inst.pairs, inst.fibers, inst.chi, N)
    if not fibral_orthogonality(inst.incidences, inst.grams):
        raise CertificationFailed("fibral orthogonality failed")
    detN = det_exact(N) if N else Fraction(1)
    prod = 1
    for g in inst.grams.values():
        prod *= det_exact(g.matrix)
    # block route: det M = -det N * prod det(M_alpha); -1 from the C0/inf block
    detM_blocks = -detN * prod
    M, labels = full_matrix(inst.incidences, inst.pairs, inst.grams, inst.chi)
    detM = det_exact(M)
    if detM != detM_blocks:
        raise CertificationFailed(f"det M mismatch: direct {detM}, block product {detM_blocks}", detM, M)
    r = mw_rank(inst.family, inst.n)
    rho = r + 2 + correction_sum(inst.config)
    if len(inst.points) != r:
        raise CertificationFailed(f"catalog has {len(inst.points)} points, rank is {r}")
    if detN == 0:
        verdict = "fail"
    elif inst.n in RATIONAL_CASES[inst.family]:
        verdict = "z-basis" if abs(detM) == 1 else "q-basis"
        if abs(detM) != 1:
            notes.append(f"rational surface but |det M| = {abs(detM)}")
    else:
        verdict = "q-basis"
    if strict and verdict == "fail":
        raise CertificationFailed("det N vanishes", detN, N)
    return BasisCertificate(inst.family, inst.n, labels, N, detN, detM, detM_blocks, rho, r, verdict,
                            inst.chi, inst.config, inst.points, inst.incidences, inst.pairs, notes)


def certify_basis(family: int, n: int, precision: int = 256, strict: bool = False) -> BasisCertificate:
    return certificate_from_instance(build_instance(family, n, precision), strict)


def flip_orientation(inst: Instance) -> Instance:
    """Relabel I_n components k -> n - k for every section at once."""
    incs = []
    for inc in inst.incidences:
        comps = dict(inc.components)
        for key, f in inst.fibers.items():
            kt = f.kodaira_type
            if kt.symbol == "I" and comps.get(key, 0):
                comps[key] = kt.n - comps[key]
        incs.append(Incidence(inc.label, comps, inc.zero))
    return Instance(inst.family, inst.n, inst.model, inst.config, inst.chi, inst.points, incs,
                    inst.pairs, inst.fibers, inst.grams)


def select_branches(d: int, checks, precision: int = 192):
    """First tie combination, in canonical order, passing every check.

    Several branch combinations of the tabled coefficients can be equally
    consistent with the table and the curve.  ``checks`` lists
    (family, n, 'q' | 'z'): 'q' needs det N != 0, 'z' needs |det M| = 1.
    Returns {(d, class): rough coefficients} for the classes of degree d.
    """
    classes = sorted(set(CLASSES.get(d, {j: j for j in units(d)}).values()))
    cands = [branch_candidates(d, c)[0] for c in classes]
    for combo in itertools.product(*cands):
        overrides = {(d, c): v for c, v in zip(classes, combo)}
        if all(_passes(fam, n, overrides, need, precision) for fam, n, need in checks):
            return overrides
    raise CertificationFailed(f"no branch combination of degree {d} passes {checks}")


def _passes(family, n, overrides, need, precision) -> bool:
    try:
        cert = certificate_from_instance(build_instance(family, n, precision, overrides=overrides))
    except CertificationFailed:
        return False
    if need == "z":
        return abs(cert.detM) == 1
    return cert.detN != 0
