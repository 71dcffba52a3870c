"""The l-times multiplication map and its graded-degree consequences.

``X'`` is never built as a separate fan: it shares the fan of ``X`` and a
degree ``m~`` of ``X'`` is identified with the degree ``l * m~`` of ``X``.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .cohomology import (
    CohomologyBasis,
    LogForms,
    ReflexiveDiv,
    SheafSpec,
    cohomology_table,
    degree_dims,
    graded_complex,
)
from .divisors import (
    QWeilDivisor,
    canonical_divisor,
    is_cartier,
    positivity,
    rounding,
    section_polytope,
)
from .exactlin import QQ, Field, dot, lattice_points, rank_filtered, smith_normal_form
from .fans import Fan

IntVec = Tuple[int, ...]


class MultMapError(ValueError):
    pass


class PreconditionError(MultMapError):
    pass


class NotASection(MultMapError):
    pass


class NotNefError(MultMapError):
    pass


@dataclass(frozen=True)
class MultiplicationMap:
    l: int
    fan: Fan

    def __post_init__(self):
        if self.l < 1:
            raise MultMapError("level must be >= 1")

    def degree_on_x(self, m_small: Sequence[int]) -> IntVec:
        return tuple(self.l * x for x in m_small)


def pullback_divisor(F: MultiplicationMap, D: QWeilDivisor) -> QWeilDivisor:
    return D * F.l


def residue_representatives(n: int, l: int) -> List[IntVec]:
    """Representatives of ``M / lM`` read off the Smith form of ``l * I``."""
    U, S, V = smith_normal_form([[l * int(i == j) for j in range(n)] for i in range(n)])
    diag = [S[i][i] for i in range(n)]
    reps = []
    for y in itertools.product(*(range(d) for d in diag)):
        # x = V y ranges over a transversal of the image of l*I
        x = tuple(sum(V[j][k] * y[k] for k in range(n)) for j in range(n))
        reps.append(tuple(xi % l for xi in x))
    return sorted(set(reps))


@dataclass(frozen=True)
class EigensheafDecomposition:
    l: int
    D: QWeilDivisor
    classes: Tuple[Tuple[IntVec, QWeilDivisor], ...]

    def by_class(self) -> Dict[IntVec, QWeilDivisor]:
        return dict(self.classes)


def eigen_decomposition(F: MultiplicationMap, D: QWeilDivisor) -> EigensheafDecomposition:
    """``E_c = sum floor((d + <c,u>)/l) D_rho`` for each class ``c`` of ``M/lM``."""
    if not D.is_integral:
        raise PreconditionError("eigen decomposition needs an integral divisor")
    fan, l = F.fan, F.l
    d = D.ints()
    out = []
    for c in residue_representatives(fan.rank, l):
        E = tuple((d[i] + dot(c, u)) // l for i, u in enumerate(fan.rays))
        out.append((c, QWeilDivisor(E)))
    return EigensheafDecomposition(l, D, tuple(out))


def check_decomposition(F: MultiplicationMap, D: QWeilDivisor, field: Field = QQ) -> dict:
    """Compare ``sum_c h^i(E_c)`` with ``h^i(D)`` and check the degree classes partition."""
    fan, l = F.fan, F.l
    dec = eigen_decomposition(F, D)
    big = cohomology_table(fan, ReflexiveDiv(D), field)
    total = [0] * (fan.rank + 1)
    covered: Dict[IntVec, IntVec] = {}
    for c, E in dec.classes:
        t = cohomology_table(fan, ReflexiveDiv(E), field)
        for i, x in enumerate(t.h):
            total[i] += x
        for mt, dims in t.per_degree.items():
            m = tuple(l * a + b for a, b in zip(mt, c))
            if m in covered:
                raise AssertionError("degree classes overlap")
            covered[m] = dims
    per_ok = covered == big.per_degree
    return {"lhs": total, "rhs": list(big.h), "holds": total == list(big.h) and per_ok,
            "per_degree_match": per_ok}


# ---------------------------------------------------------------------------
# Graded correspondences


@dataclass(frozen=True)
class Floor:
    name = "Floor"


@dataclass(frozen=True)
class CeilCanonical:
    name = "CeilCanonical"


@dataclass(frozen=True)
class CeilCanonicalPlusB:
    B: frozenset
    name = "CeilCanonicalPlusB"


@dataclass(frozen=True)
class LogFamily:
    a: int
    B: frozenset
    name = "LogForms"


Family = object


@dataclass
class Violation:
    degree: IntVec
    i: int
    lhs: int
    rhs: int

    def to_json(self) -> dict:
        return {"degree": list(self.degree), "i": self.i, "lhs": self.lhs, "rhs": self.rhs}


@dataclass
class CorrespondenceReport:
    family: str
    l: int
    violations: List[Violation]
    small_h: Tuple[int, ...]
    target_h: Tuple[int, ...]
    degrees_checked: int

    @property
    def holds(self) -> bool:
        return not self.violations

    @property
    def monotone(self) -> bool:
        return all(a <= b for a, b in zip(self.small_h, self.target_h))

    def to_json(self) -> dict:
        return {"family": self.family, "l": self.l,
                "violations": [v.to_json() for v in self.violations]}


def correspondence_pair(F: MultiplicationMap, family, D: QWeilDivisor) -> Tuple[SheafSpec, SheafSpec]:
    """``(small, target)`` sheaves for a family; ``D`` is the rational divisor (or ``G``)."""
    fan, l = F.fan, F.l
    K = canonical_divisor(fan)
    if isinstance(family, LogFamily):
        if not D.is_integral:
            raise PreconditionError("LogForms twist must be integral")
        return LogForms(family.a, family.B, D), LogForms(family.a, family.B, D * l)
    lD = D * l
    if not lD.is_integral:
        raise PreconditionError(f"{l}*D is not integral")
    r = rounding(D)
    if isinstance(family, Floor):
        return ReflexiveDiv(r.floor), ReflexiveDiv(lD)
    if isinstance(family, CeilCanonical):
        return ReflexiveDiv(K + r.ceil), ReflexiveDiv(K + lD)
    if isinstance(family, CeilCanonicalPlusB):
        if family.B & r.frac.support():
            raise PreconditionError("B and the fractional part of D share a component")
        Bd = QWeilDivisor.boundary(fan.n_rays, family.B)
        return ReflexiveDiv(K + Bd + r.ceil), ReflexiveDiv(K + Bd + lD)
    raise MultMapError(f"unknown family {family!r}")


def graded_correspondence_check(F: MultiplicationMap, family, D: QWeilDivisor,
                                field: Field = QQ) -> CorrespondenceReport:
    fan, l = F.fan, F.l
    small, target = correspondence_pair(F, family, D)
    ts = cohomology_table(fan, small, field)
    tt = cohomology_table(fan, target, field)
    viol = []
    for mt, dims in ts.per_degree.items():
        m = F.degree_on_x(mt)
        big = degree_dims(fan, target, m, field)
        for i, (x, y) in enumerate(zip(dims, big)):
            if x != y:
                viol.append(Violation(m, i, y, x))
    # target degrees divisible by l must come from nonzero small degrees
    for m, dims in tt.per_degree.items():
        if all(x % l == 0 for x in m):
            mt = tuple(x // l for x in m)
            if mt not in ts.per_degree:
                for i, y in enumerate(dims):
                    if y:
                        viol.append(Violation(m, i, y, 0))
    return CorrespondenceReport(family.name, l, viol, ts.h, tt.h, len(ts.per_degree))


# ---------------------------------------------------------------------------
# Multiplication by sections


@lru_cache(maxsize=512)
def _cohomology_bases(fan: Fan, D: QWeilDivisor, i: int, field: Field):
    """Per-degree cohomology bases of ``H^i(O(D))``."""
    spec = ReflexiveDiv(D)
    table = cohomology_table(fan, spec, field)
    out = []
    for m, dims in table.per_degree.items():
        if dims[i]:
            cx = graded_complex(fan, spec, m, field)
            out.append((m, cx.cohomology_basis(i)))
    return out


@dataclass
class SectionMatrix:
    source_degrees: List[IntVec]
    target_degrees: List[IntVec]
    matrix: List[List]  # rows: target basis, cols: source basis
    field: Field

    @property
    def shape(self) -> Tuple[int, int]:
        return (len(self.matrix), len(self.matrix[0]) if self.matrix else self.ncols)

    ncols: int = 0

    def rank(self) -> int:
        if not self.matrix or not self.matrix[0]:
            return 0
        M = self.matrix
        if self.field.is_rational:
            den = math.lcm(*(Fraction(x).denominator for row in M for x in row))
            M = [[int(Fraction(x) * den) for x in row] for row in M]
        return rank_filtered(M, self.field)

    def injective(self) -> bool:
        return self.rank() == self.ncols


@lru_cache(maxsize=512)
def _section_basis_data(fan, D, i, field):
    bases = _cohomology_bases(fan, D, i, field)
    index = []
    for m, cb in bases:
        for k in range(cb.dim):
            index.append((m, k))
    return bases, index


def section_multiplication_map(fan: Fan, L: QWeilDivisor, l: int, w: Sequence[int], m: int,
                               i: int, field: Field = QQ, check: bool = True) -> SectionMatrix:
    """Matrix of ``x^w : H^i(O(K + mL)) -> H^i(O(K + (m+l)L))`` in per-degree bases."""
    return section_combination_map(fan, L, l, [(1, tuple(w))], m, i, field, check)


def section_combination_map(fan: Fan, L: QWeilDivisor, l: int, terms, m: int, i: int,
                            field: Field = QQ, check: bool = True) -> SectionMatrix:
    """Matrix of ``sum c_w x^w`` (a k-linear combination of eigensections)."""
    if l < 0 or m < 0:
        raise MultMapError("l and m must be nonnegative")
    if check:
        if not is_cartier(fan, L):
            raise MultMapError("L must be integral Cartier")
        if not positivity(fan, L).is_nef:
            raise NotNefError("L is not nef")
    P = section_polytope(fan, L * l)
    for _, w in terms:
        if not P.contains(w):
            raise NotASection(f"{list(w)} is not a lattice point of P_{{{l}L}}")
    K = canonical_divisor(fan)
    src_D = K + L * m
    tgt_D = K + L * (m + l)
    src, src_index = _section_basis_data(fan, src_D, i, field)
    tgt, tgt_index = _section_basis_data(fan, tgt_D, i, field)
    tgt_by_deg = {deg: cb for deg, cb in tgt}
    trow = {key: r for r, key in enumerate(tgt_index)}
    M = [[Fraction(0) if field.is_rational else 0 for _ in src_index] for _ in tgt_index]
    col = 0
    for deg, cb in src:
        for k in range(cb.dim):
            rep = cb.reps[k]
            for c, w in terms:
                shifted = tuple(a + b for a, b in zip(deg, w))
                tcb = tgt_by_deg.get(shifted)
                if tcb is None:
                    # target degree has zero H^i; the image class vanishes
                    continue
                coords = tcb.coordinates(rep)
                for kk, x in enumerate(coords):
                    r = trow[(shifted, kk)]
                    if field.is_rational:
                        M[r][col] += c * Fraction(x)
                    else:
                        M[r][col] = (M[r][col] + c * x) % field.p
            col += 1
    return SectionMatrix([d for d, _ in src_index], [d for d, _ in tgt_index], M, field,
                         ncols=len(src_index))


def eigensections(fan: Fan, L: QWeilDivisor, l: int) -> List[IntVec]:
    return [tuple(p) for p in lattice_points(section_polytope(fan, L * l))]


def random_combinations(sections: Sequence[IntVec], count: int = 5, seed: int = 0,
                        span: int = 3, field: Field = QQ) -> List[List[Tuple[int, IntVec]]]:
    """Seeded combinations whose coefficients are nonzero in ``field``."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        terms = []
        for w in sections:
            c = rng.randint(-span, span)
            if c and (field.is_rational or c % field.p):
                terms.append((c, w))
        if not terms and sections:
            terms = [(1, sections[0])]
        out.append(terms)
    return out
