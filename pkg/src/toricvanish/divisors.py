"""Torus-invariant Q-Weil divisors: rounding, Cartier data, positivity, polytopes."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

from .exactlin import (
    Ineq,
    IneqSystem,
    affine_dimension,
    as_fraction,
    dot,
    is_empty,
    lattice_points,
    solve_integer,
    solve_rational,
)
from .fans import Fan, is_complete

DEFAULT_QCARTIER_CAP = 60


class DivisorError(ValueError):
    pass


class NotCartier(DivisorError):
    pass


class NotQCartier(DivisorError):
    pass


class NotNef(DivisorError):
    pass


class NotComplete(DivisorError):
    pass


@dataclass(frozen=True)
class QWeilDivisor:
    coeffs: Tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(as_fraction(c) for c in self.coeffs))

    @classmethod
    def of(cls, coeffs: Iterable) -> "QWeilDivisor":
        return cls(tuple(coeffs))

    @classmethod
    def zero(cls, n: int) -> "QWeilDivisor":
        return cls((0,) * n)

    @classmethod
    def prime(cls, n: int, i: int, c=1) -> "QWeilDivisor":
        return cls(tuple(c if j == i else 0 for j in range(n)))

    @classmethod
    def boundary(cls, n: int, B: Iterable[int]) -> "QWeilDivisor":
        B = set(B)
        return cls(tuple(1 if j in B else 0 for j in range(n)))

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, i):
        return self.coeffs[i]

    def __iter__(self):
        return iter(self.coeffs)

    def _check(self, other: "QWeilDivisor"):
        if len(other) != len(self):
            raise DivisorError("divisors live on different fans")

    def __add__(self, other: "QWeilDivisor") -> "QWeilDivisor":
        self._check(other)
        return QWeilDivisor(tuple(a + b for a, b in zip(self, other)))

    def __sub__(self, other: "QWeilDivisor") -> "QWeilDivisor":
        self._check(other)
        return QWeilDivisor(tuple(a - b for a, b in zip(self, other)))

    def __neg__(self) -> "QWeilDivisor":
        return QWeilDivisor(tuple(-a for a in self))

    def __mul__(self, k) -> "QWeilDivisor":
        k = as_fraction(k)
        return QWeilDivisor(tuple(k * a for a in self))

    __rmul__ = __mul__

    @property
    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def ints(self) -> Tuple[int, ...]:
        if not self.is_integral:
            raise DivisorError(f"divisor {self} is not integral")
        return tuple(int(c) for c in self.coeffs)

    def support(self) -> frozenset:
        return frozenset(i for i, c in enumerate(self.coeffs) if c != 0)

    def denominator(self) -> int:
        return math.lcm(*(c.denominator for c in self.coeffs)) if self.coeffs else 1

    def to_json(self) -> dict:
        return {"coeffs": [str(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, data) -> "QWeilDivisor":
        try:
            raw = data["coeffs"] if isinstance(data, dict) else data
            return cls(tuple(Fraction(str(c)) for c in raw))
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise DivisorError(f"malformed divisor JSON: {exc}") from None

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.coeffs) + ")"


def _on(fan: Fan, D: QWeilDivisor) -> QWeilDivisor:
    if not isinstance(D, QWeilDivisor):
        D = QWeilDivisor.of(D)
    if len(D) != fan.n_rays:
        raise DivisorError(f"divisor has {len(D)} coefficients but fan has {fan.n_rays} rays")
    return D


@dataclass(frozen=True)
class Rounding:
    floor: QWeilDivisor
    ceil: QWeilDivisor
    frac: QWeilDivisor


def rounding(D: QWeilDivisor) -> Rounding:
    fl = tuple(Fraction(math.floor(c)) for c in D)
    ce = tuple(Fraction(math.ceil(c)) for c in D)
    fr = tuple(c - f for c, f in zip(D, fl))
    return Rounding(QWeilDivisor(fl), QWeilDivisor(ce), QWeilDivisor(fr))


def canonical_divisor(fan: Fan) -> QWeilDivisor:
    return QWeilDivisor((-1,) * fan.n_rays)


# ---------------------------------------------------------------------------
# Cartier structure


@dataclass(frozen=True)
class CartierData:
    """Local characters ``m_sigma`` with ``<m_sigma, u_rho> = -d_rho`` on each maximal cone."""

    m: Tuple[Tuple[Fraction, ...], ...]

    def to_json(self) -> dict:
        return {"m": [[str(x) for x in v] for v in self.m]}


def cartier_data(fan: Fan, D: QWeilDivisor, integral: bool = True) -> CartierData:
    """Local data of ``D``.

    With ``integral=True`` the divisor must be integral and every ``m_sigma``
    must lie in ``M`` (a genuine Cartier divisor).  With ``integral=False``
    rational ``m_sigma`` are accepted (``D`` is Q-Cartier).
    """
    D = _on(fan, D)
    if integral and not D.is_integral:
        raise NotCartier(f"{D} is not integral")
    out = []
    for k, c in enumerate(fan.max_cones):
        A = [list(fan.rays[i]) for i in c]
        b = [-D[i] for i in c]
        if integral:
            sol = solve_integer(A, [int(x) for x in b], fan.rank)
        else:
            sol = solve_rational(A, b)
        if sol is None:
            raise NotCartier(f"{D} is not Cartier on maximal cone {k}")
        sol = tuple(Fraction(x) for x in sol)
        for i in c:  # defining equations, exactly
            assert dot(sol, fan.rays[i]) == -D[i]
        out.append(sol)
    return CartierData(tuple(out))


def is_cartier(fan: Fan, D: QWeilDivisor) -> bool:
    try:
        cartier_data(fan, D)
        return True
    except NotCartier:
        return False


def is_q_cartier(fan: Fan, D: QWeilDivisor) -> bool:
    try:
        cartier_data(fan, D, integral=False)
        return True
    except NotCartier:
        return False


def q_cartier_index(fan: Fan, D: QWeilDivisor, cap: int = DEFAULT_QCARTIER_CAP) -> int:
    D = _on(fan, D)
    for l in range(1, cap + 1):
        lD = D * l
        if lD.is_integral and is_cartier(fan, lD):
            return l
    raise NotQCartier(f"{D} is not Q-Cartier with index <= {cap}")


def is_principal(fan: Fan, D: QWeilDivisor) -> bool:
    """True iff ``D`` is the divisor of a character (decided by an integer solve)."""
    D = _on(fan, D)
    if not D.is_integral:
        return False
    A = [list(u) for u in fan.rays]
    return solve_integer(A, [-int(x) for x in D], fan.rank) is not None


@dataclass(frozen=True)
class Positivity:
    is_nef: bool
    is_ample: bool


def positivity(fan: Fan, D: QWeilDivisor) -> Positivity:
    """Nef/ample via the support function; accepts any Q-Cartier ``D`` (scale-invariant)."""
    D = _on(fan, D)
    if not is_complete(fan):
        raise NotComplete("nef and ample are only defined here on complete fans")
    data = cartier_data(fan, D, integral=False)
    nef, strict = True, True
    for c, m in zip(fan.max_cones, data.m):
        cs = set(c)
        for i, u in enumerate(fan.rays):
            v = dot(m, u) + D[i]
            if v < 0:
                nef = False
            if i not in cs and v <= 0:
                strict = False
    return Positivity(nef, nef and strict)


def is_nef(fan: Fan, D: QWeilDivisor) -> bool:
    try:
        return positivity(fan, D).is_nef
    except (NotCartier, NotComplete):
        return False


def is_ample(fan: Fan, D: QWeilDivisor) -> bool:
    try:
        return positivity(fan, D).is_ample
    except (NotCartier, NotComplete):
        return False


# ---------------------------------------------------------------------------
# Section polytopes


def section_polytope(fan: Fan, D: QWeilDivisor) -> IneqSystem:
    """``P_D = {m : <m, u_rho> >= -d_rho for all rays}``."""
    D = _on(fan, D)
    return IneqSystem(fan.rank, tuple(Ineq(u, -d, ">=") for u, d in zip(fan.rays, D)))


def polytope_points(fan: Fan, D: QWeilDivisor) -> List[Tuple[int, ...]]:
    return lattice_points(section_polytope(fan, D))


@dataclass(frozen=True)
class PolytopeKappa:
    polytope: IneqSystem
    kappa: Optional[int]  # None means no sections

    @property
    def no_sections(self) -> bool:
        return self.kappa is None


def polytope_and_kappa(fan: Fan, D: QWeilDivisor, l: Optional[int] = None) -> PolytopeKappa:
    """Section polytope of ``D`` and the Iitaka dimension of a nef Q-Cartier ``D``."""
    D = _on(fan, D)
    if not is_complete(fan):
        raise NotComplete("fan is not complete")
    if l is None:
        l = q_cartier_index(fan, D)
    lD = D * l
    if not lD.is_integral or not is_cartier(fan, lD):
        raise NotCartier(f"{l}*D is not integral Cartier")
    if not positivity(fan, lD).is_nef:
        raise NotNef(f"{D} is not nef")
    P = section_polytope(fan, D)
    if is_empty(P):
        return PolytopeKappa(P, None)
    return PolytopeKappa(P, affine_dimension(P))


def divisor_from_cartier(fan: Fan, m_by_cone: Sequence[Sequence]) -> QWeilDivisor:
    """Read ``d_rho = -<m_sigma, u_rho>`` from local data (first cone containing rho)."""
    d = [None] * fan.n_rays
    for c, m in zip(fan.max_cones, m_by_cone):
        for i in c:
            v = -dot(m, fan.rays[i])
            if d[i] is None:
                d[i] = v
            elif d[i] != v:
                raise NotCartier("local data disagree on a shared ray")
    return QWeilDivisor(tuple(d))


def pullback_along_refinement(old: Fan, new: Fan, D: QWeilDivisor) -> QWeilDivisor:
    """Pull a Q-Cartier divisor back along a refinement whose ray list extends ``old``'s."""
    D = _on(old, D)
    if new.rays[:old.n_rays] != old.rays:
        raise DivisorError("refinement must keep the original rays first, in order")
    data = cartier_data(old, D, integral=False)
    coeffs = list(D.coeffs)
    for v in new.rays[old.n_rays:]:
        k = next((k for k, c in enumerate(old.max_cones) if old.geometry(c).contains(v)), None)
        if k is None:
            raise DivisorError(f"ray {list(v)} is outside the support of the old fan")
        coeffs.append(-dot(data.m[k], v))
    return QWeilDivisor(tuple(coeffs))
