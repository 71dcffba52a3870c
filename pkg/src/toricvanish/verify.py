"""Vanishing theorems as executable predicates over concrete toric instances."""

from __future__ import annotations

import enum
import hashlib
import json
import logging
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .cohomology import LogForms, ReflexiveDiv, cohomology_table
from .divisors import (
    DivisorError,
    NotCartier,
    QWeilDivisor,
    canonical_divisor,
    divisor_from_cartier,
    is_cartier,
    is_principal,
    is_q_cartier,
    polytope_and_kappa,
    polytope_points,
    positivity,
    pullback_along_refinement,
    q_cartier_index,
    rounding,
)
from .exactlin import QQ, Field, vec_gcd
from .fans import (
    Fan,
    FanError,
    ample_point,
    blowup_at_fixed_point,
    has_ample,
    hirzebruch,
    is_complete,
    product,
    projective_space,
    stellar_subdivide,
    weighted_projective,
)
from .multmap import (
    CeilCanonical,
    CeilCanonicalPlusB,
    Floor,
    LogFamily,
    MultiplicationMap,
    eigensections,
    graded_correspondence_check,
    random_combinations,
    section_combination_map,
)

log = logging.getLogger(__name__)

KAPPA_SEARCH_CAP = 12
COMBINATIONS = 5
# corpus line bundles stay small so cohomology tables stay desk-sized
COEFF_BOUND = 6
AMPLE_CANDIDATES = 6
KOLLAR_POINT_CAP = 80  # lattice points of P_{(m+l)N} in a corpus Kollar instance


class TheoremId(enum.Enum):
    MainI = "MainI"
    Bott = "Bott"
    Norimatsu = "Norimatsu"
    NorimatsuPrimeDivisors = "NorimatsuPrimeDivisors"
    Kodaira = "Kodaira"
    MainII = "MainII"
    KawamataViehweg = "KawamataViehweg"
    Vari = "Vari"
    Mustata = "Mustata"
    Bogomolov = "Bogomolov"
    KollarInjectivity = "KollarInjectivity"

    @classmethod
    def parse(cls, text: str) -> "TheoremId":
        for t in cls:
            if t.value.lower() == text.strip().lower():
                return t
        raise ValueError(f"unknown theorem {text!r}; choose from "
                         + ", ".join(t.value for t in cls))


class HypothesisFailure(Exception):
    pass


class InstanceError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Instances


def _div_json(D: Optional[QWeilDivisor]):
    return None if D is None else D.to_json()


def _div_from(data) -> Optional[QWeilDivisor]:
    return None if data is None else QWeilDivisor.from_json(data)


@dataclass(frozen=True)
class Instance:
    """A fan with the data consumed by the theorem checks.

    ``L``: ample integral Cartier; ``N``: nef integral Cartier;
    ``D`` with ``lD * D`` integral (Main II); ``D_kv`` nef Q-Cartier;
    ``D_vari`` ample Q-Cartier with ``B_vari`` avoiding its fractional part;
    ``(mus_D, mus_E, mus_m)`` for the Mustata form; ``kol_l``, ``kol_m`` for
    injectivity.  ``J`` defaults to the complement of ``B``.
    """

    fan: Fan
    L: Optional[QWeilDivisor] = None
    N: Optional[QWeilDivisor] = None
    B: FrozenSet[int] = frozenset()
    a: int = 0
    l: int = 1
    D: Optional[QWeilDivisor] = None
    lD: int = 1
    D_kv: Optional[QWeilDivisor] = None
    D_vari: Optional[QWeilDivisor] = None
    B_vari: FrozenSet[int] = frozenset()
    J: Optional[FrozenSet[int]] = None
    mus_D: Optional[QWeilDivisor] = None
    mus_E: Optional[QWeilDivisor] = None
    mus_m: int = 1
    kol_l: int = 1
    kol_m: int = 1
    label: str = ""

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "fan": self.fan.to_json(),
            "L": _div_json(self.L), "N": _div_json(self.N),
            "B": sorted(self.B), "a": self.a, "l": self.l,
            "D": _div_json(self.D), "lD": self.lD,
            "D_kv": _div_json(self.D_kv),
            "D_vari": _div_json(self.D_vari), "B_vari": sorted(self.B_vari),
            "J": None if self.J is None else sorted(self.J),
            "mus_D": _div_json(self.mus_D), "mus_E": _div_json(self.mus_E), "mus_m": self.mus_m,
            "kol_l": self.kol_l, "kol_m": self.kol_m,
        }

    @classmethod
    def from_json(cls, data: dict) -> "Instance":
        try:
            return cls(
                fan=Fan.from_json(data["fan"]),
                L=_div_from(data.get("L")), N=_div_from(data.get("N")),
                B=frozenset(data.get("B", [])), a=int(data.get("a", 0)), l=int(data.get("l", 1)),
                D=_div_from(data.get("D")), lD=int(data.get("lD", 1)),
                D_kv=_div_from(data.get("D_kv")),
                D_vari=_div_from(data.get("D_vari")), B_vari=frozenset(data.get("B_vari", [])),
                J=None if data.get("J") is None else frozenset(data["J"]),
                mus_D=_div_from(data.get("mus_D")), mus_E=_div_from(data.get("mus_E")),
                mus_m=int(data.get("mus_m", 1)),
                kol_l=int(data.get("kol_l", 1)), kol_m=int(data.get("kol_m", 1)),
                label=str(data.get("label", "")),
            )
        except (KeyError, TypeError, ValueError, FanError, DivisorError) as exc:
            raise InstanceError(f"malformed instance: {exc}") from None

    def digest(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# Reports


HOLDS = "holds"
FAILS = "fails"
HYPOTHESIS_FAILURE = "hypothesis_failure"


@dataclass
class VerdictReport:
    theorem: str
    instance_digest: str
    field: Field
    hypotheses: Dict[str, bool] = dc_field(default_factory=dict)
    tables: Dict[str, List[int]] = dc_field(default_factory=dict)
    witnesses: List[dict] = dc_field(default_factory=list)
    status: str = HOLDS
    detail: str = ""

    @property
    def holds(self) -> Optional[bool]:
        if self.status == HYPOTHESIS_FAILURE:
            return None
        return self.status == HOLDS

    def to_json(self) -> dict:
        return {
            "theorem": self.theorem,
            "instance": self.instance_digest,
            "field": str(self.field),
            "status": self.status,
            "holds": self.holds,
            "hypotheses": dict(sorted(self.hypotheses.items())),
            "tables": dict(sorted(self.tables.items())),
            "witnesses": self.witnesses,
            "detail": self.detail,
        }


class _Run:
    """Accumulates tables and witnesses for one report."""

    def __init__(self, theorem: str, inst: Instance, field: Field):
        self.fan = inst.fan
        self.field = field
        self.report = VerdictReport(theorem, inst.digest(), field)

    def hyp(self, name: str, ok: bool) -> bool:
        self.report.hypotheses[name] = bool(ok)
        return bool(ok)

    def table(self, label: str, spec):
        t = cohomology_table(self.fan, spec, self.field)
        self.report.tables[label] = list(t.h)
        return t

    def witness(self, **kw):
        self.report.witnesses.append(kw)

    def require_zero(self, label: str, spec, degrees: Iterable[int]):
        t = self.table(label, spec)
        for i in degrees:
            if t.h[i]:
                ms = [list(m) for m, d in t.per_degree.items() if d[i]]
                self.witness(table=label, i=i, dim=t.h[i], degrees=ms[:10])
        return t

    def implication(self, small_label, small, big_label, big):
        """``h^i(big) = 0  =>  h^i(small) = 0`` (and the stronger ``h^i(small) <= h^i(big)``)."""
        ts = self.table(small_label, small)
        tb = self.table(big_label, big)
        for i, (x, y) in enumerate(zip(ts.h, tb.h)):
            if x > y:
                self.witness(table=small_label, i=i, dim=x, bound=y, bound_table=big_label,
                             degrees=[list(m) for m, d in ts.per_degree.items() if d[i]][:10])

    def correspondence(self, F, family, D, label: str):
        rep = graded_correspondence_check(F, family, D, self.field)
        self.report.tables[f"{label}:small"] = list(rep.small_h)
        self.report.tables[f"{label}:target"] = list(rep.target_h)
        for v in rep.violations:
            self.witness(table=label, i=v.i, degrees=[list(v.degree)], lhs=v.lhs, rhs=v.rhs)
        if not rep.monotone:
            self.witness(table=label, detail="monotonicity", small=list(rep.small_h),
                         target=list(rep.target_h))
        return rep

    def finish(self) -> VerdictReport:
        r = self.report
        if not all(r.hypotheses.values()):
            r.status = HYPOTHESIS_FAILURE
            r.witnesses = []
            failed = sorted(k for k, v in r.hypotheses.items() if not v)
            r.detail = ("hypotheses not satisfied: " + ", ".join(failed)
                        + (f" ({r.detail})" if r.detail else ""))
        elif r.witnesses:
            r.status = FAILS
        else:
            r.status = HOLDS
        return r

    def hypothesis_failure(self, detail: str) -> VerdictReport:
        self.report.status = HYPOTHESIS_FAILURE
        self.report.witnesses = []
        self.report.detail = detail
        return self.report


def _cartier(fan, D) -> bool:
    return D is not None and D.is_integral and is_cartier(fan, D)


def _ample(fan, D) -> bool:
    try:
        return D is not None and positivity(fan, D).is_ample
    except DivisorError:
        return False


def _nef(fan, D) -> bool:
    try:
        return D is not None and positivity(fan, D).is_nef
    except DivisorError:
        return False


def _positive_degrees(n: int) -> range:
    return range(1, n + 1)


# ---------------------------------------------------------------------------
# Individual theorems


def _check_main1(run: _Run, inst: Instance):
    fan, n = inst.fan, inst.fan.rank
    if not (run.hyp("complete", is_complete(fan)) and run.hyp("L_cartier", _cartier(fan, inst.L))
            and run.hyp("0<=a<=n", 0 <= inst.a <= n) and run.hyp("l>=1", inst.l >= 1)):
        return
    F = MultiplicationMap(inst.l, fan)
    twists = [("L", inst.L)] + ([("N", inst.N)] if _cartier(fan, inst.N) else [])
    for name, G in twists:
        run.correspondence(F, LogFamily(inst.a, inst.B), G, f"LogForms(a,B)x{name}")
    if has_ample(fan) and _ample(fan, inst.L):
        run.require_zero("LogForms(a,B)xL", LogForms(inst.a, inst.B, inst.L), _positive_degrees(n))


def _ample_hyps(run: _Run, inst: Instance) -> bool:
    fan = inst.fan
    return (run.hyp("projective", has_ample(fan)) and run.hyp("L_cartier", _cartier(fan, inst.L))
            and run.hyp("L_ample", _ample(fan, inst.L)))


def _check_bott(run: _Run, inst: Instance):
    if not _ample_hyps(run, inst):
        return
    n = inst.fan.rank
    for a in range(n + 1):
        run.require_zero(f"Omega^{a}xL", LogForms(a, frozenset(), inst.L), _positive_degrees(n))


def _check_norimatsu(run: _Run, inst: Instance):
    if not _ample_hyps(run, inst):
        return
    fan = inst.fan
    K = canonical_divisor(fan)
    Bd = QWeilDivisor.boundary(fan.n_rays, inst.B)
    run.require_zero("K+B+L", ReflexiveDiv(K + Bd + inst.L), _positive_degrees(fan.rank))


def _check_norimatsu_prime(run: _Run, inst: Instance):
    if not _ample_hyps(run, inst):
        return
    fan = inst.fan
    J = inst.J if inst.J is not None else frozenset(range(fan.n_rays)) - inst.B
    coeffs = list(inst.L.coeffs)
    for j in sorted(J):
        coeffs[j] -= 1
    run.require_zero("L-sum(D_j)", ReflexiveDiv(QWeilDivisor(tuple(coeffs))),
                     _positive_degrees(fan.rank))


def _check_kodaira(run: _Run, inst: Instance):
    if not _ample_hyps(run, inst):
        return
    fan = inst.fan
    run.require_zero("K+L", ReflexiveDiv(canonical_divisor(fan) + inst.L),
                     _positive_degrees(fan.rank))


def _check_main2(run: _Run, inst: Instance):
    fan, D, l = inst.fan, inst.D, inst.lD
    if not (run.hyp("complete", is_complete(fan)) and run.hyp("D_given", D is not None)
            and run.hyp("l>=1", l >= 1) and run.hyp("lD_integral", (D * l).is_integral)):
        return
    F = MultiplicationMap(l, fan)
    r = rounding(D)
    K = canonical_divisor(fan)
    run.correspondence(F, Floor(), D, "Floor")
    run.correspondence(F, CeilCanonical(), D, "CeilCanonical")
    run.implication("floor(D)", ReflexiveDiv(r.floor), "lD", ReflexiveDiv(D * l))
    run.implication("K+ceil(D)", ReflexiveDiv(K + r.ceil), "K+lD", ReflexiveDiv(K + D * l))


def _check_kv(run: _Run, inst: Instance):
    fan, D = inst.fan, inst.D_kv
    if not (run.hyp("complete", is_complete(fan)) and run.hyp("D_given", D is not None)
            and run.hyp("D_q_cartier", is_q_cartier(fan, D)) and run.hyp("D_nef", _nef(fan, D))):
        return
    pk = polytope_and_kappa(fan, D)
    if not run.hyp("kappa_defined", pk.kappa is not None):
        return
    n, kappa = fan.rank, pk.kappa
    run.report.tables["kappa"] = [kappa]
    r = rounding(D)
    run.require_zero("floor(D)", ReflexiveDiv(r.floor), range(1, n + 1))
    run.require_zero("K+ceil(D)", ReflexiveDiv(canonical_divisor(fan) + r.ceil),
                     [i for i in range(n + 1) if i != n - kappa])


def _check_vari(run: _Run, inst: Instance):
    fan, D, B = inst.fan, inst.D_vari, inst.B_vari
    if not (run.hyp("complete", is_complete(fan)) and run.hyp("D_given", D is not None)):
        return
    r = rounding(D)
    if not run.hyp("B_disjoint_frac", not (B & r.frac.support())):
        return
    l = D.denominator()
    F = MultiplicationMap(l, fan)
    K = canonical_divisor(fan)
    Bd = QWeilDivisor.boundary(fan.n_rays, B)
    run.correspondence(F, CeilCanonicalPlusB(B), D, "CeilCanonicalPlusB")
    run.implication("K+B+ceil(D)", ReflexiveDiv(K + Bd + r.ceil), "K+B+lD",
                    ReflexiveDiv(K + Bd + D * l))
    if has_ample(fan) and is_q_cartier(fan, D) and _ample(fan, D):
        run.require_zero("K+B+ceil(D)", ReflexiveDiv(K + Bd + r.ceil), _positive_degrees(fan.rank))


def mustata_direct(fan: Fan, D: QWeilDivisor, E: QWeilDivisor, m: int, field: Field = QQ):
    """Both implications evaluated directly from four cohomology tables."""
    K = canonical_divisor(fan)
    A1 = cohomology_table(fan, ReflexiveDiv(D + (D + E) * m), field).h
    S1 = cohomology_table(fan, ReflexiveDiv(D), field).h
    A2 = cohomology_table(fan, ReflexiveDiv(K + D + (D + E) * m), field).h
    S2 = cohomology_table(fan, ReflexiveDiv(K + D + rounding(E).ceil), field).h
    bad = [("first", i) for i in range(len(A1)) if A1[i] == 0 and S1[i] != 0]
    bad += [("second", i) for i in range(len(A2)) if A2[i] == 0 and S2[i] != 0]
    return {"D+m(D+E)": A1, "D": S1, "K+D+m(D+E)": A2, "K+D+ceil(E)": S2}, bad


def _check_mustata(run: _Run, inst: Instance):
    fan, D, E, m = inst.fan, inst.mus_D, inst.mus_E, inst.mus_m
    if not (run.hyp("complete", is_complete(fan)) and run.hyp("D_integral", D is not None and D.is_integral)
            and run.hyp("E_given", E is not None) and run.hyp("m>=1", m >= 1)):
        return
    if not (run.hyp("0<=a_j<=1", all(0 <= c <= 1 for c in E))
            and run.hyp("mE_integral", (E * m).is_integral)):
        return
    l = m + 1
    Dd = D + E * Fraction(m, m + 1)
    r = rounding(Dd)
    # reduction identities for the auxiliary divisor
    assert Dd * l == D + (D + E) * m
    assert r.floor == D and r.ceil == D + rounding(E).ceil
    F = MultiplicationMap(l, fan)
    a = run.correspondence(F, Floor(), Dd, "Floor(Ddag)")
    b = run.correspondence(F, CeilCanonical(), Dd, "CeilCanonical(Ddag)")
    tables, bad = mustata_direct(fan, D, E, m, run.field)
    run.report.tables.update(tables)
    for which, i in bad:
        run.witness(table=f"direct:{which}", i=i)
    # the two routes must agree on the implication verdicts
    via = [i for i in range(fan.rank + 1)
           if (a.target_h[i] == 0 and a.small_h[i] != 0)]
    direct = [i for w, i in bad if w == "first"]
    if via != direct:
        run.witness(table="route_mismatch", detail=f"reduction {via} vs direct {direct}")


def _kappa_nonneg(fan: Fan, L: QWeilDivisor) -> bool:
    return any(polytope_points(fan, L * t) for t in range(1, KAPPA_SEARCH_CAP + 1))


def bogomolov_candidates(fan: Fan, inst: Instance) -> List[Tuple[str, QWeilDivisor, str]]:
    """``(name, L, reason)``; ``reason`` is empty when ``L`` satisfies the hypotheses."""
    out = []
    for name, L in (("L", inst.L), ("N", inst.N)):
        if L is None:
            continue
        if not _cartier(fan, L):
            out.append((name, L, "not Cartier"))
        elif not _kappa_nonneg(fan, L):
            out.append((name, L, "kappa < 0"))
        elif is_principal(fan, L):
            out.append((name, L, "trivial"))
        else:
            out.append((name, L, ""))
    return out


def _check_bogomolov(run: _Run, inst: Instance):
    fan = inst.fan
    if not run.hyp("complete", is_complete(fan)):
        return
    cands = bogomolov_candidates(fan, inst)
    usable = [(name, L) for name, L, why in cands if not why]
    run.report.detail = "; ".join(f"{name}: {why}" for name, _, why in cands if why)
    if not run.hyp("nontrivial_bundle_with_sections", bool(usable)):
        return
    for name, L in usable:
        for a in range(fan.rank + 1):
            run.require_zero(f"LogForms({a},B)x-{name}", LogForms(a, inst.B, -L), [0])


def _check_kollar(run: _Run, inst: Instance):
    fan, L, l, m = inst.fan, inst.N, inst.kol_l, inst.kol_m
    if not (run.hyp("complete", is_complete(fan)) and run.hyp("L_cartier", _cartier(fan, L))
            and run.hyp("L_nef", _nef(fan, L)) and run.hyp("l>=0", l >= 0)
            and run.hyp("m>=1", m >= 1)):
        return
    n = fan.rank
    kappa = polytope_and_kappa(fan, L, 1).kappa
    run.report.tables["kappa"] = [kappa]
    K = canonical_divisor(fan)
    src = run.require_zero("K+mL", ReflexiveDiv(K + L * m), [i for i in range(n + 1) if i != n - kappa])
    secs = eigensections(fan, L, l)
    combos = [[(1, w)] for w in secs] + random_combinations(secs, COMBINATIONS, seed=l * 31 + m,
                                                         field=run.field)
    for i in range(n + 1):
        if not src.h[i]:
            continue
        for terms in combos:
            M = section_combination_map(fan, L, l, terms, m, i, run.field, check=False)
            if not M.injective():
                run.witness(table="x s", i=i, sections=[[c, list(w)] for c, w in terms],
                            rank=M.rank(), source_dim=M.ncols)


_CHECKS = {
    TheoremId.MainI: _check_main1,
    TheoremId.Bott: _check_bott,
    TheoremId.Norimatsu: _check_norimatsu,
    TheoremId.NorimatsuPrimeDivisors: _check_norimatsu_prime,
    TheoremId.Kodaira: _check_kodaira,
    TheoremId.MainII: _check_main2,
    TheoremId.KawamataViehweg: _check_kv,
    TheoremId.Vari: _check_vari,
    TheoremId.Mustata: _check_mustata,
    TheoremId.Bogomolov: _check_bogomolov,
    TheoremId.KollarInjectivity: _check_kollar,
}


def check(theorem: TheoremId, inst: Instance, field: Field = QQ) -> VerdictReport:
    if isinstance(theorem, str):
        theorem = TheoremId.parse(theorem)
    run = _Run(theorem.value, inst, field)
    _CHECKS[theorem](run, inst)
    return run.finish()


def check_all(inst: Instance, field: Field = QQ,
              theorems: Optional[Sequence[TheoremId]] = None) -> List[VerdictReport]:
    return [check(t, inst, field) for t in (theorems or list(TheoremId))]


def _job(args):
    inst, theorems, field = args
    return [check(t, inst, field) for t in theorems]


def verify_many(instances: Sequence[Instance], theorems: Sequence[TheoremId],
                fields: Sequence[Field] = (QQ,), jobs: int = 1) -> List[VerdictReport]:
    """Reports in a fixed order (instance, field, theorem) regardless of ``jobs``."""
    tasks = [(inst, list(theorems), f) for inst in instances for f in fields]
    if jobs <= 1:
        chunks = [_job(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            chunks = list(ex.map(_job, tasks))
    return [r for chunk in chunks for r in chunk]


# ---------------------------------------------------------------------------
# Blow-up regression


def blowup_example() -> Tuple[Fan, frozenset, QWeilDivisor]:
    P2 = projective_space(2)
    X = blowup_at_fixed_point(P2, 0)
    B = frozenset({X.n_rays - 1})
    L = pullback_along_refinement(P2, X, QWeilDivisor.of((1, 0, 0)))
    return X, B, L


def regression_blowup_example(field: Field = QQ, L: Optional[QWeilDivisor] = None) -> VerdictReport:
    """``h^1(O(K + B + f^*O(1))) = 1`` on the blow-up of the plane at a fixed point.

    ``holds`` means the failure of Norimatsu-type vanishing for this nef and
    big bundle reproduces.  Passing an ample ``L`` instead runs the Norimatsu
    check on the same surface.
    """
    X, B, Lpull = blowup_example()
    if L is not None:
        return check(TheoremId.Norimatsu, Instance(X, L=L, B=B, label="blowup-ample"), field)
    inst = Instance(X, L=Lpull, N=Lpull, B=B, label="blowup-regression")
    run = _Run("Regression", inst, field)
    run.hyp("L_nef", _nef(X, Lpull))
    run.hyp("L_not_ample", not _ample(X, Lpull))
    K = canonical_divisor(X)
    t = run.table("K+B+L", ReflexiveDiv(K + QWeilDivisor.boundary(X.n_rays, B) + Lpull))
    if t.h[1] != 1:
        run.witness(table="K+B+L", i=1, dim=t.h[1], expected=1)
    return run.finish()


# ---------------------------------------------------------------------------
# Corpus


def _base_fans(max_rank: int) -> List[Tuple[str, Fan]]:
    P1 = projective_space(1)
    out = [("P1", P1), ("P2", projective_space(2)), ("P3", projective_space(3)),
           ("P1xP1", product(P1, P1))]
    out += [(f"F{a}", hirzebruch(a)) for a in range(4)]
    out += [("P(1,1,2)", weighted_projective([1, 1, 2])),
            ("P(1,2,3)", weighted_projective([1, 2, 3])),
            ("P(1,1,1,2)", weighted_projective([1, 1, 1, 2]))]
    return [(name, f) for name, f in out if f.rank <= max_rank]


def _integral_cartier_multiple(fan: Fan, D: QWeilDivisor) -> Optional[QWeilDivisor]:
    try:
        return D * q_cartier_index(fan, D)
    except DivisorError:
        return None


def _smallest_primitive(fan: Fan, D: QWeilDivisor) -> QWeilDivisor:
    """Divide out the content of ``D`` as far as Cartier-ness allows."""
    g = vec_gcd([int(c) for c in D]) if D.is_integral else 1
    for k in sorted((k for k in range(2, g + 1) if g % k == 0), reverse=True):
        E = D * Fraction(1, k)
        if is_cartier(fan, E):
            return E
    return D


def _find_ample(fan: Fan, rng: random.Random) -> Optional[QWeilDivisor]:
    # among small random candidates keep the one with the fewest sections
    found: List[QWeilDivisor] = []
    for _ in range(80):
        D = QWeilDivisor(tuple(rng.randint(0, 3) for _ in fan.rays))
        if D not in found and _cartier(fan, D) and _ample(fan, D):
            found.append(D)
            if len(found) == AMPLE_CANDIDATES:
                break
    if found:
        return min(found, key=lambda D: len(polytope_points(fan, D)))
    pt = ample_point(fan)
    if pt is None:
        return None
    D = _integral_cartier_multiple(fan, QWeilDivisor(tuple(pt)))
    return D


def _find_nef(fan: Fan, rng: random.Random, fallback: QWeilDivisor) -> QWeilDivisor:
    for _ in range(40):
        D = QWeilDivisor(tuple(rng.randint(0, 1) for _ in fan.rays))
        if any(D) and _cartier(fan, D) and _nef(fan, D) and not _ample(fan, D):
            return D
    return fallback


def _principal_shift(fan: Fan, rng: random.Random, q: int) -> QWeilDivisor:
    c = [Fraction(rng.randint(-q, q), q) for _ in range(fan.rank)]
    return QWeilDivisor(tuple(sum(ci * ui for ci, ui in zip(c, u)) for u in fan.rays))


def _random_fan(rng: random.Random, max_rank: int, max_subdivisions: int):
    name, fan = rng.choice(_base_fans(max_rank))
    base_ample = _find_ample(fan, rng)
    pulled = base_ample
    subdivs = rng.randint(0, max_subdivisions)
    for _ in range(subdivs):
        for _attempt in range(20):
            v = tuple(rng.randint(-3, 3) for _ in range(fan.rank))
            if not any(v) or math.gcd(*v) != 1 or v in fan.rays:
                continue
            try:
                new = stellar_subdivide(fan, v)
            except FanError:
                continue
            if pulled is not None:
                pulled = pullback_along_refinement(fan, new, pulled)
            fan = new
            name += f"*{list(v)}"
            break
    return name, fan, pulled


def generate_corpus(seed: int, size: int, max_rank: int = 3, max_subdivisions: int = 2,
                    log_discarded: Optional[list] = None) -> List[Instance]:
    """Deterministic instances satisfying the hypotheses of every theorem check."""
    if max_rank < 1 or max_rank > 3:
        raise ValueError("max_rank must be between 1 and 3")
    rng = random.Random(seed)
    out: List[Instance] = []
    attempts = 0
    while len(out) < size:
        attempts += 1
        if attempts > 50 * (size + 1):
            raise RuntimeError("corpus generation keeps failing")
        name, fan, pulled = _random_fan(rng, max_rank, max_subdivisions)
        if not is_complete(fan) or not has_ample(fan):
            _discard(log_discarded, name, "not projective")
            continue
        L = _find_ample(fan, rng)
        if L is None:
            _discard(log_discarded, name, "no ample divisor found")
            continue
        L = _smallest_primitive(fan, L)
        if max(abs(c) for c in L) > COEFF_BOUND:
            _discard(log_discarded, name, "ample divisor too large")
            continue
        pulled_int = None if pulled is None else _integral_cartier_multiple(fan, pulled)
        if pulled_int is not None:
            pulled_int = _smallest_primitive(fan, pulled_int)
        if (pulled_int is not None and any(pulled_int) and _nef(fan, pulled_int)
                and max(abs(c) for c in pulled_int) <= COEFF_BOUND and rng.random() < 0.5):
            N = pulled_int
        else:
            N = _find_nef(fan, rng, L)
        n, r = fan.rank, fan.n_rays
        B = frozenset(i for i in range(r) if rng.random() < 0.3)
        q = rng.randint(1, 6)
        D = QWeilDivisor(tuple(Fraction(rng.randint(-6, 6), q) for _ in range(r)))
        lD = q * rng.choice([1, 1, 2])
        qk = rng.randint(1, 6)
        alpha, beta = rng.randint(0, 2), rng.randint(0, 2)
        D_kv = (L * alpha + N * beta) * Fraction(1, qk) + _principal_shift(fan, rng, qk)
        qv = rng.randint(1, 6)
        D_vari = (L * rng.randint(1, 2) + N * rng.randint(0, 1)) * Fraction(1, qv) \
            + _principal_shift(fan, rng, qv)
        frac = rounding(D_vari).frac.support()
        B_vari = frozenset(i for i in range(r) if i not in frac and rng.random() < 0.5)
        kol_l, kol_m = rng.randint(0, 2), rng.randint(1, 2)
        while kol_l + kol_m > 1 and len(polytope_points(fan, N * (kol_l + kol_m))) > KOLLAR_POINT_CAP:
            if kol_l:
                kol_l -= 1
            else:
                kol_m -= 1
        mus_m = rng.randint(1, 2)
        mus_D = QWeilDivisor(tuple(rng.randint(-2, 2) for _ in range(r)))
        mus_E = QWeilDivisor(tuple(Fraction(rng.randint(0, mus_m), mus_m) for _ in range(r)))
        inst = Instance(
            fan=fan, L=L, N=N, B=B, a=rng.randint(0, n), l=rng.randint(1, 3),
            D=D, lD=lD, D_kv=D_kv, D_vari=D_vari, B_vari=B_vari,
            mus_D=mus_D, mus_E=mus_E, mus_m=mus_m,
            kol_l=kol_l, kol_m=kol_m,
            label=f"{seed}:{len(out)}:{name}",
        )
        problems = instance_problems(inst)
        if problems:
            _discard(log_discarded, name, "; ".join(problems))
            continue
        out.append(inst)
    return out


def _discard(sink, name, why):
    log.info("discarded %s: %s", name, why)
    if sink is not None:
        sink.append({"fan": name, "reason": why})


def instance_problems(inst: Instance) -> List[str]:
    """Hypothesis violations of the instance generator's contract."""
    fan = inst.fan
    out = []
    if not _cartier(fan, inst.L) or not _ample(fan, inst.L):
        out.append("L is not ample Cartier")
    if not _cartier(fan, inst.N) or not _nef(fan, inst.N):
        out.append("N is not nef Cartier")
    if inst.D is not None and not (inst.D * inst.lD).is_integral:
        out.append("lD is not integral")
    if inst.D_kv is not None and not (is_q_cartier(fan, inst.D_kv) and _nef(fan, inst.D_kv)):
        out.append("D_kv is not nef Q-Cartier")
    if inst.D_vari is not None:
        if not (is_q_cartier(fan, inst.D_vari) and _ample(fan, inst.D_vari)):
            out.append("D_vari is not ample")
        if inst.B_vari & rounding(inst.D_vari).frac.support():
            out.append("B_vari meets the fractional part")
    return out


def corpus_header(seed: int, size: int, max_rank: int, max_subdivisions: int) -> dict:
    return {"kind": "header", "seed": seed, "size": size, "max_rank": max_rank,
            "max_subdivisions": max_subdivisions}


def write_corpus(path, instances: Sequence[Instance], header: dict):
    with open(path, "w") as fh:
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for inst in instances:
            fh.write(json.dumps(inst.to_json(), sort_keys=True) + "\n")


def read_corpus(path) -> Tuple[dict, List[Instance]]:
    header, out = {}, []
    with open(path) as fh:
        for k, line in enumerate(fh):
            line = line.strip()
            if not line:
                continue
            try:
                data = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InstanceError(f"line {k + 1}: {exc}") from None
            if data.get("kind") == "header":
                header = data
            else:
                out.append(Instance.from_json(data))
    return header, out
