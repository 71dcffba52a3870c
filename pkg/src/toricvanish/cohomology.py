"""Graded cohomology of rank-one reflexive sheaves and twisted Zariski log forms.

For a degree ``m`` in ``M`` the graded piece of the sheaf over an affine
chart ``U_tau`` is a subspace of the fixed space of a-forms, cut out by the
per-ray rule in :func:`graded_piece`.  Cohomology in degree ``m`` is then
computed from one of two complexes built from these pieces:

* ``cellular``: one summand per cone, cochain degree ``n - dim(tau)``, with
  oriented incidence signs (valid for complete fans; the default);
* ``cech``: the alternating Čech complex of the maximal-cone cover.

All pieces sit inside the same ambient space, so every map is a signed
inclusion and ranks of block matrices give the cohomology.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb, floor, ceil
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .divisors import QWeilDivisor, canonical_divisor
from .exactlin import (
    BIG_PRIME,
    QQ,
    Feasibility,
    Field,
    Ineq,
    IneqSystem,
    contract,
    dot,
    feasible,
    is_empty,
    lattice_points,
    nullspace,
    rank_over,
    solve_rational,
    _rank_bareiss,
    _rank_mod_p,
    _rref_fraction,
    _rref_mod_p,
)
from .fans import Fan, is_complete

IntVec = Tuple[int, ...]


class CohomologyError(ValueError):
    pass


class IncompleteFan(CohomologyError):
    pass


class ConeNotInFan(CohomologyError):
    pass


class EnumerationAnomaly(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Sheaf specifications


@dataclass(frozen=True)
class ReflexiveDiv:
    D: QWeilDivisor

    def __post_init__(self):
        if not isinstance(self.D, QWeilDivisor):
            object.__setattr__(self, "D", QWeilDivisor.of(self.D))
        if not self.D.is_integral:
            raise CohomologyError("ReflexiveDiv needs an integral divisor")

    def to_json(self) -> dict:
        return {"reflexive_div": self.D.to_json()}


@dataclass(frozen=True)
class LogForms:
    a: int
    B: FrozenSet[int]
    G: QWeilDivisor

    def __post_init__(self):
        object.__setattr__(self, "B", frozenset(int(i) for i in self.B))
        if not isinstance(self.G, QWeilDivisor):
            object.__setattr__(self, "G", QWeilDivisor.of(self.G))
        if not self.G.is_integral:
            raise CohomologyError("LogForms needs an integral twist")
        if self.a < 0:
            raise CohomologyError("form degree must be nonnegative")

    def to_json(self) -> dict:
        return {"log_forms": {"a": self.a, "B": sorted(self.B), "G": self.G.to_json()}}


SheafSpec = Union[ReflexiveDiv, LogForms]


def sheaf_from_json(data: dict) -> SheafSpec:
    try:
        if "reflexive_div" in data:
            return ReflexiveDiv(QWeilDivisor.from_json(data["reflexive_div"]))
        if "log_forms" in data:
            lf = data["log_forms"]
            return LogForms(int(lf["a"]), frozenset(lf.get("B", [])),
                            QWeilDivisor.from_json(lf["G"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise CohomologyError(f"malformed sheaf JSON: {exc}") from None
    raise CohomologyError("sheaf JSON needs 'reflexive_div' or 'log_forms'")


def _unpack(fan: Fan, spec: SheafSpec) -> Tuple[int, FrozenSet[int], Tuple[int, ...]]:
    if isinstance(spec, ReflexiveDiv):
        a, B, g = 0, frozenset(), spec.D.ints()
    elif isinstance(spec, LogForms):
        a, B, g = spec.a, spec.B, spec.G.ints()
        if a > fan.rank:
            raise CohomologyError(f"form degree {a} exceeds dimension {fan.rank}")
        if any(i < 0 or i >= fan.n_rays for i in B):
            raise CohomologyError("boundary index out of range")
    else:
        raise TypeError(f"not a sheaf spec: {spec!r}")
    if len(g) != fan.n_rays:
        raise CohomologyError("divisor length does not match the fan")
    return a, B, g


# ---------------------------------------------------------------------------
# Graded pieces


def _piece_basis(n: int, a: int, rays: Sequence[IntVec], field: Field) -> Tuple[Tuple[int, ...], ...]:
    dim = comb(n, a)
    if a == 0 or not rays:
        return tuple(tuple(int(i == j) for j in range(dim)) for i in range(dim))
    rows = []
    for u in rays:
        rows.extend(contract(u, a))
    return tuple(tuple(v) for v in nullspace(rows, dim, field))


def graded_piece(fan: Fan, spec: SheafSpec, tau: Sequence[int], m: Sequence[int],
                 field: Field = QQ) -> List[Tuple[int, ...]]:
    """Basis of the degree-``m`` piece over ``U_tau`` inside the ambient a-forms.

    ReflexiveDiv(D): the full line when ``<m,u> >= -d`` on every ray of tau.
    LogForms(a,B,G): zero unless ``<m,u> >= -g`` on every ray of tau; else
    the kernel of contraction by ``u`` over the rays of tau outside ``B`` on
    which equality holds.
    """
    tau = tuple(sorted(tau))
    if not fan.is_cone(tau):
        raise ConeNotInFan(f"{list(tau)} is not a cone of the fan")
    if isinstance(spec, ReflexiveDiv):
        d = spec.D.ints()
        ok = all(dot(m, fan.rays[i]) >= -d[i] for i in tau)
        return [(1,)] if ok else []
    a, B, g = _unpack(fan, spec)
    vals = {i: dot(m, fan.rays[i]) + g[i] for i in tau}
    if any(v < 0 for v in vals.values()):
        return []
    eq = [fan.rays[i] for i in tau if vals[i] == 0 and i not in B]
    return list(_piece_basis(fan.rank, a, eq, field))


# ---------------------------------------------------------------------------
# Complexes


@dataclass
class GradedComplex:
    """A finite cochain complex of subspaces of ``(ambient)^{cells}``.

    ``cells[p]`` lists the index objects in cochain degree ``p`` and
    ``bases[p][j]`` the basis (ambient vectors) of the piece on ``cells[p][j]``.
    ``maps[p]`` lists ``(source_j, target_k, sign)`` for the inclusion-induced
    differential ``C^p -> C^{p+1}``.
    """

    field: Field
    ambient: int
    cells: List[list]
    bases: List[List[Tuple[Tuple[int, ...], ...]]]
    maps: List[List[Tuple[int, int, int]]]

    @property
    def length(self) -> int:
        return len(self.cells)

    def dim(self, p: int) -> int:
        if p < 0 or p >= self.length:
            return 0
        return sum(len(b) for b in self.bases[p])

    def _reduce(self, x: int) -> int:
        return x if self.field.is_rational else x % self.field.p

    def embedding(self, p: int) -> List[List[int]]:
        """Columns = basis of ``C^p``, rows = ambient coordinates of all cells."""
        amb = self.ambient
        rows = amb * len(self.cells[p])
        cols = self.dim(p)
        E = [[0] * cols for _ in range(rows)]
        c = 0
        for j, basis in enumerate(self.bases[p]):
            for v in basis:
                for t in range(amb):
                    E[j * amb + t][c] = v[t]
                c += 1
        return E

    def differential(self, p: int) -> List[List[int]]:
        """Matrix of ``d_p`` from ``C^p`` basis into ambient coordinates of ``C^{p+1}``."""
        amb = self.ambient
        if p < 0 or p + 1 >= self.length:
            return [[0] * self.dim(p) for _ in range(0)]
        rows = amb * len(self.cells[p + 1])
        cols = self.dim(p)
        offsets = list(itertools.accumulate([0] + [len(b) for b in self.bases[p]]))
        D = [[0] * cols for _ in range(rows)]
        for j, k, s in self.maps[p]:
            for r, v in enumerate(self.bases[p][j]):
                col = offsets[j] + r
                for t in range(amb):
                    if v[t]:
                        D[k * amb + t][col] = self._reduce(D[k * amb + t][col] + s * v[t])
        return D

    def rank(self, p: int) -> int:
        D = self.differential(p)
        if not D or not D[0]:
            return 0
        if self.field.is_rational:
            return _rank_bareiss(D)
        return _rank_mod_p(D, self.field.p)

    def dims(self) -> Tuple[int, ...]:
        ranks = [self.rank(p) for p in range(self.length)]
        return tuple(self.dim(p) - ranks[p] - (ranks[p - 1] if p else 0)
                     for p in range(self.length))

    def dims_fast(self) -> Tuple[int, ...]:
        """Exact dims over Q with a mod-prime shortcut.

        Ranks mod a prime never exceed ranks over Q, so if the mod-p estimate
        of every cohomology dimension is zero the exact answer is zero too.
        """
        if not self.field.is_rational:
            return self.dims()
        mats = [self.differential(p) for p in range(self.length)]
        est = [(_rank_mod_p(D, BIG_PRIME) if D and D[0] else 0) for D in mats]
        h = [self.dim(p) - est[p] - (est[p - 1] if p else 0) for p in range(self.length)]
        if not any(h):
            return tuple(h)
        ex = [(_rank_bareiss(D) if D and D[0] else 0) for D in mats]
        return tuple(self.dim(p) - ex[p] - (ex[p - 1] if p else 0) for p in range(self.length))

    def _apply(self, p: int, vec: Sequence[int]) -> List[int]:
        """Push an ambient vector of ``C^p`` through the signed inclusions."""
        amb = self.ambient
        out = [0] * (amb * len(self.cells[p + 1]))
        for j, k, s in self.maps[p]:
            for t in range(amb):
                out[k * amb + t] += s * vec[j * amb + t]
        return [self._reduce(x) for x in out]

    def check_dd(self) -> bool:
        """``d_{p+1} d_p == 0`` exactly, as matrices in ambient coordinates."""
        for p in range(self.length - 2):
            D = self.differential(p)
            for col in zip(*D) if D and D[0] else ():
                if any(self._apply(p + 1, list(col))):
                    return False
        return True

    # -- explicit cohomology -------------------------------------------------

    def cohomology_basis(self, p: int) -> "CohomologyBasis":
        return CohomologyBasis.build(self, p)


def _span_basis(vectors: List[List[int]], field: Field) -> List[List]:
    if not vectors:
        return []
    if field.is_rational:
        R, piv = _rref_fraction(vectors)
    else:
        R, piv = _rref_mod_p(vectors, field.p)
    return [list(r) for r in R[:len(piv)]]


@dataclass
class CohomologyBasis:
    """Representatives of ``H^p`` as ambient cocycles plus a coordinate solver."""

    field: Field
    boundaries: List[List]
    reps: List[List]

    @classmethod
    def build(cls, cx: GradedComplex, p: int) -> "CohomologyBasis":
        f = cx.field
        E = cx.embedding(p)
        cols = cx.dim(p)
        Dp = cx.differential(p)
        ker = nullspace(Dp, cols, f) if Dp and cols else \
            [[int(i == j) for j in range(cols)] for i in range(cols)]
        cocycles = [[sum(E[r][c] * z[c] for c in range(cols)) for r in range(len(E))]
                    for z in ker]
        prev = cx.differential(p - 1) if p > 0 else []
        bvecs = [list(col) for col in zip(*prev)] if prev and prev[0] else []
        bnd = _span_basis(bvecs, f)
        reps: List[List] = []
        for z in cocycles:
            z = [x % f.p for x in z] if not f.is_rational else z
            if len(_span_basis(bnd + reps + [z], f)) > len(bnd) + len(reps):
                reps.append(z)
        return cls(f, bnd, reps)

    @property
    def dim(self) -> int:
        return len(self.reps)

    def _solver(self):
        """Rows ``R`` and ``inv(A_R)`` with ``A`` the matrix of boundaries + reps as columns."""
        if getattr(self, "_cached", None) is None:
            vecs = self.boundaries + self.reps
            k = len(vecs)
            f = self.field
            # independent coordinates: pivot columns of the row-stacked vectors
            if f.is_rational:
                _, piv = _rref_fraction(vecs)
            else:
                _, piv = _rref_mod_p(vecs, f.p)
            sub = [[v[r] for v in vecs] for r in piv]  # k x k, invertible
            aug = [row + [int(i == j) for j in range(k)] for i, row in enumerate(sub)]
            if f.is_rational:
                R, _ = _rref_fraction(aug)
            else:
                R, _ = _rref_mod_p(aug, f.p)
            inv = [row[k:] for row in R]
            self._cached = (piv, inv)
        return self._cached

    def coordinates(self, cocycle: Sequence) -> List:
        """Coordinates of a cocycle's class in terms of ``reps``.

        The coefficient vector is read off ``k`` independent coordinates; the
        caller guarantees the input lies in the span (true for cocycles).
        """
        vecs = self.boundaries + self.reps
        if not vecs:
            return []
        piv, inv = self._solver()
        z = [cocycle[r] for r in piv]
        nb = len(self.boundaries)
        out = []
        for row in inv[nb:]:
            x = sum(a * b for a, b in zip(row, z))
            out.append(x % self.field.p if not self.field.is_rational else x)
        return out

    def coordinates_checked(self, cocycle: Sequence) -> List:
        from .exactlin import solve_in_span

        vecs = self.boundaries + self.reps
        if not vecs:
            if any(cocycle):
                raise CohomologyError("vector is not in the span of cocycle data")
            return []
        sol = solve_in_span(vecs, list(cocycle), self.field)
        if sol is None:
            raise CohomologyError("vector is not a cocycle of this complex")
        return sol[len(self.boundaries):]


@lru_cache(maxsize=256)
def _cell_structure(fan: Fan):
    n = fan.rank
    cells = [list(fan.cones_by_dim[n - p]) for p in range(n + 1)]
    index = [{c: j for j, c in enumerate(cs)} for cs in cells]
    inc = fan.facet_incidence
    maps = []
    for p in range(n):
        lst = []
        for (tau, face), s in inc.items():
            if len(cells[p]) and tau in index[p] and face in index[p + 1]:
                lst.append((index[p][tau], index[p + 1][face], s))
        lst.sort()
        maps.append(lst)
    maps.append([])
    return cells, maps


@lru_cache(maxsize=256)
def _cech_structure(fan: Fan, truncate: bool = True):
    k = len(fan.max_cones)
    top = min(k, fan.rank + 2) if truncate else k
    cells: List[list] = []
    for size in range(1, top + 1):
        level = []
        for I in itertools.combinations(range(k), size):
            tau = set(fan.max_cones[I[0]])
            for i in I[1:]:
                tau &= set(fan.max_cones[i])
            level.append((I, tuple(sorted(tau))))
        cells.append(level)
    index = [{I: j for j, (I, _) in enumerate(level)} for level in cells]
    maps = []
    for p in range(len(cells) - 1):
        lst = []
        for k2, (I, _) in enumerate(cells[p + 1]):
            for pos in range(len(I)):
                J = I[:pos] + I[pos + 1:]
                lst.append((index[p][J], k2, (-1) ** pos))
        lst.sort()
        maps.append(lst)
    maps.append([])
    return cells, maps


def _pattern_of(fan: Fan, a: int, B: FrozenSet[int], g: Sequence[int], m: Sequence[int]):
    fail, eq = [], []
    for i, u in enumerate(fan.rays):
        v = dot(m, u) + g[i]
        if v < 0:
            fail.append(i)
        elif v == 0 and a > 0 and i not in B:
            eq.append(i)
    return frozenset(fail), frozenset(eq)


def _build(fan: Fan, a: int, F: FrozenSet[int], E: FrozenSet[int], field: Field,
           method: str) -> GradedComplex:
    n = fan.rank
    amb = comb(n, a)
    piece_cache: Dict[Tuple[bool, FrozenSet[int]], tuple] = {}

    def piece(tau):
        ts = set(tau)
        if ts & F:
            return ()
        key = frozenset(ts & E)
        if key not in piece_cache:
            piece_cache[key] = _piece_basis(n, a, [fan.rays[i] for i in sorted(key)], field)
        return piece_cache[key]

    if method == "cellular":
        cells, maps = _cell_structure(fan)
        bases = [[piece(tau) for tau in level] for level in cells]
    elif method == "cech":
        cells, maps = _cech_structure(fan)
        bases = [[piece(tau) for _, tau in level] for level in cells]
    else:
        raise ValueError(f"unknown complex {method!r}")
    if not field.is_rational:
        bases = [[tuple(tuple(x % field.p for x in v) for v in b) for b in level]
                 for level in bases]
    return GradedComplex(field, amb, cells, bases, maps)


def graded_complex(fan: Fan, spec: SheafSpec, m: Sequence[int], field: Field = QQ,
                   method: str = "cellular") -> GradedComplex:
    """The degree-``m`` complex; ``method`` is ``cellular`` or ``cech``."""
    a, B, g = _unpack(fan, spec)
    if method == "cellular" and not is_complete(fan):
        raise IncompleteFan("fan is not complete")
    F, E = _pattern_of(fan, a, B, g, m)
    return _build(fan, a, F, E, field, method)


@lru_cache(maxsize=200000)
def _pattern_dims(fan: Fan, a: int, F: FrozenSet[int], E: FrozenSet[int], field: Field,
                  method: str) -> Tuple[int, ...]:
    cx = _build(fan, a, F, E, field, method)
    h = cx.dims_fast()
    if method == "cech":
        h = h[:fan.rank + 1] + (0,) * max(0, fan.rank + 1 - len(h))
    return tuple(h)


def degree_dims(fan: Fan, spec: SheafSpec, m: Sequence[int], field: Field = QQ,
                method: str = "cellular") -> Tuple[int, ...]:
    """``(h^0, ..., h^n)`` of the degree-``m`` graded part."""
    a, B, g = _unpack(fan, spec)
    if method == "cellular" and not is_complete(fan):
        raise IncompleteFan("fan is not complete")
    F, E = _pattern_of(fan, a, B, g, m)
    return _pattern_dims(fan, a, F, E, field, method)


# ---------------------------------------------------------------------------
# Degree enumeration


def _vertex_box(fan: Fan, g: Sequence[int]) -> Tuple[List[int], List[int]]:
    """Integer box containing every vertex of the arrangement ``<m,u> = -g``."""
    n = fan.rank
    lo = [None] * n
    hi = [None] * n
    for S in itertools.combinations(range(fan.n_rays), n):
        A = [list(fan.rays[i]) for i in S]
        if rank_over(A) < n:
            continue
        x = solve_rational(A, [-g[i] for i in S])
        for j in range(n):
            lo[j] = x[j] if lo[j] is None else min(lo[j], x[j])
            hi[j] = x[j] if hi[j] is None else max(hi[j], x[j])
    if lo[0] is None:
        raise IncompleteFan("rays do not span the lattice")
    return [floor(v) for v in lo], [ceil(v) for v in hi]


def _grid(lo: Sequence[int], hi: Sequence[int]) -> np.ndarray:
    axes = [np.arange(a, b + 1, dtype=np.int64) for a, b in zip(lo, hi)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([x.ravel() for x in mesh], axis=1)


def _scan(fan: Fan, a: int, B, g, points: np.ndarray, field: Field, method: str):
    """Yield ``(point, dims)`` for points of nonzero cohomology."""
    if len(points) == 0:
        return
    U = np.array(fan.rays, dtype=np.int64)
    vals = points @ U.T + np.array(g, dtype=np.int64)
    fail = vals < 0
    eqm = vals == 0
    if a == 0:
        eqm[:] = False
    else:
        for i in B:
            eqm[:, i] = False
    r = fan.n_rays
    bits = np.array([1 << i for i in range(r)], dtype=np.int64)
    packed = (fail.astype(np.int64) @ bits) + ((eqm.astype(np.int64) @ bits) << r)
    keys, inverse = np.unique(packed, return_inverse=True)
    inverse = np.asarray(inverse).ravel()
    for kidx, key in enumerate(keys):
        key = int(key)
        F = frozenset(i for i in range(r) if key >> i & 1)
        E = frozenset(i for i in range(r) if key >> (r + i) & 1)
        h = _pattern_dims(fan, a, F, E, field, method)
        if any(h):
            for idx in np.nonzero(inverse == kidx)[0]:
                yield tuple(int(x) for x in points[idx]), h


def _margin(lo, hi) -> np.ndarray:
    big = _grid([x - 1 for x in lo], [x + 1 for x in hi])
    inside = np.all((big >= np.array(lo)) & (big <= np.array(hi)), axis=1)
    return big[~inside]


def _box_degrees(fan: Fan, a, B, g, field: Field, method: str) -> Dict[IntVec, Tuple[int, ...]]:
    lo, hi = _vertex_box(fan, g)
    out: Dict[IntVec, Tuple[int, ...]] = {}
    n = fan.rank
    if n == 1:
        chunks = [_grid(lo, hi)]
    else:
        chunks = (_grid([x] + lo[1:], [x] + hi[1:]) for x in range(lo[0], hi[0] + 1))
    for pts in chunks:
        for m, h in _scan(fan, a, B, g, pts, field, method):
            out[m] = h
    for m, h in _scan(fan, a, B, g, _margin(lo, hi), field, method):
        raise EnumerationAnomaly(f"nonzero cohomology {h} at degree {list(m)} outside the vertex box")
    return out


def _chamber_degrees(fan: Fan, a, B, g, field: Field, method: str,
                     diag_radius: int = 3) -> Dict[IntVec, Tuple[int, ...]]:
    """Sign-pattern chamber enumeration with exact feasibility classification."""
    n, r = fan.rank, fan.n_rays
    out: Dict[IntVec, Tuple[int, ...]] = {}
    three_way = [a > 0 and i not in B for i in range(r)]

    def rows_for(i, s):
        u, c = fan.rays[i], g[i]
        if s == "<":  # <m,u> <= -c - 1
            return [Ineq(tuple(-x for x in u), c + 1, ">=")]
        if s == "=":
            return [Ineq(u, -c, "=")]
        if s == ">":
            return [Ineq(u, -c + 1, ">=")]
        return [Ineq(u, -c, ">=")]  # ">=" in the two-way split

    def rec(i, system: IneqSystem, F, E):
        if is_empty(system):
            return
        if i == r:
            h = _pattern_dims(fan, a, frozenset(F), frozenset(E), field, method)
            if not any(h):
                return
            kind = feasible(system)
            if kind == Feasibility.BOUNDED:
                for m in lattice_points(system):
                    out[tuple(m)] = h
                return
            # unbounded pattern with nonzero cohomology: look for a lattice point
            lo, hi = _vertex_box(fan, g)
            box = [Ineq(tuple(int(j == k) for k in range(n)), lo[j] - diag_radius, ">=")
                   for j in range(n)]
            box += [Ineq(tuple(-int(j == k) for k in range(n)), -(hi[j] + diag_radius), ">=")
                    for j in range(n)]
            pts = lattice_points(system.with_rows(box))
            if pts:
                raise EnumerationAnomaly(
                    f"unbounded chamber with nonzero cohomology {h} contains {list(pts[0])}")
            return
        signs = ("<", "=", ">") if three_way[i] else ("<", ">=")
        for s in signs:
            rec(i + 1, system.with_rows(rows_for(i, s)),
                F + [i] if s == "<" else F, E + [i] if s == "=" else E)

    rec(0, IneqSystem(n, ()), [], [])
    return out


# ---------------------------------------------------------------------------
# Tables


@dataclass
class CohomologyTable:
    h: Tuple[int, ...]
    per_degree: Dict[IntVec, Tuple[int, ...]]
    field: Field = QQ

    def to_json(self) -> dict:
        return {
            "h": list(self.h),
            "field": str(self.field),
            "per_degree": [{"m": list(m), "dims": list(d)}
                           for m, d in sorted(self.per_degree.items())],
        }

    @classmethod
    def from_json(cls, data: dict) -> "CohomologyTable":
        pd = {tuple(e["m"]): tuple(e["dims"]) for e in data["per_degree"]}
        return cls(tuple(data["h"]), pd, Field.parse(data["field"]))

    def at(self, m: Sequence[int]) -> Tuple[int, ...]:
        return self.per_degree.get(tuple(m), (0,) * len(self.h))


def _degrees(fan: Fan, spec: SheafSpec, field: Field, method: str, enumeration: str):
    if not is_complete(fan):
        raise IncompleteFan("fan is not complete")
    a, B, g = _unpack(fan, spec)
    if enumeration == "box":
        return _box_degrees(fan, a, B, g, field, method)
    if enumeration == "chambers":
        return _chamber_degrees(fan, a, B, g, field, method)
    raise ValueError(f"unknown enumeration {enumeration!r}")


def relevant_degrees(fan: Fan, spec: SheafSpec, field: Field = QQ,
                     enumeration: str = "box") -> List[IntVec]:
    """Sorted degrees ``m`` with nonzero graded cohomology."""
    return sorted(_degrees(fan, spec, field, "cellular", enumeration))


def cohomology_table(fan: Fan, spec: SheafSpec, field: Field = QQ, method: str = "cellular",
                     enumeration: str = "box") -> CohomologyTable:
    """``h^i`` and the per-degree breakdown (tables are memoized; treat as read-only)."""
    return _cached_table(fan, spec, field, method, enumeration)


@lru_cache(maxsize=20000)
def _cached_table(fan, spec, field, method, enumeration) -> CohomologyTable:
    per = _degrees(fan, spec, field, method, enumeration)
    n = fan.rank
    h = [0] * (n + 1)
    for d in per.values():
        for i in range(n + 1):
            h[i] += d[i]
    return CohomologyTable(tuple(h), dict(sorted(per.items())), field)


def h_vector(fan: Fan, spec: SheafSpec, field: Field = QQ) -> Tuple[int, ...]:
    return cohomology_table(fan, spec, field).h


def line_bundle(fan: Fan, D) -> ReflexiveDiv:
    return ReflexiveDiv(D if isinstance(D, QWeilDivisor) else QWeilDivisor.of(D))


def log_forms(fan: Fan, a: int, B: Iterable[int] = (), G=None) -> LogForms:
    G = QWeilDivisor.zero(fan.n_rays) if G is None else G
    return LogForms(a, frozenset(B), G if isinstance(G, QWeilDivisor) else QWeilDivisor.of(G))


def top_forms_as_divisor(fan: Fan, G: QWeilDivisor) -> ReflexiveDiv:
    """``O(K + G)``, the rank-one sheaf matching ``LogForms(n, {}, G)``."""
    return ReflexiveDiv(canonical_divisor(fan) + G)
