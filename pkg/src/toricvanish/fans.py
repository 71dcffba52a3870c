"""Rational polyhedral fans: validation, standard constructions, predicates."""

from __future__ import annotations

import hashlib
import itertools
import json
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .exactlin import (
    Ineq,
    IneqSystem,
    dot,
    find_point,
    invariant_factors,
    is_empty,
    is_primitive,
    nullspace,
    rank_over,
    smith_normal_form,
    vec_gcd,
)

IntVec = Tuple[int, ...]


class FanError(ValueError):
    pass


class InvalidWeights(FanError):
    pass


class NotSmoothCone(FanError):
    pass


class NotInSupport(FanError):
    pass


class AlreadyARay(FanError):
    pass


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str
    cones: Tuple[int, ...] = ()

    def __str__(self) -> str:
        return f"{self.kind}: {self.detail}"


# ---------------------------------------------------------------------------
# Single-cone geometry


@dataclass(frozen=True)
class ConeGeometry:
    """H-description of ``cone(gens)`` inside its linear span.

    ``facets`` pairs an inward normal with the positions (into ``gens``) of
    the generators lying on that facet.
    """

    gens: Tuple[IntVec, ...]
    dim: int
    perp: Tuple[IntVec, ...]
    facets: Tuple[Tuple[IntVec, FrozenSet[int]], ...]

    @property
    def strongly_convex(self) -> bool:
        n = len(self.gens[0]) if self.gens else 0
        if self.dim == 0:
            return True
        normals = [list(w) for w, _ in self.facets] + [list(w) for w in self.perp]
        return rank_over(normals) == n

    def contains(self, v: Sequence[int]) -> bool:
        return all(dot(w, v) == 0 for w in self.perp) and \
            all(dot(w, v) >= 0 for w, _ in self.facets)

    def in_relative_interior(self, v: Sequence[int]) -> bool:
        return all(dot(w, v) == 0 for w in self.perp) and \
            all(dot(w, v) > 0 for w, _ in self.facets)

    def extremal(self) -> List[int]:
        """Positions of generators spanning a one-dimensional face."""
        out = []
        allpos = frozenset(range(len(self.gens)))
        for i in range(len(self.gens)):
            z = allpos
            for _, zs in self.facets:
                if i in zs:
                    z = z & zs
            if rank_over([list(self.gens[j]) for j in z]) == 1:
                out.append(i)
        return out

    def faces(self) -> List[FrozenSet[int]]:
        """All faces as generator-position sets (including empty and whole)."""
        found = {frozenset(range(len(self.gens)))}
        frontier = [z for _, z in self.facets]
        found.update(frontier)
        while frontier:
            nxt = []
            for a in frontier:
                for _, z in self.facets:
                    c = a & z
                    if c not in found:
                        found.add(c)
                        nxt.append(c)
            frontier = nxt
        found.add(frozenset())
        return sorted(found, key=lambda s: (len(s), sorted(s)))

    def minimal_face_of(self, v: Sequence[int]) -> FrozenSet[int]:
        z = frozenset(range(len(self.gens)))
        for w, zs in self.facets:
            if dot(w, v) == 0:
                z = z & zs
        return z


@lru_cache(maxsize=4096)
def cone_geometry(gens: Tuple[IntVec, ...], n: int) -> ConeGeometry:
    gens = tuple(tuple(int(x) for x in g) for g in gens)
    if not gens:
        perp = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
        return ConeGeometry(gens, 0, perp, ())
    d = rank_over([list(g) for g in gens])
    perp = tuple(tuple(v) for v in nullspace([list(g) for g in gens], n))
    facets: Dict[FrozenSet[int], IntVec] = {}
    for S in itertools.combinations(range(len(gens)), d - 1):
        rows = [list(gens[i]) for i in S]
        if d > 1 and rank_over(rows) != d - 1:
            continue
        W = nullspace(rows + [list(p) for p in perp], n)
        if len(W) != 1:
            continue
        w = W[0]
        vals = [dot(w, g) for g in gens]
        if all(x >= 0 for x in vals):
            pass
        elif all(x <= 0 for x in vals):
            w = [-x for x in w]
            vals = [-x for x in vals]
        else:
            continue
        if not any(vals):
            continue
        zero = frozenset(i for i, x in enumerate(vals) if x == 0)
        if zero not in facets:
            g = vec_gcd(w)
            facets[zero] = tuple(x // g for x in w)
    fl = tuple(sorted(((w, z) for z, w in facets.items()), key=lambda t: sorted(t[1])))
    return ConeGeometry(gens, d, perp, fl)


# ---------------------------------------------------------------------------
# Fans


@dataclass(frozen=True)
class Fan:
    """A fan given by primitive ray generators and maximal cones.

    ``max_cones`` hold sorted tuples of indices into ``rays``.  Derived face
    data is computed lazily and cached on the (immutable) instance.
    """

    rank: int
    rays: Tuple[IntVec, ...]
    max_cones: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "rays", tuple(tuple(int(x) for x in r) for r in self.rays))
        object.__setattr__(self, "max_cones",
                           tuple(tuple(sorted(int(i) for i in c)) for c in self.max_cones))

    @property
    def n_rays(self) -> int:
        return len(self.rays)

    def geometry(self, cone: Sequence[int]) -> ConeGeometry:
        return cone_geometry(tuple(self.rays[i] for i in cone), self.rank)

    @cached_property
    def cones(self) -> Tuple[Tuple[int, ...], ...]:
        """Every cone of the fan (zero cone included), sorted by dimension then lex."""
        seen = set()
        for c in self.max_cones:
            geo = self.geometry(c)
            for face in geo.faces():
                seen.add(tuple(sorted(c[i] for i in face)))
        return tuple(sorted(seen, key=lambda t: (self.cone_dim(t), t)))

    @cached_property
    def _cone_set(self) -> FrozenSet[Tuple[int, ...]]:
        return frozenset(self.cones)

    def is_cone(self, cone: Sequence[int]) -> bool:
        return tuple(sorted(cone)) in self._cone_set

    def cone_dim(self, cone: Sequence[int]) -> int:
        return _rank_of(tuple(self.rays[i] for i in cone))

    @cached_property
    def cones_by_dim(self) -> Dict[int, Tuple[Tuple[int, ...], ...]]:
        out: Dict[int, list] = {d: [] for d in range(self.rank + 1)}
        for c in self.cones:
            out[self.cone_dim(c)].append(c)
        return {d: tuple(v) for d, v in out.items()}

    @cached_property
    def facet_incidence(self) -> Dict[Tuple[Tuple[int, ...], Tuple[int, ...]], int]:
        """Signed incidence ``[tau : tau']`` for each facet ``tau'`` of each cone ``tau``.

        Orientations come from a fixed ordered basis of each cone's span, so
        the resulting boundary operator squares to zero.
        """
        orient = {c: _orientation(self, c) for c in self.cones}
        inc = {}
        for d in range(1, self.rank + 1):
            lower = self.cones_by_dim[d - 1]
            for tau in self.cones_by_dim[d]:
                ts = set(tau)
                for f in lower:
                    if set(f) <= ts:
                        w = next(i for i in tau if i not in f)
                        inc[(tau, f)] = _incidence(self, tau, f, w, orient)
        return inc

    @cached_property
    def walls(self) -> Dict[Tuple[int, ...], List[int]]:
        """Codimension-one faces of maximal cones -> indices of the maximal cones containing them."""
        out: Dict[Tuple[int, ...], List[int]] = {}
        for k, c in enumerate(self.max_cones):
            geo = self.geometry(c)
            if geo.dim != self.rank:
                continue
            for _, z in geo.facets:
                out.setdefault(tuple(sorted(c[i] for i in z)), []).append(k)
        return out

    def to_json(self) -> dict:
        return {"rank": self.rank, "rays": [list(r) for r in self.rays],
                "max_cones": [list(c) for c in self.max_cones]}

    @classmethod
    def from_json(cls, data: dict) -> "Fan":
        try:
            rank = int(data["rank"])
            rays = [tuple(int(x) for x in r) for r in data["rays"]]
            cones = [tuple(int(i) for i in c) for c in data["max_cones"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise FanError(f"malformed fan JSON: {exc}") from None
        return cls(rank, tuple(rays), tuple(cones))

    def canonical(self) -> Tuple["Fan", List[int]]:
        """Rays sorted lexicographically; returns the fan and old->new index map."""
        order = sorted(range(self.n_rays), key=lambda i: self.rays[i])
        new_index = {old: new for new, old in enumerate(order)}
        rays = tuple(self.rays[i] for i in order)
        cones = sorted(tuple(sorted(new_index[i] for i in c)) for c in self.max_cones)
        return Fan(self.rank, rays, tuple(cones)), [new_index[i] for i in range(self.n_rays)]

    def digest(self) -> str:
        can, _ = self.canonical()
        blob = json.dumps(can.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


@lru_cache(maxsize=65536)
def _rank_of(vectors: Tuple[IntVec, ...]) -> int:
    return rank_over([list(v) for v in vectors]) if vectors else 0


def _pick_coords(basis: List[IntVec], n: int) -> Tuple[int, ...]:
    d = len(basis)
    for J in itertools.combinations(range(n), d):
        if rank_over([[b[j] for j in J] for b in basis]) == d:
            return J
    raise AssertionError("basis is not independent")


def _orientation(fan: Fan, cone: Tuple[int, ...]):
    basis: List[IntVec] = []
    for i in cone:
        cand = basis + [fan.rays[i]]
        if _rank_of(tuple(cand)) == len(cand):
            basis = cand
    J = _pick_coords(basis, fan.rank) if basis else ()
    ref = _sign_det([[b[j] for j in J] for b in basis])
    return J, ref


def _sign_det(A) -> int:
    from .exactlin import det

    if not A:
        return 1
    d = det(A)
    return (d > 0) - (d < 0)


def _incidence(fan: Fan, tau, face, w, orient) -> int:
    J, ref = orient[tau]
    Jf, _ = orient[face]
    fbasis = _orientation_basis(fan, face)
    vecs = [fan.rays[w]] + fbasis
    s = _sign_det([[v[j] for j in J] for v in vecs])
    if s == 0:  # pragma: no cover - w is off the facet hyperplane
        raise AssertionError("degenerate incidence")
    return s * ref


def _orientation_basis(fan: Fan, cone) -> List[IntVec]:
    basis: List[IntVec] = []
    for i in cone:
        cand = basis + [fan.rays[i]]
        if _rank_of(tuple(cand)) == len(cand):
            basis = cand
    return basis


# ---------------------------------------------------------------------------
# Validation


def validate(fan: Fan) -> List[Violation]:
    """All violations of the fan axioms; an empty list means the fan is valid."""
    out: List[Violation] = []
    n = fan.rank
    for i, r in enumerate(fan.rays):
        if len(r) != n:
            out.append(Violation("RankMismatch", f"ray {i} has length {len(r)} != {n}"))
            return out
        if not is_primitive(r):
            out.append(Violation("NonPrimitiveRay", f"ray {i} = {list(r)} is not primitive"))
    if len(set(fan.rays)) != len(fan.rays):
        out.append(Violation("DuplicateRay", "ray list contains duplicates"))
    used = set()
    for k, c in enumerate(fan.max_cones):
        if any(i < 0 or i >= fan.n_rays for i in c) or len(set(c)) != len(c):
            out.append(Violation("BadIndex", f"cone {k} has invalid ray indices", (k,)))
            return out
        used.update(c)
    for i in range(fan.n_rays):
        if i not in used:
            out.append(Violation("DanglingRay", f"ray {i} lies in no maximal cone"))
    if out:
        return out
    for k, c in enumerate(fan.max_cones):
        geo = fan.geometry(c)
        if not geo.strongly_convex:
            out.append(Violation("NotStronglyConvex", f"cone {k} contains a line", (k,)))
            continue
        ext = geo.extremal()
        if len(ext) != len(c):
            out.append(Violation("NotExtremal", f"cone {k} lists non-extremal generators", (k,)))
    if out:
        return out
    for a, b in itertools.combinations(range(len(fan.max_cones)), 2):
        if not _meets_in_common_face(fan, fan.max_cones[a], fan.max_cones[b]):
            out.append(Violation("BadIntersection",
                                 f"cones {a} and {b} do not meet in a common face", (a, b)))
    return out


def _meets_in_common_face(fan: Fan, s: Sequence[int], t: Sequence[int]) -> bool:
    common = set(s) & set(t)
    rows = []
    for i in common:
        rows.append(Ineq(fan.rays[i], 0, "="))
    for i in set(s) - common:
        rows.append(Ineq(fan.rays[i], 1, ">="))
    for i in set(t) - common:
        rows.append(Ineq(tuple(-x for x in fan.rays[i]), 1, ">="))
    return not is_empty(IneqSystem(fan.rank, tuple(rows)))


def check_valid(fan: Fan) -> Fan:
    bad = validate(fan)
    if bad:
        raise FanError("; ".join(str(v) for v in bad))
    return fan


# ---------------------------------------------------------------------------
# Predicates


@dataclass(frozen=True)
class FanPredicates:
    is_complete: bool
    is_simplicial: bool
    is_smooth: bool
    has_ample: bool


@lru_cache(maxsize=4096)
def is_complete(fan: Fan) -> bool:
    n = fan.rank
    if not fan.max_cones:
        return False
    if any(fan.geometry(c).dim != n for c in fan.max_cones):
        return False
    walls = fan.walls
    if any(len(v) != 2 for v in walls.values()):
        return False
    adj = {k: set() for k in range(len(fan.max_cones))}
    for a, b in walls.values():
        adj[a].add(b)
        adj[b].add(a)
    seen, stack = {0}, [0]
    while stack:
        k = stack.pop()
        for j in adj[k] - seen:
            seen.add(j)
            stack.append(j)
    return len(seen) == len(fan.max_cones)


def is_simplicial(fan: Fan) -> bool:
    return all(len(c) == fan.geometry(c).dim for c in fan.max_cones)


def cone_is_smooth(fan: Fan, cone: Sequence[int]) -> bool:
    vecs = [list(fan.rays[i]) for i in cone]
    if not vecs:
        return True
    if rank_over(vecs) != len(vecs):
        return False
    return all(d == 1 for d in invariant_factors(vecs))


def is_smooth(fan: Fan) -> bool:
    return is_simplicial(fan) and all(cone_is_smooth(fan, c) for c in fan.max_cones)


def ample_system(fan: Fan) -> Tuple[IneqSystem, int]:
    """Strict convexity across walls as a (tightened) linear system.

    Variables are the ray coefficients ``d_0..d_{r-1}`` followed by the local
    characters ``m_sigma`` of every maximal cone; ``m_{sigma_0}`` is pinned to 0.
    Homogeneity lets the strict inequalities be tightened to ``>= 1``.
    """
    n, r, k = fan.rank, fan.n_rays, len(fan.max_cones)
    nv = r + n * k

    def var_m(s, j):
        return r + n * s + j

    rows = []
    for s, c in enumerate(fan.max_cones):
        for i in c:
            v = [0] * nv
            v[i] = 1
            for j in range(n):
                v[var_m(s, j)] = fan.rays[i][j]
            rows.append(Ineq(tuple(v), 0, "="))
    for j in range(n):
        v = [0] * nv
        v[var_m(0, j)] = 1
        rows.append(Ineq(tuple(v), 0, "="))
    for wall, pair in fan.walls.items():
        if len(pair) != 2:
            continue
        for s, t in (pair, pair[::-1]):
            for i in set(fan.max_cones[t]) - set(fan.max_cones[s]):
                v = [0] * nv
                v[i] = 1
                for j in range(n):
                    v[var_m(s, j)] = fan.rays[i][j]
                rows.append(Ineq(tuple(v), 1, ">="))
    return IneqSystem(nv, tuple(rows)), r


@lru_cache(maxsize=4096)
def has_ample(fan: Fan) -> bool:
    if not is_complete(fan):
        return False
    sys_, _ = ample_system(fan)
    return not is_empty(sys_)


def ample_point(fan: Fan) -> Optional[List]:
    """Rational coefficients of some ample divisor, or None if there is none."""
    if not is_complete(fan):
        return None
    sys_, r = ample_system(fan)
    pt = find_point(sys_)
    return None if pt is None else pt[:r]


def predicates(fan: Fan) -> FanPredicates:
    check_valid(fan)
    comp = is_complete(fan)
    simp = is_simplicial(fan)
    return FanPredicates(comp, simp, simp and is_smooth(fan), comp and has_ample(fan))


def covers_direction(fan: Fan, v: Sequence[int]) -> bool:
    return any(fan.geometry(c).contains(v) for c in fan.max_cones)


# ---------------------------------------------------------------------------
# Constructions


def projective_space(n: int) -> Fan:
    if n < 1:
        raise FanError("projective space needs n >= 1")
    return weighted_projective([1] * (n + 1))


def weighted_projective(weights: Sequence[int]) -> Fan:
    q = [int(w) for w in weights]
    if len(q) < 2 or any(w <= 0 for w in q) or vec_gcd(q) != 1:
        raise InvalidWeights(f"weights {q} must be positive with gcd 1")
    n = len(q) - 1
    if 1 in q:
        j = q.index(1)
        rays = []
        others = [i for i in range(n + 1) if i != j]
        for pos, _ in enumerate(others):
            rays.append(tuple(int(pos == k) for k in range(n)))
        last = [-q[i] for i in others]
        rays.append(tuple(last))
    else:
        U, _, _ = smith_normal_form([[w] for w in q])
        rays = [tuple(U[row][i] for row in range(1, n + 1)) for i in range(n + 1)]
    rays = [tuple(x // vec_gcd(r) for x in r) for r in rays]
    cones = list(itertools.combinations(range(n + 1), n))
    return check_valid(Fan(n, tuple(rays), tuple(cones)))


def hirzebruch(a: int) -> Fan:
    rays = ((1, 0), (0, 1), (-1, a), (0, -1))
    cones = ((0, 1), (1, 2), (2, 3), (0, 3))
    return Fan(2, rays, cones)


def product(f1: Fan, f2: Fan) -> Fan:
    n1, n2 = f1.rank, f2.rank
    rays = [tuple(r) + (0,) * n2 for r in f1.rays] + [(0,) * n1 + tuple(r) for r in f2.rays]
    off = f1.n_rays
    cones = [tuple(a) + tuple(off + i for i in b) for a in f1.max_cones for b in f2.max_cones]
    return Fan(n1 + n2, tuple(rays), tuple(cones))


def affine_space(n: int) -> Fan:
    rays = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
    return Fan(n, rays, (tuple(range(n)),))


def stellar_subdivide(fan: Fan, v: Sequence[int]) -> Fan:
    """Star subdivision at the primitive vector ``v``; the new ray is appended last."""
    v = tuple(int(x) for x in v)
    if len(v) != fan.rank or not is_primitive(v):
        raise FanError(f"{list(v)} is not a primitive vector of rank {fan.rank}")
    if v in fan.rays:
        raise AlreadyARay(f"{list(v)} is already a ray")
    containing = [k for k, c in enumerate(fan.max_cones) if fan.geometry(c).contains(v)]
    if not containing:
        raise NotInSupport(f"{list(v)} is not in the support of the fan")
    c0 = fan.max_cones[containing[0]]
    tau = frozenset(c0[i] for i in fan.geometry(c0).minimal_face_of(v))
    new = fan.n_rays
    cones = []
    for k, c in enumerate(fan.max_cones):
        if k not in containing:
            cones.append(c)
            continue
        for _, z in fan.geometry(c).facets:
            face = frozenset(c[i] for i in z)
            if not tau <= face:
                cones.append(tuple(sorted(face)) + (new,))
    return Fan(fan.rank, fan.rays + (v,), tuple(cones))


def blowup_at_fixed_point(fan: Fan, cone: int | Sequence[int]) -> Fan:
    c = fan.max_cones[cone] if isinstance(cone, int) else tuple(sorted(cone))
    if c not in fan.max_cones:
        raise FanError("blow-up centre must be a maximal cone")
    if len(c) != fan.rank or not cone_is_smooth(fan, c):
        raise NotSmoothCone(f"cone {list(c)} is not a smooth maximal cone")
    v = tuple(sum(fan.rays[i][j] for i in c) for j in range(fan.rank))
    return stellar_subdivide(fan, v)


def standard_fan(kind: str, *args) -> Fan:
    """Dispatch on a constructor name: ``ProjectiveSpace``, ``WeightedProjective``,
    ``Hirzebruch``, ``Product`` or ``BlowupAtFixedPoint``."""
    table = {
        "ProjectiveSpace": lambda n: projective_space(n),
        "WeightedProjective": lambda *q: weighted_projective(q),
        "Hirzebruch": lambda a: hirzebruch(a),
        "Product": lambda a, b: product(a, b),
        "BlowupAtFixedPoint": lambda f, c: blowup_at_fixed_point(f, c),
    }
    try:
        return table[kind](*args)
    except KeyError:
        raise FanError(f"unknown fan kind {kind!r}") from None


def parse_fan_name(name: str) -> Fan:
    """Short names used by the CLI: ``P2``, ``P(1,1,2)``, ``F1``, ``P1xP1``, ``Bl(P2)``."""
    s = name.replace(" ", "")
    if "x" in s and not s.startswith("Bl("):
        parts = s.split("x")
        out = parse_fan_name(parts[0])
        for p in parts[1:]:
            out = product(out, parse_fan_name(p))
        return out
    if s.startswith("Bl(") and s.endswith(")"):
        return blowup_at_fixed_point(parse_fan_name(s[3:-1]), 0)
    if s.startswith("P(") and s.endswith(")"):
        return weighted_projective([int(x) for x in s[2:-1].split(",")])
    if s.startswith("P") and s[1:].isdigit():
        return projective_space(int(s[1:]))
    if s.startswith("F") and s[1:].isdigit():
        return hirzebruch(int(s[1:]))
    if s.startswith("A") and s[1:].isdigit():
        return affine_space(int(s[1:]))
    raise FanError(f"unknown fan name {name!r}")


def primitive_vectors_in_box(n: int, bound: int) -> List[IntVec]:
    out = []
    for v in itertools.product(range(-bound, bound + 1), repeat=n):
        if any(v) and math.gcd(*v) == 1:
            out.append(tuple(v))
    return out
