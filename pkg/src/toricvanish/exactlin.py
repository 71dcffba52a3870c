"""Exact integer/rational linear algebra and polyhedral routines.

Everything here works on Python ints and :class:`fractions.Fraction`; no
floating point is used.  Ranks over ``F_p`` use vectorised int64 elimination,
which is exact because ``p < 2**31`` keeps every product below ``2**63``.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

Matrix = List[List[int]]

# Largest prime below 2**31; used to filter zero-rank-deficiency cases cheaply.
BIG_PRIME = 2147483647


class DegreeOutOfRange(ValueError):
    pass


class UnboundedRegion(ValueError):
    pass


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    r = math.isqrt(p)
    for q in range(3, r + 1, 2):
        if p % q == 0:
            return False
    return True


@dataclass(frozen=True)
class Field:
    """Coefficient field: the rationals (``p == 0``) or ``F_p``."""

    p: int = 0

    def __post_init__(self):
        if self.p != 0:
            if self.p >= 2**31 or not _is_prime(self.p):
                raise ValueError(f"F_{self.p} is not a supported prime field")

    @classmethod
    def parse(cls, text: str) -> "Field":
        t = text.strip()
        if t in ("Q", "QQ", "0"):
            return cls(0)
        if t[:1] in ("F", "f"):
            t = t[1:]
        try:
            return cls(int(t))
        except ValueError:
            raise ValueError(f"unrecognised field {text!r}") from None

    @property
    def is_rational(self) -> bool:
        return self.p == 0

    def __str__(self) -> str:
        return "Q" if self.p == 0 else f"F{self.p}"


QQ = Field(0)


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


def dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


def vec_gcd(v: Iterable[int]) -> int:
    g = 0
    for x in v:
        g = math.gcd(g, int(x))
    return g


def is_primitive(v: Sequence[int]) -> bool:
    return vec_gcd(v) == 1


def clear_denominators(v: Sequence[Fraction]) -> List[int]:
    """Smallest positive integer multiple of ``v`` that is integral and primitive."""
    den = 1
    for x in v:
        den = den * x.denominator // math.gcd(den, x.denominator)
    w = [int(x * den) for x in v]
    g = vec_gcd(w)
    return [x // g for x in w] if g > 1 else w


# ---------------------------------------------------------------------------
# Smith normal form


def _identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A: Sequence[Sequence], B: Sequence[Sequence]) -> list:
    if not A:
        return []
    cols = len(B[0]) if B else 0
    return [[sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(cols)]
            for i in range(len(A))]


def smith_normal_form(A: Sequence[Sequence[int]]) -> Tuple[Matrix, Matrix, Matrix]:
    """Return ``(U, S, V)`` with ``U @ A @ V == S`` and ``U``, ``V`` unimodular.

    ``S`` is diagonal with nonnegative entries ``d_1 | d_2 | ...``.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    S = [[int(x) for x in row] for row in A]
    U = _identity(m)
    V = _identity(n)

    def swap_rows(i, j):
        S[i], S[j] = S[j], S[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in S:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, q):  # row dst += q * row src
        S[dst] = [a + q * b for a, b in zip(S[dst], S[src])]
        U[dst] = [a + q * b for a, b in zip(U[dst], U[src])]

    def add_col(src, dst, q):
        for row in S:
            row[dst] += q * row[src]
        for row in V:
            row[dst] += q * row[src]

    t = 0
    while t < min(m, n):
        nonzero = [(abs(S[i][j]), i, j) for i in range(t, m) for j in range(t, n) if S[i][j]]
        if not nonzero:
            break
        _, i, j = min(nonzero)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            done = True
            for i in range(t + 1, m):
                if S[i][t]:
                    q = S[i][t] // S[t][t]
                    add_row(t, i, -q)
                    if S[i][t]:
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, n):
                if S[t][j]:
                    q = S[t][j] // S[t][t]
                    add_col(t, j, -q)
                    if S[t][j]:
                        swap_cols(t, j)
                        done = False
            if not done:
                continue
            # divisibility: the pivot must divide every remaining entry
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if S[i][j] % S[t][t]), None)
            if bad is None:
                break
            add_row(bad[0], t, 1)
        if S[t][t] < 0:
            S[t] = [-x for x in S[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return U, S, V


def invariant_factors(A: Sequence[Sequence[int]]) -> List[int]:
    _, S, _ = smith_normal_form(A)
    return [S[i][i] for i in range(min(len(S), len(S[0]) if S else 0)) if S[i][i]]


def det(A: Sequence[Sequence]) -> Fraction:
    n = len(A)
    M = [[as_fraction(x) for x in row] for row in A]
    d = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c]), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            d = -d
        d *= M[c][c]
        for r in range(c + 1, n):
            if M[r][c]:
                f = M[r][c] / M[c][c]
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    return d


def int_det(A: Sequence[Sequence[int]]) -> int:
    return int(det(A))


# ---------------------------------------------------------------------------
# Rank and nullspace


def _rank_bareiss(A: Sequence[Sequence[int]]) -> int:
    M = [list(map(int, row)) for row in A if any(row)]
    if not M:
        return 0
    rows, cols = len(M), len(M[0])
    rank = 0
    prev = 1
    for c in range(cols):
        piv = next((r for r in range(rank, rows) if M[r][c]), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        p = M[rank][c]
        for r in range(rank + 1, rows):
            f = M[r][c]
            if f:
                M[r] = [(p * a - f * b) // prev for a, b in zip(M[r], M[rank])]
            else:
                M[r] = [(p * a) // prev for a in M[r]]
        prev = p
        rank += 1
        if rank == rows:
            break
    return rank


def _rank_mod_p(A, p: int) -> int:
    M = np.array(A, dtype=np.int64) % p
    if M.size == 0:
        return 0
    rows, cols = M.shape
    rank = 0
    for c in range(cols):
        if rank == rows:
            break
        nz = np.nonzero(M[rank:, c])[0]
        if nz.size == 0:
            continue
        piv = rank + int(nz[0])
        if piv != rank:
            M[[rank, piv]] = M[[piv, rank]]
        inv = pow(int(M[rank, c]), p - 2, p)
        M[rank] = (M[rank] * inv) % p
        below = M[rank + 1:, c].copy()
        mask = below != 0
        if mask.any():
            M[rank + 1:][mask] = (M[rank + 1:][mask] - np.outer(below[mask], M[rank]) % p) % p
        rank += 1
    return rank


def rank_over(A: Sequence[Sequence[int]], field: Field = QQ) -> int:
    """Rank of an integer matrix over ``Q`` (fraction-free) or ``F_p``."""
    if not A or not len(A[0]):
        return 0
    if field.is_rational:
        return _rank_bareiss(A)
    return _rank_mod_p(A, field.p)


def rank_filtered(A: Sequence[Sequence[int]], field: Field = QQ) -> int:
    """Like :func:`rank_over`, but for ``Q`` first tries a large prime.

    A full-rank result mod a prime is also full rank over ``Q``; only
    rank-deficient cases fall back to exact elimination.
    """
    if not A or not len(A[0]):
        return 0
    if not field.is_rational:
        return _rank_mod_p(A, field.p)
    r = _rank_mod_p(A, BIG_PRIME)
    if r == min(len(A), len(A[0])):
        return r
    return _rank_bareiss(A)


def _rref_fraction(A: Sequence[Sequence]) -> Tuple[List[List[Fraction]], List[int]]:
    M = [[as_fraction(x) for x in row] for row in A]
    rows = len(M)
    cols = len(M[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        pv = M[r][c]
        M[r] = [x / pv for x in M[r]]
        for i in range(rows):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return M[:r], pivots


def _rref_mod_p(A: Sequence[Sequence[int]], p: int) -> Tuple[List[List[int]], List[int]]:
    M = [[int(x) % p for x in row] for row in A]
    rows = len(M)
    cols = len(M[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = pow(M[r][c], p - 2, p)
        M[r] = [(x * inv) % p for x in M[r]]
        for i in range(rows):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [(a - f * b) % p for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return M[:r], pivots


def nullspace(A: Sequence[Sequence], ncols: int, field: Field = QQ) -> List[List[int]]:
    """Basis of ``{x : A x = 0}`` in ``k^ncols``.

    Over ``Q`` the basis vectors are primitive integer vectors; over ``F_p``
    they are residues in ``[0, p)``.
    """
    if not A:
        return [[int(i == j) for j in range(ncols)] for i in range(ncols)]
    if field.is_rational:
        R, pivots = _rref_fraction(A)
    else:
        R, pivots = _rref_mod_p(A, field.p)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols if field.is_rational else [0] * ncols
        v[f] = 1
        for row, pc in zip(R, pivots):
            v[pc] = -row[f] if field.is_rational else (-row[f]) % field.p
        basis.append(clear_denominators(v) if field.is_rational else v)
    return basis


def solve_rational(A: Sequence[Sequence], b: Sequence) -> Optional[List[Fraction]]:
    """Some rational solution of ``A x = b``, or None when inconsistent."""
    ncols = len(A[0]) if A else 0
    aug = [list(row) + [bb] for row, bb in zip(A, b)]
    R, pivots = _rref_fraction(aug)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for row, pc in zip(R, pivots):
        x[pc] = row[ncols]
    return x


def solve_integer(A: Sequence[Sequence[int]], b: Sequence[int], ncols: Optional[int] = None):
    """Some integer solution of ``A x = b`` (via Smith form), or None."""
    ncols = len(A[0]) if A else (ncols or 0)
    if not A:
        return [0] * ncols if not any(b) else None
    U, S, V = smith_normal_form(A)
    c = [sum(U[i][k] * b[k] for k in range(len(b))) for i in range(len(A))]
    y = [0] * ncols
    for i in range(len(A)):
        s = S[i][i] if i < ncols else 0
        if s == 0:
            if c[i] != 0:
                return None
        elif c[i] % s:
            return None
        else:
            y[i] = c[i] // s
    return [sum(V[j][k] * y[k] for k in range(ncols)) for j in range(ncols)]


def solve_in_span(vectors: Sequence[Sequence], target: Sequence, field: Field = QQ):
    """Coefficients ``c`` with ``sum c_i vectors[i] == target``, or None."""
    if not vectors:
        return [] if not any(target) else None
    A = [[v[r] for v in vectors] for r in range(len(target))]
    if field.is_rational:
        return solve_rational(A, target)
    p = field.p
    aug = [list(row) + [t] for row, t in zip(A, target)]
    R, pivots = _rref_mod_p(aug, p)
    k = len(vectors)
    if k in pivots:
        return None
    x = [0] * k
    for row, pc in zip(R, pivots):
        x[pc] = row[k]
    return x


def lattice_rank(vectors: Sequence[Sequence[int]]) -> int:
    return rank_over([list(v) for v in vectors]) if vectors else 0


# ---------------------------------------------------------------------------
# Exterior algebra


@lru_cache(maxsize=None)
def wedge_basis(n: int, a: int) -> Tuple[Tuple[int, ...], ...]:
    """Index sets of the standard basis ``e_S`` of the a-th exterior power."""
    if a < 0 or a > n:
        return ()
    return tuple(itertools.combinations(range(n), a))


def contract(v: Sequence[int], a: int) -> Matrix:
    """Interior product with ``v`` from degree ``a`` to degree ``a - 1`` forms.

    Columns index the basis ``e_S`` (``|S| = a``) and rows ``e_T``
    (``|T| = a - 1``), both in lexicographic order.
    """
    n = len(v)
    if a < 0 or a > n:
        raise DegreeOutOfRange(f"form degree {a} outside [0, {n}]")
    if not any(v):
        raise ValueError("contraction vector must be nonzero")
    src = wedge_basis(n, a)
    tgt = wedge_basis(n, a - 1)
    row_of = {T: i for i, T in enumerate(tgt)}
    M = [[0] * len(src) for _ in tgt]
    for j, S in enumerate(src):
        for k, s in enumerate(S):
            if v[s]:
                T = S[:k] + S[k + 1:]
                M[row_of[T]][j] += (-1) ** k * v[s]
    return M


# ---------------------------------------------------------------------------
# Inequality systems and Fourier-Motzkin elimination


class Feasibility(enum.Enum):
    EMPTY = "Empty"
    BOUNDED = "Bounded"
    UNBOUNDED = "Unbounded"


@dataclass(frozen=True)
class Ineq:
    """``<normal, x>  rel  offset`` with ``rel`` one of ``>=``, ``>``, ``=``."""

    normal: Tuple[int, ...]
    offset: Fraction
    rel: str = ">="

    def __post_init__(self):
        if self.rel not in (">=", ">", "="):
            raise ValueError(f"bad relation {self.rel!r}")
        object.__setattr__(self, "offset", as_fraction(self.offset))
        object.__setattr__(self, "normal", tuple(self.normal))

    def holds(self, x: Sequence) -> bool:
        s = dot(self.normal, x)
        if self.rel == ">=":
            return s >= self.offset
        if self.rel == ">":
            return s > self.offset
        return s == self.offset


@dataclass(frozen=True)
class IneqSystem:
    rank: int
    rows: Tuple[Ineq, ...] = ()

    @classmethod
    def of(cls, rank: int, rows: Iterable) -> "IneqSystem":
        out = []
        for r in rows:
            if not isinstance(r, Ineq):
                r = Ineq(*r)
            if len(r.normal) != rank:
                raise ValueError("normal length does not match rank")
            out.append(r)
        return cls(rank, tuple(out))

    def __and__(self, other: "IneqSystem") -> "IneqSystem":
        return IneqSystem(self.rank, self.rows + other.rows)

    def with_rows(self, rows: Iterable) -> "IneqSystem":
        return self & IneqSystem.of(self.rank, rows)

    def contains(self, x: Sequence) -> bool:
        return all(r.holds(x) for r in self.rows)


# Internal row: (coeffs tuple of ints with gcd 1, rhs Fraction, strict bool)
_Row = Tuple[Tuple[int, ...], Fraction, bool]


def _scale_to_int(normal, offset) -> Tuple[List[int], Fraction]:
    den = 1
    for x in normal:
        x = as_fraction(x)
        den = den * x.denominator // math.gcd(den, x.denominator)
    return [int(as_fraction(x) * den) for x in normal], as_fraction(offset) * den


def _normalize(coeffs: Sequence[int], rhs: Fraction, strict: bool) -> Optional[_Row]:
    """Divide by the coefficient gcd; return None for a tautology, raise on contradiction."""
    g = vec_gcd(coeffs)
    if g == 0:
        ok = (0 > rhs) if strict else (0 >= rhs)
        if not ok:
            raise _Infeasible
        return None
    if g > 1:
        coeffs = tuple(c // g for c in coeffs)
        rhs = rhs / g
    return tuple(coeffs), rhs, strict


class _Infeasible(Exception):
    pass


def _prepare(system: IneqSystem) -> Tuple[List[_Row], List[Tuple[List[int], Fraction]]]:
    ineqs: List[_Row] = []
    eqs = []
    for r in system.rows:
        c, b = _scale_to_int(r.normal, r.offset)
        if r.rel == "=":
            eqs.append((c, b))
        else:
            row = _normalize(c, b, r.rel == ">")
            if row is not None:
                ineqs.append(row)
    return ineqs, eqs


def _eliminate_equalities(ineqs: List[_Row], eqs, nvars: int):
    """Substitute equalities away.  Returns (ineqs, list of substitutions).

    Each substitution is ``(var, coeffs, rhs, pivot)`` meaning
    ``pivot * x_var = rhs - sum(coeffs_j x_j)`` over the remaining variables.
    """
    subs = []
    eqs = [(list(c), Fraction(b)) for c, b in eqs]
    while eqs:
        c, b = eqs.pop()
        nz = [j for j in range(nvars) if c[j]]
        if not nz:
            if b != 0:
                raise _Infeasible
            continue
        j = min(nz, key=lambda k: (abs(c[k]), k))
        a = c[j]
        subs.append((j, tuple(c), b, a))

        def sub(cc, bb):
            f = cc[j]
            if not f:
                return list(cc), bb
            # a*cc - f*c has zero in column j
            s = 1 if a > 0 else -1
            return [s * (a * x - f * y) for x, y in zip(cc, c)], s * (a * bb - f * b)

        eqs = [sub(cc, bb) for cc, bb in eqs]
        new = []
        for cc, bb, st in ineqs:
            cc2, bb2 = sub(cc, bb)
            row = _normalize(cc2, bb2, st)
            if row is not None:
                new.append(row)
        ineqs = new
    return ineqs, subs


def _dedupe(rows: List[_Row]) -> List[_Row]:
    best = {}
    for c, b, st in rows:
        cur = best.get(c)
        if cur is None or b > cur[0] or (b == cur[0] and st and not cur[1]):
            best[c] = (b, st)
    # opposite pairs c.x >= b and -c.x >= b' : contradiction when b + b' > 0
    for c, (b, st) in best.items():
        neg = tuple(-x for x in c)
        if neg in best:
            b2, st2 = best[neg]
            tot = b + b2
            if tot > 0 or (tot == 0 and (st or st2)):
                raise _Infeasible
    return [(c, b, st) for c, (b, st) in best.items()]


def _fm_step(rows: List[_Row], j: int, hist=None):
    pos, neg, zero = [], [], []
    for idx, r in enumerate(rows):
        cj = r[0][j]
        (pos if cj > 0 else neg if cj < 0 else zero).append(idx)
    out = [rows[i] for i in zero]
    out_hist = [hist[i] for i in zero] if hist is not None else None
    for i in pos:
        cp, bp, sp = rows[i]
        for k in neg:
            cn, bn, sn = rows[k]
            if hist is not None:
                h = hist[i] | hist[k]
            a, b = -cn[j], cp[j]
            coeffs = [a * x + b * y for x, y in zip(cp, cn)]
            row = _normalize(coeffs, a * bp + b * bn, sp or sn)
            if row is not None:
                out.append(row)
                if hist is not None:
                    out_hist.append(h)
    return out, out_hist


def _project(rows: List[_Row], eliminate: Sequence[int]) -> List[_Row]:
    """Fourier-Motzkin projection along the variables in ``eliminate``."""
    rows = _dedupe(rows)
    # Chernikov's redundancy rule is only valid without strict rows.
    chernikov = not any(st for _, _, st in rows)
    hist = [frozenset([i]) for i in range(len(rows))]
    for step, j in enumerate(eliminate):
        rows, hist = _fm_step(rows, j, hist)
        if chernikov:
            # a row combining more than step+2 originals is redundant
            keep = [(r, h) for r, h in zip(rows, hist) if len(h) <= step + 2]
            rows = [r for r, _ in keep]
            hist = [h for _, h in keep]
        best = {}
        for r, h in zip(rows, hist):
            c, b, st = r
            cur = best.get(c)
            if cur is None or b > cur[0][1] or (b == cur[0][1] and st and not cur[0][2]):
                best[c] = (r, h)
        rows = [v[0] for v in best.values()]
        hist = [v[1] for v in best.values()]
        _dedupe(rows)
    return rows


def _fm_empty(rows: List[_Row], nvars: int) -> bool:
    """True iff the strict/non-strict system ``rows`` has no rational solution."""
    try:
        _project(rows, range(nvars))
        return False
    except _Infeasible:
        return True


def is_empty(system: IneqSystem) -> bool:
    try:
        ineqs, eqs = _prepare(system)
        ineqs, _ = _eliminate_equalities(ineqs, eqs, system.rank)
    except _Infeasible:
        return True
    return _fm_empty(ineqs, system.rank)


def feasible(system: IneqSystem) -> Feasibility:
    """Classify the rational solution set as empty, bounded or unbounded."""
    if is_empty(system):
        return Feasibility.EMPTY
    n = system.rank
    rec = []
    for r in system.rows:
        rec.append(Ineq(r.normal, 0, "=" if r.rel == "=" else ">="))
    rec = IneqSystem(n, tuple(rec))
    for i in range(n):
        for s in (1, -1):
            e = tuple(s if k == i else 0 for k in range(n))
            if not is_empty(rec.with_rows([Ineq(e, 1, ">=")])):
                return Feasibility.UNBOUNDED
    return Feasibility.BOUNDED


def _bounds_first_var(rows: List[_Row], eqs, nvars: int):
    """Exact bounds on x_0 after projecting away x_1..x_{n-1}.

    Returns ``(lo, lo_strict, hi, hi_strict)`` with None for an unbounded side,
    or raises _Infeasible.
    """
    rows = _project(_eliminate_equalities_keep0(rows, eqs, nvars), range(1, nvars))
    lo = hi = None
    lo_s = hi_s = False
    for c, b, st in rows:
        c0 = c[0]
        if c0 > 0:
            v = b / c0
            if lo is None or v > lo or (v == lo and st):
                lo, lo_s = v, st
        elif c0 < 0:
            v = b / c0
            if hi is None or v < hi or (v == hi and st):
                hi, hi_s = v, st
    return lo, lo_s, hi, hi_s


def _eliminate_equalities_keep0(ineqs, eqs, nvars):
    """Substitute equalities away, never solving for x_0.

    An equality involving only x_0 becomes a pair of opposite inequalities.
    """
    eqs = [(list(c), Fraction(b)) for c, b in eqs]
    pinned = None
    while eqs:
        c, b = eqs.pop()
        nz = [j for j in range(nvars) if c[j]]
        if not nz:
            if b != 0:
                raise _Infeasible
            continue
        others = [j for j in nz if j != 0]
        if not others:
            v = b / c[0]
            if pinned is not None and pinned != v:
                raise _Infeasible
            pinned = v
            continue
        j = min(others, key=lambda k: (abs(c[k]), k))
        a = c[j]
        s = 1 if a > 0 else -1

        def sub(cc, bb, j=j, a=a, s=s, c=c, b=b):
            f = cc[j]
            if not f:
                return list(cc), bb
            return [s * (a * x - f * y) for x, y in zip(cc, c)], s * (a * bb - f * b)

        eqs = [sub(cc, bb) for cc, bb in eqs]
        new = []
        for cc, bb, st in ineqs:
            cc2, bb2 = sub(cc, bb)
            row = _normalize(cc2, bb2, st)
            if row is not None:
                new.append(row)
        ineqs = new
    if pinned is not None:
        rows = list(ineqs) + [((1,) + (0,) * (nvars - 1), pinned, False),
                              ((-1,) + (0,) * (nvars - 1), -pinned, False)]
        return rows
    return ineqs


def _substitute_first(system: IneqSystem, value: int) -> IneqSystem:
    rows = []
    for r in system.rows:
        rows.append(Ineq(r.normal[1:], r.offset - r.normal[0] * value, r.rel))
    return IneqSystem(system.rank - 1, tuple(rows))


def _int_range(lo, lo_s, hi, hi_s) -> range:
    a = math.floor(lo) + 1 if lo_s and lo == math.floor(lo) else math.ceil(lo)
    b = math.ceil(hi) - 1 if hi_s and hi == math.ceil(hi) else math.floor(hi)
    return range(a, b + 1)


def _lattice_rec(system: IneqSystem, prefix: Tuple[int, ...], out: list, limit):
    n = system.rank
    if n == 0:
        if all(r.holds(()) for r in system.rows):
            out.append(prefix)
        return
    try:
        ineqs, eqs = _prepare(system)
        lo, lo_s, hi, hi_s = _bounds_first_var(ineqs, eqs, n)
    except _Infeasible:
        return
    if lo is None or hi is None:
        raise UnboundedRegion("region is unbounded in some coordinate")
    for v in _int_range(lo, lo_s, hi, hi_s):
        _lattice_rec(_substitute_first(system, v), prefix + (v,), out, limit)
        if limit is not None and len(out) >= limit:
            return


def lattice_points(system: IneqSystem, limit: Optional[int] = None) -> List[Tuple[int, ...]]:
    """All integer points of a bounded system, in lexicographic order."""
    if feasible(system) is Feasibility.UNBOUNDED:
        raise UnboundedRegion("lattice point enumeration needs a bounded region")
    out: list = []
    _lattice_rec(system, (), out, limit)
    return out


def lattice_points_bounded(system: IneqSystem, limit: Optional[int] = None) -> List[Tuple[int, ...]]:
    """Enumerate without the up-front boundedness test (caller guarantees it)."""
    out: list = []
    _lattice_rec(system, (), out, limit)
    return out


def find_point(system: IneqSystem) -> Optional[List[Fraction]]:
    """A rational point of the system (small integers preferred), or None."""
    n = system.rank
    if is_empty(system):
        return None
    if n == 0:
        return []
    ineqs, eqs = _prepare(system)
    lo, lo_s, hi, hi_s = _bounds_first_var(ineqs, eqs, n)
    v = _pick_value(lo, lo_s, hi, hi_s)
    rest = find_point(_substitute_first(system, v))
    if rest is None:  # pragma: no cover - projection is exact
        raise AssertionError("Fourier-Motzkin back-substitution failed")
    return [Fraction(v)] + rest


def _pick_value(lo, lo_s, hi, hi_s) -> Fraction:
    def ok(x):
        if lo is not None and (x < lo or (lo_s and x == lo)):
            return False
        if hi is not None and (x > hi or (hi_s and x == hi)):
            return False
        return True

    if ok(0):
        return Fraction(0)
    if lo is None:
        return Fraction(math.floor(hi) - 1)
    if hi is None:
        return Fraction(math.floor(lo) + 1)
    ints = _int_range(lo, lo_s, hi, hi_s)
    if len(ints):
        return Fraction(min(ints, key=abs))
    return (lo + hi) / 2


def affine_dimension(system: IneqSystem) -> int:
    """Dimension of the affine hull of a nonempty system's solution set."""
    implicit = []
    for r in system.rows:
        if r.rel == "=":
            implicit.append(r.normal)
            continue
        strict = system.with_rows([Ineq(r.normal, r.offset, ">")])
        if is_empty(strict):
            implicit.append(r.normal)
    if not implicit:
        return system.rank
    A, _ = _rref_fraction([list(v) for v in implicit])
    return system.rank - len(A)
