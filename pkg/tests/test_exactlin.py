import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from toricvanish.exactlin import (
    QQ,
    DegreeOutOfRange,
    Feasibility,
    Field,
    Ineq,
    IneqSystem,
    UnboundedRegion,
    contract,
    det,
    feasible,
    invariant_factors,
    lattice_points,
    matmul,
    nullspace,
    rank_over,
    smith_normal_form,
    solve_integer,
)

F2 = Field(2)

int_matrices = st.integers(1, 4).flatmap(
    lambda r: st.integers(1, 4).flatmap(
        lambda c: st.lists(st.lists(st.integers(-6, 6), min_size=c, max_size=c),
                           min_size=r, max_size=r)))


def _diag(S):
    return [S[i][i] for i in range(min(len(S), len(S[0])))]


# --- Smith normal form ---------------------------------------------------

def test_snf_example():
    _, S, _ = smith_normal_form([[2, 4], [6, 8]])
    assert _diag(S) == [2, 4]


def test_snf_identity_and_zero():
    I3 = [[int(i == j) for j in range(3)] for i in range(3)]
    assert smith_normal_form(I3)[1] == I3
    assert smith_normal_form([[0]])[1] == [[0]]


@settings(max_examples=80, deadline=None)
@given(int_matrices)
def test_snf_properties(A):
    U, S, V = smith_normal_form(A)
    assert matmul(matmul(U, A), V) == S
    assert abs(det(U)) == 1 and abs(det(V)) == 1
    for i, row in enumerate(S):
        for j, x in enumerate(row):
            if i != j:
                assert x == 0
    d = [x for x in _diag(S)]
    for a, b in zip(d, d[1:]):
        assert (a == 0 and b == 0) or (a != 0 and b % a == 0)
    if len(A) == len(A[0]) and det(A) != 0:
        assert abs(det(A)) == math.prod(d)


def test_invariant_factors():
    assert invariant_factors([[2, 0], [0, 3]]) == [1, 6]


# --- ranks ---------------------------------------------------------------

def test_rank_examples():
    assert rank_over([[1, 1], [2, 2]], QQ) == 1
    assert rank_over([[1, 1], [1, -1]], F2) == 1
    assert rank_over([[1, 1], [1, -1]], QQ) == 2


@settings(max_examples=80, deadline=None)
@given(int_matrices, st.sampled_from([2, 3, 5, 7]))
def test_rank_q_bounds_rank_p(A, p):
    assert rank_over(A, QQ) >= rank_over(A, Field(p))


def test_field_validation():
    with pytest.raises(ValueError):
        Field(4)
    assert Field.parse("F3") == Field(3)
    assert Field.parse("Q").is_rational


@settings(max_examples=50, deadline=None)
@given(int_matrices)
def test_nullspace_dimension(A):
    ncols = len(A[0])
    K = nullspace(A, ncols)
    assert len(K) == ncols - rank_over(A)
    for v in K:
        assert all(sum(a * b for a, b in zip(row, v)) == 0 for row in A)


def test_solve_integer():
    assert solve_integer([[2, 0], [0, 3]], [4, 9]) == [2, 3]
    assert solve_integer([[2, 0], [0, 3]], [1, 9]) is None


# --- feasibility and lattice points --------------------------------------

def _sys(rank, rows):
    return IneqSystem.of(rank, rows)


def test_feasible_examples():
    assert feasible(_sys(1, [((1,), 0), ((1,), 1), ((-1,), -2)])) is Feasibility.BOUNDED
    assert feasible(_sys(1, [((1,), 0, ">"), ((-1,), 0, ">")])) is Feasibility.EMPTY
    assert feasible(_sys(1, [((1,), 0)])) is Feasibility.UNBOUNDED


def test_lattice_point_examples():
    square = _sys(2, [((1, 0), 0), ((-1, 0), -1), ((0, 1), 0), ((0, -1), -1)])
    assert len(lattice_points(square)) == 4
    simplex = _sys(2, [((1, 0), 0), ((0, 1), 0), ((-1, -1), -2)])
    pts = lattice_points(simplex)
    assert len(pts) == 6 and pts == sorted(pts)
    assert lattice_points(_sys(1, [((1,), 0, ">"), ((-1,), -1, ">")])) == []
    with pytest.raises(UnboundedRegion):
        lattice_points(_sys(1, [((1,), 0)]))


rows2 = st.lists(
    st.tuples(st.tuples(st.integers(-3, 3), st.integers(-3, 3)),
              st.fractions(min_value=-6, max_value=6, max_denominator=3),
              st.sampled_from([">=", ">"])),
    max_size=4)


@settings(max_examples=80, deadline=None)
@given(rows2)
def test_lattice_points_match_box_scan(rows):
    rows = [r for r in rows if any(r[0])]
    box = [((1, 0), -5), ((-1, 0), -5), ((0, 1), -5), ((0, -1), -5)]
    system = _sys(2, box + rows)
    expected = [p for p in itertools.product(range(-10, 11), repeat=2) if system.contains(p)]
    assert lattice_points(system) == sorted(expected)


# --- contraction ---------------------------------------------------------

def test_contract_examples():
    M = contract((1, 0, 0), 1)
    assert nullspace(M, 3) and len(nullspace(M, 3)) == 2
    assert contract((1, 1), 2) == [[-1], [1]]  # e1^e2 -> e2 - e1
    assert nullspace(contract((1, 1), 2), 1) == []
    assert contract((1, 2), 0) == []


def test_contract_degree_out_of_range():
    with pytest.raises(DegreeOutOfRange):
        contract((1, 0), 3)


vectors = st.integers(2, 4).flatmap(
    lambda n: st.lists(st.integers(-3, 3), min_size=n, max_size=n).filter(any))


@settings(max_examples=60, deadline=None)
@given(vectors, st.data())
def test_contract_squares_to_zero(v, data):
    n = len(v)
    a = data.draw(st.integers(2, n))
    assert matmul(contract(v, a - 1), contract(v, a)) == [[0] * math.comb(n, a)
                                                          for _ in range(math.comb(n, a - 2))]


@settings(max_examples=60, deadline=None)
@given(vectors, st.data())
def test_contract_kernel_dimension(v, data):
    n = len(v)
    g = math.gcd(*v)
    v = [x // g for x in v]
    a = data.draw(st.integers(1, n))
    assert len(nullspace(contract(v, a), math.comb(n, a))) == math.comb(n - 1, a)


def test_det_exact():
    assert det([[Fraction(1, 2), 1], [1, 2]]) == 0
