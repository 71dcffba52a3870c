import itertools
from math import comb

import pytest

from oracles import bott, naive_table, projective_line_bundle
from toricvanish.cohomology import (
    ConeNotInFan,
    CohomologyTable,
    IncompleteFan,
    LogForms,
    ReflexiveDiv,
    cohomology_table,
    graded_complex,
    graded_piece,
    log_forms,
    relevant_degrees,
    sheaf_from_json,
    top_forms_as_divisor,
)
from toricvanish.divisors import QWeilDivisor, canonical_divisor, is_cartier
from toricvanish.exactlin import QQ, Field
from toricvanish.fans import affine_space, parse_fan_name, projective_space

F2, F3 = Field(2), Field(3)
P1, P2, P3 = (projective_space(n) for n in (1, 2, 3))


def O(fan, *c):
    return ReflexiveDiv(QWeilDivisor.of(c))


# --- graded pieces -------------------------------------------------------

def test_piece_affine_line():
    A1 = affine_space(1)
    assert graded_piece(A1, log_forms(A1, 1), (0,), (0,)) == []
    assert len(graded_piece(A1, log_forms(A1, 1, B=[0]), (0,), (0,))) == 1


def test_piece_p2_cone():
    spec = log_forms(P2, 1)
    cone = next(c for c in P2.max_cones if set(c) == {0, 1})
    basis = graded_piece(P2, spec, cone, (1, 0))
    assert len(basis) == 1
    eta = basis[0]
    assert eta[1] == 0  # orthogonal to (0,1)


def test_piece_zero_cone_full():
    assert len(graded_piece(P2, log_forms(P2, 1), (), (5, -3))) == 2


def test_piece_rejects_non_cone():
    with pytest.raises(ConeNotInFan):
        graded_piece(P2, log_forms(P2, 1), (0, 1, 2), (0, 0))


# --- degree enumeration (sign conventions: <m,u> >= -d) -------------------

def test_relevant_degrees_p1():
    assert relevant_degrees(P1, O(P1, 2, 0)) == [(-2,), (-1,), (0,)]
    assert relevant_degrees(P1, O(P1, -1, 0)) == []  # O(-1)
    assert relevant_degrees(P1, O(P1, -1, -1)) == [(0,)]  # K = O(-2)


def test_relevant_degrees_p2_canonical():
    assert relevant_degrees(P2, O(P2, -1, -1, -1)) == [(0, 0)]


def test_chambers_agree_with_box():
    for name in ["P2", "F1", "P(1,1,2)", "Bl(P2)"]:
        fan = parse_fan_name(name)
        for c in itertools.product([-2, 0, 1], repeat=fan.n_rays):
            spec = ReflexiveDiv(QWeilDivisor.of(c))
            box = cohomology_table(fan, spec)
            ch = cohomology_table(fan, spec, enumeration="chambers")
            assert box.per_degree == ch.per_degree, (name, c)


# --- tables --------------------------------------------------------------

def test_table_examples():
    assert cohomology_table(P2, O(P2, -3, 0, 0)).h == (0, 0, 1)
    assert cohomology_table(P1, O(P1, -2, 0)).h == (0, 1)
    assert cohomology_table(P2, log_forms(P2, 1)).h == (0, 1, 0)
    assert cohomology_table(P2, log_forms(P2, 1, G=(1, 0, 0))).h == (0, 0, 0)
    assert cohomology_table(P2, log_forms(P2, 1, G=(2, 0, 0))).h == (3, 0, 0)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_projective_line_bundles(n):
    fan = projective_space(n)
    for d in range(-n - 2, n + 3):
        c = (d,) + (0,) * n
        assert cohomology_table(fan, ReflexiveDiv(QWeilDivisor.of(c))).h == projective_line_bundle(n, d)


@pytest.mark.parametrize("p", [0, 1, 2])
def test_bott_formula_p2(p):
    for d in range(-3, 4):
        spec = log_forms(P2, p, G=(d, 0, 0))
        assert cohomology_table(P2, spec).h == bott(2, p, d)


def test_bott_formula_p3():
    for p in range(4):
        for d in (-2, 0, 2):
            assert cohomology_table(P3, log_forms(P3, p, G=(d, 0, 0, 0))).h == bott(3, p, d)


@pytest.mark.parametrize("name,bound", [("P1", 5), ("P2", 4), ("F1", 4), ("P(1,1,2)", 4),
                                         ("Bl(P2)", 4), ("P(1,2,3)", 4)])
def test_brute_force_cech_oracle(name, bound):
    fan = parse_fan_name(name)
    for c in itertools.product([-2, -1, 1], repeat=fan.n_rays):
        if max(abs(x) for x in c) * 2 > bound:
            continue
        t = cohomology_table(fan, ReflexiveDiv(QWeilDivisor.of(c)))
        assert max((max(map(abs, m)) for m in t.per_degree), default=0) <= bound
        assert t.per_degree == naive_table(fan.rays, fan.max_cones, c, fan.rank, bound), (name, c)


def test_brute_force_oracle_mod2():
    fan = parse_fan_name("P(1,1,2)")
    for c in [(-1, -1, -1), (-2, 0, -1), (1, 1, 0)]:
        t = cohomology_table(fan, ReflexiveDiv(QWeilDivisor.of(c)), F2)
        assert t.per_degree == naive_table(fan.rays, fan.max_cones, c, fan.rank, 4, p=2)


SPECS = [
    lambda f: O(f, *([-1] * f.n_rays)),
    lambda f: O(f, *([1] + [0] * (f.n_rays - 1))),
    lambda f: log_forms(f, 1),
    lambda f: log_forms(f, 1, B=[0], G=[1] + [-1] * (f.n_rays - 1)),
    lambda f: log_forms(f, f.rank, B=[0, 1]),
]


@pytest.mark.parametrize("name", ["P2", "F1", "P(1,1,2)", "P1xP1", "P3"])
def test_cellular_matches_cech(name):
    fan = parse_fan_name(name)
    for make in SPECS:
        spec = make(fan)
        a = cohomology_table(fan, spec, method="cellular")
        b = cohomology_table(fan, spec, method="cech")
        assert a.per_degree == b.per_degree, (name, spec)


@pytest.mark.parametrize("name", ["P2", "Bl(P2)", "P(1,2,3)", "P3"])
def test_dd_zero(name):
    fan = parse_fan_name(name)
    for make in SPECS:
        spec = make(fan)
        for m in itertools.product(range(-1, 2), repeat=fan.rank):
            for method in ("cellular", "cech"):
                assert graded_complex(fan, spec, m, QQ, method).check_dd()


# --- invariants ----------------------------------------------------------

NAMES = ["P1", "P2", "F1", "F2", "P(1,1,2)", "P(1,2,3)", "P1xP1", "Bl(P2)", "P3"]


def _twists(fan):
    yield (0,) * fan.n_rays
    yield (1,) + (0,) * (fan.n_rays - 1)
    yield tuple((-1) ** i * (i % 3) for i in range(fan.n_rays))


@pytest.mark.parametrize("name", NAMES)
def test_log_forms_degree_zero_is_line_bundle(name):
    fan = parse_fan_name(name)
    for G in _twists(fan):
        ref = cohomology_table(fan, ReflexiveDiv(QWeilDivisor.of(G)))
        for B in [(), (0,), tuple(range(fan.n_rays))]:
            assert cohomology_table(fan, log_forms(fan, 0, B, G)).per_degree == ref.per_degree


@pytest.mark.parametrize("name", NAMES)
def test_top_forms_are_canonical(name):
    fan = parse_fan_name(name)
    for G in _twists(fan):
        G = QWeilDivisor.of(G)
        t = cohomology_table(fan, LogForms(fan.rank, frozenset(), G))
        assert t.per_degree == cohomology_table(fan, top_forms_as_divisor(fan, G)).per_degree


@pytest.mark.parametrize("name", NAMES)
def test_full_boundary_is_free(name):
    fan = parse_fan_name(name)
    allB = tuple(range(fan.n_rays))
    for G in _twists(fan):
        ref = cohomology_table(fan, ReflexiveDiv(QWeilDivisor.of(G)))
        for a in range(fan.rank + 1):
            t = cohomology_table(fan, log_forms(fan, a, allB, G))
            assert t.h == tuple(comb(fan.rank, a) * x for x in ref.h)


@pytest.mark.parametrize("name", NAMES)
@pytest.mark.parametrize("field", [QQ, F2, F3])
def test_structure_sheaf(name, field):
    fan = parse_fan_name(name)
    t = cohomology_table(fan, O(fan, *([0] * fan.n_rays)), field)
    assert t.h == (1,) + (0,) * fan.rank


@pytest.mark.parametrize("name", ["P1", "P2", "F1", "F2", "P1xP1", "Bl(P2)", "P3"])
def test_serre_duality(name):
    fan = parse_fan_name(name)
    K = canonical_divisor(fan)
    for c in itertools.product([-2, 0, 1], repeat=fan.n_rays):
        D = QWeilDivisor.of(c)
        if not is_cartier(fan, D):
            continue
        h = cohomology_table(fan, ReflexiveDiv(D)).h
        hd = cohomology_table(fan, ReflexiveDiv(K - D)).h
        assert h == hd[::-1]


def test_incomplete_fan_rejected():
    with pytest.raises(IncompleteFan):
        cohomology_table(affine_space(2), O(None, 0, 0))


def test_table_json():
    t = cohomology_table(P2, log_forms(P2, 1, G=(2, 0, 0)))
    data = t.to_json()
    assert data["h"] == [3, 0, 0] and data["field"] == "Q"
    assert [e["m"] for e in data["per_degree"]] == sorted(e["m"] for e in data["per_degree"])
    assert CohomologyTable.from_json(data).per_degree == t.per_degree


def test_sheaf_json_roundtrip():
    for spec in [O(P2, -1, -1, -1), log_forms(P2, 1, B=[2], G=(1, 0, 0))]:
        assert sheaf_from_json(spec.to_json()) == spec
    assert sheaf_from_json({"reflexive_div": {"coeffs": ["-1", "-1", "-1"]}}) == O(P2, -1, -1, -1)


def cube_fan():
    from toricvanish.fans import Fan
    rays = tuple(itertools.product((-1, 1), repeat=3))
    cones = []
    for axis in range(3):
        for sign in (-1, 1):
            cones.append(tuple(i for i, r in enumerate(rays) if r[axis] == sign))
    return Fan(3, rays, tuple(cones))


def test_non_simplicial_cube_fan():
    from toricvanish.divisors import polytope_points, positivity
    from toricvanish.fans import predicates, validate
    fan = cube_fan()
    assert validate(fan) == []
    p = predicates(fan)
    assert p.is_complete and not p.is_simplicial and p.has_ample
    ones = QWeilDivisor.of((1,) * 8)
    assert is_cartier(fan, ones) and positivity(fan, ones).is_ample
    t = cohomology_table(fan, ReflexiveDiv(ones))
    assert t.h == (len(polytope_points(fan, ones)), 0, 0, 0)
    for a in range(4):
        spec = log_forms(fan, a)
        assert cohomology_table(fan, spec).per_degree == \
            cohomology_table(fan, spec, method="cech").per_degree
        full = cohomology_table(fan, log_forms(fan, a, range(8), ones)).h
        assert full == tuple(comb(3, a) * x for x in t.h)
    assert cohomology_table(fan, LogForms(3, frozenset(), ones)).per_degree == \
        cohomology_table(fan, top_forms_as_divisor(fan, ones)).per_degree
