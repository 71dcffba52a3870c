from fractions import Fraction as Fr

import pytest
from hypothesis import given, settings, strategies as st

from toricvanish.cohomology import ReflexiveDiv, cohomology_table
from toricvanish.divisors import (
    DivisorError,
    NotCartier,
    NotComplete,
    NotNef,
    NotQCartier,
    QWeilDivisor,
    canonical_divisor,
    cartier_data,
    is_cartier,
    is_principal,
    polytope_and_kappa,
    polytope_points,
    positivity,
    pullback_along_refinement,
    q_cartier_index,
    rounding,
)
from toricvanish.fans import (
    affine_space,
    blowup_at_fixed_point,
    hirzebruch,
    parse_fan_name,
    product,
    projective_space,
    weighted_projective,
)

P1, P2 = projective_space(1), projective_space(2)
F1 = hirzebruch(1)
W112 = weighted_projective((1, 1, 2))


def D(*c):
    return QWeilDivisor.of(c)


def test_rounding_example():
    r = rounding(D(Fr(3, 2), Fr(-1, 3)))
    assert r.floor == D(1, -1) and r.ceil == D(2, 0) and r.frac == D(Fr(1, 2), Fr(2, 3))
    r = rounding(D(Fr(-5, 2)))
    assert r.floor == D(-3) and r.ceil == D(-2)
    r = rounding(D(2, -7))
    assert r.floor == r.ceil == D(2, -7) and not r.frac.support()


coeffs = st.lists(st.fractions(min_value=-20, max_value=20, max_denominator=7), min_size=1, max_size=6)


@settings(max_examples=100, deadline=None)
@given(coeffs)
def test_rounding_identities(c):
    x = QWeilDivisor.of(c)
    r = rounding(x)
    assert r.floor + r.frac == x
    assert r.ceil == -rounding(-x).floor
    assert all(0 <= f < 1 for f in r.frac)
    assert all(ce == fl + (f != 0) for ce, fl, f in zip(r.ceil, r.floor, r.frac))


def test_canonical():
    assert canonical_divisor(P2) == D(-1, -1, -1)
    assert canonical_divisor(P1) == D(-1, -1)
    assert canonical_divisor(F1) == D(-1, -1, -1, -1)


def test_cartier_data_p2():
    data = cartier_data(P2, D(1, 0, 0))
    assert sorted(data.m) == sorted([(-1, 0), (-1, 1), (0, 0)])
    assert all(x == 0 for m in cartier_data(P2, D(0, 0, 0)).m for x in m)


def test_weighted_not_cartier():
    with pytest.raises(NotCartier):
        cartier_data(W112, D(1, 0, 0))
    assert q_cartier_index(W112, D(1, 0, 0)) == 2
    assert is_cartier(W112, D(2, 0, 0))


def test_q_cartier_cap():
    with pytest.raises(NotQCartier):
        q_cartier_index(W112, D(1, 0, 0), cap=1)


def test_non_simplicial_overdetermined():
    # cone over a square: D_0 alone is not even Q-Cartier
    from toricvanish.fans import Fan
    rays = ((1, 1, 1), (1, -1, 1), (-1, -1, 1), (-1, 1, 1))
    fan = Fan(3, rays, ((0, 1, 2, 3),))
    with pytest.raises(NotCartier):
        cartier_data(fan, D(1, 0, 0, 0), integral=False)
    assert is_cartier(fan, D(1, 0, 1, 0)) is False
    assert is_cartier(fan, D(1, 1, 1, 1))  # -<(0,0,1), u>


def test_positivity_examples():
    p = positivity(P2, D(1, 0, 0))
    assert p.is_nef and p.is_ample
    assert not positivity(P2, D(-1, 0, 0)).is_nef
    fiber = positivity(F1, D(1, 0, 0, 0))
    assert fiber.is_nef and not fiber.is_ample
    assert not positivity(F1, D(0, 1, 0, 0)).is_nef  # the negative section


def test_positivity_needs_complete():
    with pytest.raises(NotComplete):
        positivity(affine_space(2), D(0, 0))


@pytest.mark.parametrize("name", ["P2", "F1", "F2", "P1xP1", "P(1,2,3)", "Bl(P2)"])
def test_ample_scaling(name):
    fan = parse_fan_name(name)
    for c in [(1,) * fan.n_rays, (2,) + (0,) * (fan.n_rays - 1), (0, 1) + (2,) * (fan.n_rays - 2)]:
        x = QWeilDivisor.of(c)
        try:
            p = positivity(fan, x)
        except NotCartier:
            continue
        assert not p.is_ample or p.is_nef
        if p.is_ample:
            assert all(positivity(fan, x * k).is_ample for k in (2, 3))


def test_kappa_examples():
    pk = polytope_and_kappa(P2, D(1, 0, 0))
    assert pk.kappa == 2 and len(polytope_points(P2, D(1, 0, 0))) == 3
    P1P1 = product(P1, P1)
    assert polytope_and_kappa(P1P1, D(1, 0, 0, 0)).kappa == 1
    assert polytope_and_kappa(F1, D(0, 0, 0, 0)).kappa == 0


def test_kappa_scaling_and_errors():
    for k in (1, 2, 3):
        assert polytope_and_kappa(F1, D(k, 0, 0, 0)).kappa == 1
    with pytest.raises(NotNef):
        polytope_and_kappa(P2, D(-1, 0, 0))
    with pytest.raises(NotComplete):
        polytope_and_kappa(affine_space(2), D(0, 0))


def test_kappa_rational():
    pk = polytope_and_kappa(W112, D(Fr(1, 2), 0, 0))
    assert pk.kappa == 2


@pytest.mark.parametrize("name", ["P2", "F1", "F2", "P1xP1", "P(1,1,2)", "Bl(P2)", "P3"])
def test_nef_h0_is_polytope_count(name):
    fan = parse_fan_name(name)
    import itertools
    for c in itertools.product(range(3), repeat=fan.n_rays):
        x = QWeilDivisor.of(c)
        if not is_cartier(fan, x) or not positivity(fan, x).is_nef:
            continue
        assert cohomology_table(fan, ReflexiveDiv(x)).h[0] == len(polytope_points(fan, x))


def test_principal():
    assert is_principal(P2, D(1, 0, -1))  # div of a character
    assert not is_principal(P2, D(1, 0, 0))


def test_pullback_along_blowup():
    B = blowup_at_fixed_point(P2, 0)
    assert pullback_along_refinement(P2, B, D(1, 0, 0)) == D(1, 0, 0, 1)


def test_length_mismatch():
    with pytest.raises(DivisorError):
        cartier_data(P2, D(1, 0))
    with pytest.raises(DivisorError):
        D(1, 0) + D(1, 0, 0)


def test_json_roundtrip():
    x = D(Fr(3, 2), Fr(-1, 3), 4)
    assert x.to_json() == {"coeffs": ["3/2", "-1/3", "4"]}
    assert QWeilDivisor.from_json(x.to_json()) == x
    with pytest.raises(DivisorError):
        QWeilDivisor.from_json({"coeffs": ["1/0"]})
