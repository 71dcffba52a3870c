import itertools
from fractions import Fraction as Fr

import pytest

import toricvanish.verify as V
from toricvanish.cohomology import CohomologyTable
from toricvanish.divisors import QWeilDivisor
from toricvanish.exactlin import QQ, Field
from toricvanish.fans import hirzebruch, parse_fan_name, projective_space
from toricvanish.verify import (
    Instance,
    InstanceError,
    TheoremId,
    check,
    check_all,
    generate_corpus,
    mustata_direct,
    read_corpus,
    regression_blowup_example,
    verify_many,
    write_corpus,
)

P1, P2 = projective_space(1), projective_space(2)
F2 = Field(2)


def D(*c):
    return QWeilDivisor.of(c)


def test_theorem_ids():
    assert [t.value for t in TheoremId] == [
        "MainI", "Bott", "Norimatsu", "NorimatsuPrimeDivisors", "Kodaira", "MainII",
        "KawamataViehweg", "Vari", "Mustata", "Bogomolov", "KollarInjectivity"]
    assert TheoremId.parse("kodaira") is TheoremId.Kodaira
    with pytest.raises(ValueError):
        TheoremId.parse("Fermat")


def test_kodaira_p2():
    r = check(TheoremId.Kodaira, Instance(P2, L=D(1, 0, 0)))
    assert r.holds and r.tables["K+L"] == [0, 0, 0]


def test_kv_p1():
    r = check(TheoremId.KawamataViehweg, Instance(P1, D_kv=D(Fr(1, 2), 0)))
    assert r.holds
    assert r.tables["floor(D)"] == [1, 0] and r.tables["K+ceil(D)"] == [0, 0]
    assert r.tables["kappa"] == [1]


def test_bogomolov_p2():
    r = check(TheoremId.Bogomolov, Instance(P2, L=D(1, 0, 0), N=D(1, 0, 0)))
    assert r.holds and r.tables["LogForms(1,B)x-L"][0] == 0


def test_bogomolov_trivial_is_hypothesis_failure():
    r = check(TheoremId.Bogomolov, Instance(P2, L=D(0, 0, 0), N=D(1, -1, 0)))
    assert r.status == "hypothesis_failure" and r.holds is None
    assert not r.witnesses


def test_main1_level_one():
    for a in range(3):
        r = check(TheoremId.MainI, Instance(P2, L=D(1, 0, 0), l=1, a=a))
        assert r.holds


def test_missing_data_is_hypothesis_failure():
    r = check(TheoremId.Kodaira, Instance(P2))
    assert r.status == "hypothesis_failure"
    r = check(TheoremId.Kodaira, Instance(hirzebruch(1), L=D(1, 0, 0, 0)))  # nef, not ample
    assert r.status == "hypothesis_failure"


def test_mustata_routes_agree():
    fan = hirzebruch(1)
    for m in (1, 2):
        for e in itertools.product([0, Fr(1, m), 1], repeat=2):
            E = D(e[0], 0, e[1], 0)
            for c in itertools.product([-2, 1], repeat=4):
                inst = Instance(fan, mus_D=D(*c), mus_E=E, mus_m=m)
                r = check(TheoremId.Mustata, inst)
                assert r.holds, r.to_json()
                _, bad = mustata_direct(fan, D(*c), E, m)
                assert not bad


def test_mustata_rejects_bad_coefficients():
    r = check(TheoremId.Mustata, Instance(P2, mus_D=D(0, 0, 0), mus_E=D(2, 0, 0), mus_m=1))
    assert r.status == "hypothesis_failure"


def test_norimatsu_forms_agree():
    fan = parse_fan_name("Bl(P2)")
    L = D(2, 1, 1, 2)
    for B in [frozenset(), frozenset({3}), frozenset({0, 2})]:
        J = frozenset(range(fan.n_rays)) - B
        a = check(TheoremId.Norimatsu, Instance(fan, L=L, B=B))
        b = check(TheoremId.NorimatsuPrimeDivisors, Instance(fan, L=L, B=B, J=J))
        assert a.holds and b.holds


@pytest.mark.parametrize("field", [QQ, F2])
def test_regression(field):
    r = regression_blowup_example(field)
    assert r.holds and r.tables["K+B+L"] == [0, 1, 0]
    assert r.hypotheses == {"L_nef": True, "L_not_ample": True}


def test_regression_ample_variant():
    r = regression_blowup_example(QQ, L=D(2, 0, 0, 1))
    assert r.theorem == "Norimatsu" and r.holds
    assert all(x == 0 for x in r.tables["K+B+L"][1:])


def test_falsification_is_reported(monkeypatch):
    real = V.cohomology_table

    def broken(fan, spec, field=QQ, *args, **kw):
        t = real(fan, spec, field, *args, **kw)
        return CohomologyTable((t.h[0], t.h[1] + 1) + t.h[2:], t.per_degree, field)

    monkeypatch.setattr(V, "cohomology_table", broken)
    r = check(TheoremId.Kodaira, Instance(P2, L=D(1, 0, 0)))
    assert r.status == "fails" and r.holds is False and r.witnesses


def test_corpus_determinism():
    a = generate_corpus(1, 10)
    b = generate_corpus(1, 10)
    assert len(a) == 10 and [i.digest() for i in a] == [i.digest() for i in b]
    assert generate_corpus(1, 0) == []
    assert all(i.fan.rank == 1 for i in generate_corpus(3, 5, max_rank=1))


def test_corpus_bounds():
    for inst in generate_corpus(2, 20):
        assert V.instance_problems(inst) == []
        for x in inst.D:
            assert x.denominator <= 6 and abs(x.numerator) <= 6
        assert max(abs(c) for c in inst.L) <= V.COEFF_BOUND


def test_corpus_file_roundtrip(tmp_path):
    insts = generate_corpus(4, 3)
    path = tmp_path / "c.jsonl"
    write_corpus(path, insts, V.corpus_header(4, 3, 3, 2))
    header, back = read_corpus(path)
    assert header["seed"] == 4 and [i.digest() for i in back] == [i.digest() for i in insts]
    assert back == insts


def test_malformed_instance(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text('{"fan": {"rank": 2}}\n')
    with pytest.raises(InstanceError):
        read_corpus(path)


def test_verify_many_order_independent_of_jobs():
    insts = generate_corpus(5, 4)
    ths = [TheoremId.Kodaira, TheoremId.Bott]
    a = verify_many(insts, ths, [QQ, F2], jobs=1)
    b = verify_many(insts, ths, [QQ, F2], jobs=2)
    assert [r.to_json() for r in a] == [r.to_json() for r in b]
    assert len(a) == 16 and all(r.holds for r in a)


def test_check_all_small_corpus():
    for inst in generate_corpus(6, 5):
        for r in check_all(inst):
            assert r.holds, r.to_json()
            assert r.holds is not False or r.witnesses
