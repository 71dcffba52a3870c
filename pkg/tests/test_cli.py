import json

import pytest

from toricvanish.cli import main
from toricvanish.fans import affine_space, projective_space


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def p2_file(tmp_path):
    path = tmp_path / "p2.json"
    path.write_text(json.dumps(projective_space(2).to_json()))
    return str(path)


def test_cohomology_canonical(capsys, p2_file):
    code, out, _ = run(capsys, "cohomology", "compute", "--fan", p2_file,
                       "--sheaf", '{"reflexive_div": {"coeffs": ["-1", "-1", "-1"]}}')
    assert code == 0 and json.loads(out)["h"] == [0, 0, 1]


def test_cohomology_log_forms_csv(capsys, p2_file):
    code, out, _ = run(capsys, "cohomology", "compute", "--fan", p2_file, "--out", "csv",
                       "--sheaf", '{"log_forms": {"a": 1, "B": [], "G": {"coeffs": ["0", "0", "0"]}}}')
    assert code == 0 and out.splitlines() == ["field,h0,h1,h2", "Q,0,1,0"]


def test_cohomology_incomplete(capsys, tmp_path):
    path = tmp_path / "a2.json"
    path.write_text(json.dumps(affine_space(2).to_json()))
    code, _, err = run(capsys, "cohomology", "compute", "--fan", str(path),
                       "--sheaf", '{"reflexive_div": {"coeffs": ["0", "0"]}}')
    assert code == 2 and "fan is not complete" in err


def test_cohomology_bad_json(capsys, p2_file):
    code, _, err = run(capsys, "cohomology", "compute", "--fan", p2_file, "--sheaf", "{oops")
    assert code == 2 and err


def test_cohomology_output_file(capsys, p2_file, tmp_path):
    target = tmp_path / "t.json"
    code, out, _ = run(capsys, "cohomology", "compute", "--fan", "P2", "--field", "F2",
                       "--sheaf", '{"reflexive_div": {"coeffs": ["1", "0", "0"]}}', "-o", str(target))
    assert code == 0 and out == ""
    data = json.loads(target.read_text())
    assert data["h"] == [3, 0, 0] and data["field"] == "F2"


def test_verify_kodaira_corpus(capsys):
    code, out, _ = run(capsys, "verify", "--theorem", "Kodaira", "--corpus", "1,25")
    data = json.loads(out)
    assert code == 0 and data["summary"]["holds"] == 25 and data["summary"]["total"] == 25


def test_verify_regression(capsys):
    code, out, _ = run(capsys, "verify", "--theorem", "regression")
    data = json.loads(out)
    assert code == 0 and data["reports"][0]["tables"]["K+B+L"][1] == 1


def test_verify_malformed_instance(capsys, tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text("{not json\n")
    code, _, err = run(capsys, "verify", "--instance", str(path))
    assert code == 2 and err


def test_verify_needs_input(capsys):
    assert run(capsys, "verify", "--theorem", "Bott")[0] == 2
    assert run(capsys, "verify", "--theorem", "Nope", "--corpus", "1,1")[0] == 2
    assert run(capsys, "verify", "--corpus", "x")[0] == 2


def test_verify_falsified_exit(capsys, monkeypatch):
    import toricvanish.verify as V
    from toricvanish.cohomology import CohomologyTable
    real = V.cohomology_table

    def broken(fan, spec, field, *a, **kw):
        t = real(fan, spec, field, *a, **kw)
        return CohomologyTable(tuple(x + 1 for x in t.h), t.per_degree, field)

    monkeypatch.setattr(V, "cohomology_table", broken)
    code, out, _ = run(capsys, "verify", "--theorem", "Kodaira", "--corpus", "1,2")
    assert code == 1 and json.loads(out)["summary"]["fails"] == 2


def test_anomaly_exit(capsys, monkeypatch):
    import toricvanish.cli as cli
    from toricvanish.cohomology import EnumerationAnomaly

    def boom(*a, **kw):
        raise EnumerationAnomaly("nonzero cohomology outside the box")

    monkeypatch.setattr(cli, "cohomology_table", boom)
    code, _, err = run(capsys, "cohomology", "compute", "--fan", "P2",
                       "--sheaf", '{"reflexive_div": {"coeffs": ["0", "0", "0"]}}')
    assert code == 3 and "outside" in err


def test_instance_file_and_jobs(capsys, tmp_path, monkeypatch):
    path = tmp_path / "c.jsonl"
    assert run(capsys, "corpus", "generate", "--seed", "2", "--size", "3", "-o", str(path))[0] == 0
    code, out1, _ = run(capsys, "verify", "--instance", str(path), "--field", "Q,F3")
    monkeypatch.setenv("TORICVANISH_JOBS", "2")
    code2, out2, _ = run(capsys, "verify", "--instance", str(path), "--field", "Q,F3")
    assert code == code2 == 0 and out1 == out2
    assert json.loads(out1)["summary"]["total"] == 3 * 2 * 11


def test_byte_identical_and_timestamps(capsys):
    a = run(capsys, "corpus", "generate", "--seed", "3", "--size", "2")[1]
    b = run(capsys, "corpus", "generate", "--seed", "3", "--size", "2")[1]
    assert a == b and "generated_at" not in a
    c = run(capsys, "corpus", "generate", "--seed", "3", "--size", "2", "--timestamps")[1]
    assert "generated_at" in c


def test_fan_commands(capsys):
    code, out, _ = run(capsys, "fan", "describe", "P(1,1,2)")
    data = json.loads(out)
    assert code == 0 and data["is_complete"] and not data["is_smooth"]
    code, out, _ = run(capsys, "fan", "check", '{"rank": 2, "rays": [[2, 4], [0, 1]], "max_cones": [[0, 1]]}')
    assert code == 2 and json.loads(out)["violations"][0]["kind"] == "NonPrimitiveRay"
    assert run(capsys, "fan", "check", "P2")[0] == 0


def test_usage_error(capsys):
    assert run(capsys, "frobnicate")[0] == 2


def test_library_does_not_need_cli():
    import subprocess
    import sys
    code = ("import sys, toricvanish.verify, toricvanish.multmap; "
            "assert 'toricvanish.cli' not in sys.modules")
    assert subprocess.run([sys.executable, "-c", code]).returncode == 0


def test_console_entry_point():
    import subprocess
    import sys
    out = subprocess.run([sys.executable, "-m", "toricvanish.cli", "fan", "check", "P1"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and json.loads(out.stdout)["ok"]
