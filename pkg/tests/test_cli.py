import json
from fractions import Fraction

import pytest

from nsbasis import cli


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_usage_error_writes_nothing(tmp_path, capsys):
    target = tmp_path / "doc.json"
    code, out, err = run(["analyze", "--family", "4", "--n", "0", "--output", str(target)], capsys)
    assert code == 1 and not target.exists() and "usage" in err


@pytest.mark.parametrize("argv", [["analyze", "--family", "6", "--n", "3"], ["analyze", "--family", "4",
                                  "--n", "121"], ["table1", "--n-max", "500"], ["bogus"],
                                  ["certify", "--family", "1"]])
def test_more_usage_errors(argv, capsys):
    assert run(argv, capsys)[0] == 1


def test_analyze_sixty(tmp_path, capsys):
    target = tmp_path / "e60.json"
    code, _, _ = run(["analyze", "--family", "4", "--n", "60", "--output", str(target)], capsys)
    doc = cli.parse(target.read_text())
    assert code == 0 and doc["verdict"] == "q-basis" and doc["schema_version"] == "1"
    assert cli.from_rational(doc["determinants"]["detN"]) == -(2 ** 8) * 3 ** 5 * 5 ** 4
    assert doc["determinants"]["detN_factored"] == "-2^8·3^5·5^4"
    assert doc["rho"] == 70 and doc["rank"] == 9
    assert cli.from_rational(doc["N"][3][3]) == Fraction(-75, 4)
    assert all(p["on_curve"] == "exact-pass" for p in doc["points"])


def test_analyze_rational_case(capsys):
    code, out, _ = run(["analyze", "--family", "4", "--n", "2"], capsys)
    assert code == 0 and json.loads(out)["verdict"] == "z-basis"


def test_deterministic_and_round_trip(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for t in (a, b):
        run(["analyze", "--family", "1", "--n", "8", "--output", str(t)], capsys)
    assert a.read_bytes() == b.read_bytes()
    doc = cli.parse(a.read_text())
    assert cli.parse(cli.serialize(doc)) == doc and cli.serialize(doc) == a.read_text()
    assert doc["points"][-1]["exactness"] == "certified-numeric"
    assert "agreement" in doc["points"][-1]["root_choice"]


def test_no_floats_in_rationals(tmp_path, capsys):
    target = tmp_path / "d.json"
    run(["analyze", "--family", "5", "--n", "6", "--output", str(target)], capsys)
    doc = cli.parse(target.read_text())

    def walk(v):
        if isinstance(v, float):
            raise AssertionError("float in document")
        if isinstance(v, dict):
            if set(v) == {"num", "den"}:
                assert all(isinstance(x, str) for x in v.values())
            for x in v.values():
                walk(x)
        elif isinstance(v, list):
            for x in v:
                walk(x)
    walk(doc)


def test_timing_is_opt_in(capsys):
    _, out, _ = run(["table1", "--n-max", "3"], capsys)
    assert "timing" not in json.loads(out)
    _, out, _ = run(["table1", "--n-max", "3", "--timing"], capsys)
    assert "seconds" in json.loads(out)["timing"]


def test_table1_rows(capsys):
    code, out, _ = run(["table1", "--n-max", "60"], capsys)
    doc = json.loads(out)
    rows = {r["n"]: r for r in doc["rows"]}
    assert code == 0 and doc["all_match"] and len(rows) == 60
    assert (rows[60]["r"], rows[60]["rho"], rows[60]["closed_form"]) == (9, 70, "n+10")
    assert (rows[5]["r"], rows[5]["rho"], rows[5]["closed_form"]) == (4, 10, "n+5")
    assert (rows[7]["r"], rows[7]["rho"], rows[7]["closed_form"]) == (0, 16, "n+9")


def test_table_format(capsys):
    code, out, _ = run(["table1", "--n-max", "6", "--format", "table"], capsys)
    assert code == 0 and out.splitlines()[0].split()[:3] == ["n", "r", "rho"]


def test_certify_sixty(capsys):
    code, out, _ = run(["certify", "--family", "4", "--n", "60"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["passed"]
    assert {c["name"] for c in doc["checks"]} >= {"certify_basis", "height_crosscheck", "double_determinant"}


def test_certify_strict_family1(capsys):
    code, out, _ = run(["certify", "--family", "1", "--n", "8", "--strict"], capsys)
    doc = json.loads(out)
    checks = {c["name"]: c for c in doc["checks"]}
    assert code == 0 and checks["spanning_witness"]["detail"] == "trivial"
    assert "z-basis" in checks["certify_basis"]["detail"]


def test_certify_family3(capsys):
    code, out, _ = run(["certify", "--family", "3", "--n", "2", "--format", "table"], capsys)
    assert code == 0 and "verdict q-basis" in out


def test_certify_failing_subcheck(monkeypatch, capsys):
    monkeypatch.setattr(cli, "fibral_orthogonality", lambda *a: False)
    code, out, _ = run(["certify", "--family", "4", "--n", "4"], capsys)
    assert code == 2 and not json.loads(out)["passed"]


def test_analyze_certification_failure(monkeypatch, capsys):
    def boom(*a, **k):
        raise cli.CertificationFailed("forced")
    monkeypatch.setattr(cli, "certificate_from_instance", boom)
    code, out, _ = run(["analyze", "--family", "4", "--n", "4"], capsys)
    assert code == 2 and json.loads(out)["verdict"] == "fail"


def test_factored():
    assert cli.factored(Fraction(-38880000)) == "-2^8·3^5·5^4"
    assert cli.factored(Fraction(1, 6)) == "1/(2·3)"
    assert cli.factored(0) == "0" and cli.factored(1) == "1"


def test_module_entry_point():
    import subprocess
    import sys
    r = subprocess.run([sys.executable, "-m", "nsbasis", "table1", "--n-max", "2"], capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["all_match"]
