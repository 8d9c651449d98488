import csv
import io
import json
import math

import pytest

from qnormal.cli import format_float, run
from qnormal.moments import bessel_i


def invoke(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_density_csv(capsys):
    code, out, _ = invoke(capsys, "density", "--family", "fN", "--q", "0.5",
                          "--from", "-2.8", "--to", "2.8", "--points", "200")
    assert code == 0
    table = rows(out)
    assert out.splitlines()[0] == "x,density"
    assert len(table) == 200
    assert float(table[0]["x"]) == -2.8
    assert all(float(r["density"]) >= 0 for r in table)


def test_density_json(capsys):
    code, out, _ = invoke(capsys, "density", "--family", "fh", "--q", "0", "--from", "-0.5",
                          "--to", "0.5", "--points", "3", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["family"] == "fh"
    assert payload["rows"][1] == {"x": 0.0, "density": pytest.approx(2 / math.pi)}


def test_moments_catalan(capsys):
    code, out, _ = invoke(capsys, "moments", "--family", "fN", "--q", "0", "--max-order", "6")
    assert code == 0
    table = {int(r["n"]): r for r in rows(out)}
    assert list(rows(out)[0]) == ["n", "closed_form", "oracle", "abs_diff"]
    for n, cat in ((2, 1), (4, 2), (6, 5)):
        assert float(table[n]["closed_form"]) == cat
        assert float(table[n]["abs_diff"]) < 1e-9


def test_moments_fQ(capsys):
    code, out, _ = invoke(capsys, "moments", "--family", "fQ", "--a", "0.5", "--b", "0.2",
                          "--q", "0.3", "--max-order", "10")
    assert code == 0
    assert len(rows(out)) == 11
    assert max(float(r["abs_diff"]) for r in rows(out)) < 1e-9


def test_mgf_json(capsys):
    code, out, _ = invoke(capsys, "mgf", "--family", "fh", "--q", "0", "--t", "2")
    assert code == 0
    payload = json.loads(out)
    assert payload["series_value"] == pytest.approx(bessel_i(1, 2.0), rel=1e-15)
    assert payload["oracle_value"] == pytest.approx(payload["series_value"], rel=1e-12)
    assert {"series_value", "oracle_value", "outer_terms", "inner_terms"} <= set(payload)


def test_mgf_fcn(capsys):
    code, out, _ = invoke(capsys, "mgf", "--family", "fCN", "--y", "0.5", "--rho", "0.6",
                          "--q", "0.3", "--t", "1.0")
    payload = json.loads(out)
    assert code == 0
    assert payload["series_value"] == pytest.approx(payload["oracle_value"], rel=1e-8)


def test_tabulate(capsys):
    code, out, _ = invoke(capsys, "tabulate", "--what", "c-coefficients", "--n", "8", "--q", "0.4")
    assert code == 0
    table = rows(out)
    assert [int(r["m"]) for r in table] == [0, 1, 2, 3, 4]
    assert float(table[0]["c"]) == 1.0
    code, out, _ = invoke(capsys, "tabulate", "--what", "s-polynomials", "--n", "3", "--q", "1",
                          "--a", "0.25", "--b", "0.25")
    assert float(rows(out)[3]["s"]) == pytest.approx(0.125)


def test_verify_suite(capsys):
    code, out, err = invoke(capsys, "verify", "--suite", "limits")
    assert code == 0
    table = rows(out)
    assert table and all(r["status"] == "PASS" for r in table)
    assert "0 failed" in err


def test_verify_failure_exit_code(capsys):
    # a tolerance scale of 1e-9 puts the normalization threshold below rounding
    code, out, _ = invoke(capsys, "verify", "--suite", "normalization", "--tol", "1e-9")
    assert code == 1
    assert any(r["status"] == "FAIL" for r in rows(out))


def test_usage_errors(capsys):
    code, _, err = invoke(capsys, "density", "--family", "fN", "--q", "0.5", "--a", "0.1",
                          "--from", "0", "--to", "1")
    assert code == 2 and "--a" in err
    code, _, err = invoke(capsys, "mgf", "--family", "fQ", "--q", "0.5", "--a", "1.5", "--t", "1")
    assert code == 2 and "a must satisfy" in err
    code, _, err = invoke(capsys, "mgf", "--family", "fN", "--q", "1.5", "--t", "1")
    assert code == 2 and "q must lie" in err
    code, _, _ = invoke(capsys, "nonsense")
    assert code == 2
    code, _, err = invoke(capsys, "density", "--family", "fN", "--q", "0.5", "--from", "1",
                          "--to", "0", "--points", "5")
    assert code == 2 and "--from" in err


def test_nonconvergence_exit_code(capsys):
    # at q = 0.99 the density products need more than the default factor cap
    code, _, err = invoke(capsys, "moments", "--family", "fN", "--q", "0.99", "--max-order", "2")
    assert code == 3
    assert "max_factors" in err
    # e^(400 x) overflows on the support, so the oracle cannot proceed
    code, _, err = invoke(capsys, "mgf", "--family", "fN", "--q", "0.3", "--t", "400")
    assert code == 3
    assert "not finite" in err


def test_deterministic(capsys):
    argv = ("moments", "--family", "fCN", "--y", "1", "--rho", "0.3", "--q", "0.7",
            "--max-order", "6", "--format", "json")
    _, first, _ = invoke(capsys, *argv)
    _, second, _ = invoke(capsys, *argv)
    assert first == second


def test_output_dir(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("QNORMAL_OUTPUT_DIR", str(tmp_path))
    code, out, _ = invoke(capsys, "tabulate", "--what", "c-coefficients", "--n", "4", "--q",
                          "0.5", "--output", "c.csv")
    assert code == 0 and out == ""
    assert (tmp_path / "c.csv").read_text().startswith("m,n,c\n")


def test_float_format_round_trips():
    for value in (0.1, 1 / 3, 2.0 ** -40, 1e300, -7.25):
        assert float(format_float(value)) == value
    assert format_float(0.1) == "0.10000000000000001"
