import csv
import io
import json
import math

import pytest

from cvhide import channels, cli, discrimination
from cvhide.errors import NumericError


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_range():
    assert cli.parse_range("0:0.9:0.1") == [round(0.1 * i, 12) for i in range(10)]
    assert cli.parse_range("0:100:10", integer=True) == list(range(0, 101, 10))
    assert cli.parse_range("0.5,2") == [0.5, 2.0]
    assert cli.parse_range("3") == [3.0]
    for bad in ("1:0:1", "0:1:0", "a:b:c", "1:2", ""):
        with pytest.raises(cli.UsageError):
            cli.parse_range(bad)


def test_fmt_float_fixed_digits():
    assert cli.fmt_float(1.0) == "1.00000000000"
    assert cli.fmt_float(0.1) == "0.100000000000"
    assert cli.fmt_float(2 / 3) == "0.666666666667"


def test_bk_budget_json(capsys):
    code, out, _ = run(capsys, "bk-budget", "--E", "0", "--m", "1", "--eps", "0.1", "--eta", "1",
                       "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert set(doc) == {"schema_version", "command", "params", "rows", "provenance"}
    assert set(doc["provenance"]) == {"cutoffs", "grids"}
    assert doc["rows"][0]["s_db"] == pytest.approx(24.97, abs=0.01)


def test_bk_budget_infeasible_row(capsys):
    code, out, _ = run(capsys, "bk-budget", "--eps", "0.01", "--r", "0.5", "--format", "csv")
    assert code == 0
    row = next(csv.DictReader(io.StringIO(out)))
    assert row["status"] == "infeasible"
    assert float(row["limiting_value"]) == pytest.approx(math.sqrt(math.pi) * math.exp(-0.5))


def test_even_odd_beta1_column(capsys):
    code, out, _ = run(capsys, "even-odd", "--lambda", "0:0.9:0.1", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 10
    assert {r["beta_1"] for r in rows} == {"1.00000000000"}


def test_locc_bound_row(capsys):
    code, out, _ = run(capsys, "locc-bound", "--beta1", "1", "--E", "5.4", "--m", "1",
                       "--format", "json")
    assert code == 0
    assert json.loads(out)["rows"][0]["bound"] == pytest.approx(1e-3, rel=0.01)


def test_fock_hom_rows(capsys):
    code, out, _ = run(capsys, "fock-hom", "--n", "0:2:1", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["n"] for r in rows] == ["0", "1", "2"]
    assert float(rows[0]["distance"]) == pytest.approx(math.sqrt(8 / math.pi) * math.exp(-0.5))


def test_thermal_table_skips_mu_le_nu(capsys):
    code, out, _ = run(capsys, "thermal-table", "--nu", "0,1", "--mu", "0.5,1", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [(r["nu"], r["mu"]) for r in rows] == [("0.00000000000", "0.500000000000"),
                                                  ("0.00000000000", "1.00000000000")]


@pytest.mark.parametrize("argv", [
    ["even-odd", "--lambda", "0.9:0:0.1"],
    ["even-odd", "--lambda", "1.5"],
    ["fock-hom", "--n", "x"],
    ["bk-budget", "--eps", "0.1"],
    ["verify", "--only", "nonsense"],
    ["frobnicate"],
    ["thermal-table", "--nu", "2", "--mu", "1"],
])
def test_usage_errors_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_numeric_error_exit_3(capsys, monkeypatch):
    def boom(n, tol=1e-12):
        raise NumericError("no convergence")

    monkeypatch.setattr(discrimination, "fock_pair_hom_distance", boom)
    code, _, err = run(capsys, "fock-hom", "--n", "3")
    assert code == 3
    assert "no convergence" in err


def test_serial_and_parallel_identical(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["thermal-table", "--nu", "0:1:0.5", "--mu", "1.5,3", "--numeric", "--format", "json"]
    assert cli.main(args + ["--jobs", "1", "--out", str(a)]) == 0
    assert cli.main(args + ["--jobs", "3", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    doc = json.loads(a.read_text())
    assert len(doc["provenance"]["cutoffs"]) == len(doc["rows"]) == 6
    assert all(g["kind"] == "polar" for g in doc["provenance"]["grids"])


def test_jobs_default_from_env(monkeypatch):
    monkeypatch.setenv("CVHIDE_JOBS", "4")
    assert cli.build_parser().parse_args(["fock-hom", "--n", "1"]).jobs == 4


def test_help_documents_columns(capsys):
    code, out, _ = run(capsys, "even-odd", "--help")
    assert code == 0
    assert "wigner_l1_bound" in out
    code, out, _ = run(capsys, "bk-budget", "--help")
    assert "limiting_value" in out


def test_verify_only_thermal(capsys):
    code, out, _ = run(capsys, "verify", "--only", "thermal")
    assert code == 0
    lines = [l for l in out.splitlines() if l.startswith(("PASS", "FAIL"))]
    assert lines and all(l.startswith("PASS") for l in lines)
    assert all(("thermal" in l) or ("sandwich" in l) for l in lines)


def test_verify_catches_lambda_sign_bug(capsys, monkeypatch):
    monkeypatch.setattr(channels, "lambda_of",
                        lambda r, eta: math.exp(2 * r) + (1 - eta * eta) / (eta * eta))
    code, out, _ = run(capsys, "verify", "--only", "bk")
    assert code == 1
    failed = [l.split()[1] for l in out.splitlines() if l.startswith("FAIL")]
    assert failed and all(name.startswith("bk_") for name in failed)
    assert "bk_vacuum_output_thermal" in failed
