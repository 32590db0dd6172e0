import csv
import io
import json

import pytest

from rellich import cli, logterm
from rellich.cli import main


def run(capsys, *args):
    code = main(list(args))
    return code, capsys.readouterr().out


def test_constants_n8_k4(capsys):
    code, out = run(capsys, "constants", "--N", "8", "--k", "4")
    d = json.loads(out)
    assert code == 0 and d["constants"]["R_rad_origin"]["exact"] == "576"


def test_constants_n4_k2_endpoints_and_outside(capsys):
    code, out = run(capsys, "constants", "--N", "4", "--k", "2", "--gamma", "5")
    c = json.loads(out)["constants"]
    assert c["R_rad_origin"]["exact"] == "1" and c["R_rad_boundary"]["exact"] == "9/16"
    assert c["R_rad_gamma"]["value"] == "0 (γ outside [p,N])"


def test_constants_csv_renders_exact_and_decimal(capsys):
    code, out = run(capsys, "constants", "--N", "4", "--k", "2", "--p", "3/2", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["name", "render", "exact", "decimal"]
    assert rows[1][1] == "8/9^(3/2)" and rows[1][3].startswith("0.83805248140627854743803776")


def test_gap_m2(capsys):
    code, out = run(capsys, "gap", "--m", "2")
    d = json.loads(out)
    assert code == 0 and d["A_squared"] == "100" and d["R_rad"] == "576" and d["chains_match"]


def test_coeffs_verified(capsys):
    code, out = run(capsys, "coeffs", "--N", "8", "--m", "3")
    assert code == 0 and json.loads(out)["verified"] is True


def test_coeffs_mismatch_gives_exit_one(capsys, monkeypatch):
    real = logterm.verify_table

    def broken(N, m, table=None):
        chk = real(N, m, table)
        chk.passed = False
        return chk

    monkeypatch.setattr(logterm, "verify_table", broken)
    code, out = run(capsys, "coeffs", "--N", "8", "--m", "2")
    assert code == 1 and json.loads(out)["verified"] is False


def test_sweep_csv(capsys):
    code, out = run(capsys, "sweep", "--family", "phi", "--N", "4", "--k", "2", "--gamma", "2",
                    "--eps", "0.2,0.1,0.05", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == ["epsilon", "quotient", "quad_error", "extrapolated"] and len(rows) == 4
    assert rows[1][0] == "1/5"


def test_minimize_writes_table_and_profile(tmp_path, capsys):
    table, prof = tmp_path / "t.csv", tmp_path / "p.csv"
    code = main(["minimize", "--N", "4", "--k", "2", "--gamma", "3", "--levels", "3", "--dx", "0.05",
                 "--format", "csv", "--out", str(table), "--profile-out", str(prof)])
    assert code == 0
    assert table.read_text(encoding="utf-8").splitlines()[0] == "level,n,t_min,t_max,value,indicator"
    assert prof.read_text(encoding="utf-8").splitlines()[0] == "t,value"


@pytest.mark.parametrize("args", [
    ("constants", "--N", "4", "--k", "2", "--gamma", "5"),
    ("gap", "--m", "3"),
    ("transform-check", "--cases", "2"),
    ("harness", "--cases", "2", "--names", "musina,h1to0"),
    ("minimize", "--N", "4", "--k", "2", "--levels", "3", "--dx", "0.05"),
])
def test_json_reports_round_trip_byte_identically(capsys, args):
    code, out = run(capsys, *args)
    assert code == 0
    assert cli.dump_json(json.loads(out)) == out
    code2, out2 = run(capsys, *args)
    assert out2 == out


@pytest.mark.parametrize("args", [
    ("constants", "--N", "4", "--k", "1"),
    ("constants", "--N", "4", "--k", "4"),
    ("constants", "--N", "4", "--k", "2", "--p", "3"),
    ("gap", "--m", "1"),
    ("coeffs", "--N", "8"),
    ("sweep", "--N", "4", "--k", "2", "--eps", "0,0.1"),
    ("minimize", "--N", "4", "--k", "2", "--levels", "2"),
    ("constants", "--N", "4", "--k", "2", "--a", "1/2"),
])
def test_invalid_parameters_are_usage_errors(capsys, args):
    with pytest.raises(SystemExit) as exc:
        main(list(args))
    assert exc.value.code == 2
    assert "error" in capsys.readouterr().err


def test_help_documents_defaults(capsys):
    with pytest.raises(SystemExit):
        main(["constants", "--help"])
    out = capsys.readouterr().out
    for frag in ("--R", "--a", "--tol", "--seed", "default: 1e-10", "default: 42", "default: 1"):
        assert frag in out
