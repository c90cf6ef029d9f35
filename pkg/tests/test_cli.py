"""Command-line behavior: exit codes, report formats, round-trips."""

import io
import json
import subprocess
import sys

import numpy as np
import pytest

import plectic6
import plectic6.forms
from plectic6.cli import main

ALPHA1 = "form n=6 k=3\n1 3 5 1\n1 4 6 -1\n2 3 6 -1\n2 4 5 1\n"
DX123 = "form n=6 k=3\n1 2 3 1\n"


def run(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(argv, capsys):
    code = main(argv + ["--format", "json"])
    captured = capsys.readouterr()
    return code, json.loads(captured.out)


@pytest.fixture
def alpha1_file(tmp_path):
    path = tmp_path / "alpha1.form"
    path.write_text(ALPHA1)
    return str(path)


# -- classify -------------------------------------------------------------------


def test_classify_text_report(alpha1_file, capsys):
    code, out, err = run(["classify", "--form", alpha1_file], capsys)
    assert code == 0
    assert "lambda = 24" in out
    assert "tag = type_i" in out
    assert "nondegenerate: yes" in out


def test_classify_json_report(alpha1_file, capsys):
    code, doc = run_json(["classify", "--form", alpha1_file], capsys)
    assert code == 0
    assert doc["schema_version"] == 1
    assert doc["tool_version"] == plectic6.__version__
    assert doc["command"] == "classify"
    assert doc["input"]["form_text"] == ALPHA1
    assert doc["result"]["lambda"] == 24.0
    assert doc["result"]["tag"] == "type_i"
    assert doc["result"]["nondegenerate"] is True


def test_classify_reads_stdin(capsys, monkeypatch):
    monkeypatch.setattr(sys, "stdin", io.StringIO(DX123))
    code, out, err = run(["classify", "--form", "-"], capsys)
    assert code == 0
    assert "tag = degenerate" in out
    assert "nondegenerate: no" in out


def test_classify_other_degree_reports_nondegeneracy_only(tmp_path, capsys):
    path = tmp_path / "sympl.form"
    path.write_text("form n=4 k=2\n1 2 1\n3 4 1\n")
    code, doc = run_json(["classify", "--form", str(path)], capsys)
    assert code == 0
    assert doc["result"]["nondegenerate"] is True
    assert "lambda" not in doc["result"]
    assert "note" in doc["result"]


def test_classify_duplicate_index_is_input_error(tmp_path, capsys):
    path = tmp_path / "dup.form"
    path.write_text("form n=6 k=3\n1 3 5 1\n1 3 5 2\n")
    code, out, err = run(["classify", "--form", str(path)], capsys)
    assert code == 2
    assert "line 3" in err


def test_classify_missing_file_is_input_error(capsys):
    code, out, err = run(["classify", "--form", "/nonexistent/nope.form"], capsys)
    assert code == 2
    assert "error" in err


# -- scan ------------------------------------------------------------------------


def test_scan_text_report(capsys):
    code, out, err = run(
        ["scan", "--field", "omega_f: x2", "--grid", "0,-1:1:1,0,0,0,0"], capsys
    )
    assert code == 0
    assert "tag = type_ii" in out and "tag = type_iii" in out and "tag = type_i" in out
    assert "closedness: closed" in out
    assert "obstruction at origin: yes" in out


def test_scan_json_report_round_trips(capsys):
    code, doc = run_json(
        ["scan", "--field", "omega_f: x2", "--grid", "0,-1:1:1,0,0,0,0"], capsys
    )
    assert code == 0
    result = doc["result"]
    assert [p["tag"] for p in result["points"]] == ["type_ii", "type_iii", "type_i"]
    assert [p["lambda"] for p in result["points"]] == [-24.0, 0.0, 24.0]
    assert result["closedness"] == {"method": "symbolic", "closed": True}
    assert result["obstruction"]["obstruction"] is True
    assert len(result["boundary_cells"]) == 2


def test_scan_text_and_json_numbers_agree(capsys):
    argv = ["scan", "--field", "omega_f: 0.125*x2", "--grid", "0,-1:1:1,0,0,0,0"]
    code, out, err = run(argv, capsys)
    assert code == 0
    code, doc = run_json(argv, capsys)
    assert code == 0
    for point in doc["result"]["points"]:
        token = format(point["lambda"], ".6g")
        assert f"lambda = {token}" in out


def test_scan_nonclosed_field_warns_but_runs(capsys):
    code, doc = run_json(
        ["scan", "--field", "omega_f: x1", "--grid", "0,0,0,0,0,0"], capsys
    )
    assert code == 0
    closure = doc["result"]["closedness"]
    assert closure["closed"] is False
    assert "not multisymplectic" in closure["warning"]
    assert doc["result"]["points"]  # scan still ran
    code, out, err = run(
        ["scan", "--field", "omega_f: x1", "--grid", "0,0,0,0,0,0"], capsys
    )
    assert "WARNING" in out


def test_scan_general_field_uses_fd_check(capsys):
    spec = "general:\n1 2 3 1\n4 5 6 x1"
    code, doc = run_json(["scan", "--field", spec, "--grid", "0,0,0,0,0,0"], capsys)
    assert code == 0
    closure = doc["result"]["closedness"]
    assert closure["method"] == "finite-difference"
    assert closure["closed"] is False
    spec_const = "general:\n1 2 3 1\n4 5 6 2"
    code, doc = run_json(
        ["scan", "--field", spec_const, "--grid", "0,0,0,0,0,0"], capsys
    )
    assert doc["result"]["closedness"]["closed"] is True


def test_scan_periodic_torus(capsys):
    code, doc = run_json(
        [
            "scan",
            "--field", "omega_f: sin(2*pi*x2)",
            "--grid", "0,0:0.75:0.25,0,0,0,0",
            "--periodic",
        ],
        capsys,
    )
    assert code == 0
    tags = [p["tag"] for p in doc["result"]["points"]]
    assert tags == ["type_iii", "type_i", "type_iii", "type_ii"]
    cells = [tuple(map(tuple, pair)) for pair in doc["result"]["boundary_cells"]]
    assert ((0, 0, 0, 0, 0, 0), (0, 3, 0, 0, 0, 0)) in cells


def test_scan_origin_off_grid(capsys):
    code, doc = run_json(
        ["scan", "--field", "omega_f: x2", "--grid", "0,0.5:1.5:0.5,0,0,0,0"], capsys
    )
    assert code == 0
    assert doc["result"]["obstruction"] is None


def test_scan_bad_specs_exit_2(capsys):
    code, out, err = run(
        ["scan", "--field", "omega_f: x2 + * 3", "--grid", "0,0,0,0,0,0"], capsys
    )
    assert code == 2 and "offset 14" in err
    code, out, err = run(
        ["scan", "--field", "omega_f: x2", "--grid", "0,1:0:1,0,0,0,0"], capsys
    )
    assert code == 2
    code, out, err = run(
        ["scan", "--field", "nope: x2", "--grid", "0,0,0,0,0,0"], capsys
    )
    assert code == 2


def test_scan_grid_cap_env_override(capsys, monkeypatch):
    argv = ["scan", "--field", "omega_f: x2", "--grid", "0,-1:1:0.02,0,0,0,0"]
    monkeypatch.setenv("PLECTIC6_GRID_CAP", "100")
    code, out, err = run(argv, capsys)
    assert code == 2
    assert "cap" in err
    monkeypatch.setenv("PLECTIC6_GRID_CAP", "200")
    code, out, err = run(argv, capsys)
    assert code == 0
    monkeypatch.setenv("PLECTIC6_GRID_CAP", "many")
    code, out, err = run(argv, capsys)
    assert code == 2


# -- normalize ----------------------------------------------------------------------


def test_normalize_reference_sample(capsys):
    code, doc = run_json(["normalize", "--sample", "type_ii", "--seed", "7"], capsys)
    assert code == 0
    assert doc["result"]["tag"] == "type_ii"
    assert doc["result"]["residual"] <= 1e-6
    matrix = np.array(doc["result"]["matrix"])
    assert matrix.shape == (6, 6)
    # the matrix in the json report reproduces the residual exactly
    a = plectic6.random_orbit_sample("type_ii", 7)
    target = plectic6.normal_form("type_ii")
    res = np.max(np.abs(plectic6.pullback(matrix, a).coeffs - target.coeffs))
    assert res == pytest.approx(doc["result"]["residual"], abs=1e-15)


def test_normalize_form_file(alpha1_file, capsys):
    code, out, err = run(["normalize", "--form", alpha1_file], capsys)
    assert code == 0
    assert "residual" in out
    assert "tag = type_i" in out


def test_normalize_type_iii_exits_3(capsys):
    code, out, err = run(["normalize", "--sample", "type_iii"], capsys)
    assert code == 3
    assert "type (iii) normalization unsupported" in err


def test_normalize_degenerate_exits_3(tmp_path, capsys):
    path = tmp_path / "dx123.form"
    path.write_text(DX123)
    code, out, err = run(["normalize", "--form", str(path)], capsys)
    assert code == 3
    assert "degenerate" in err


def test_normalize_requires_exactly_one_source(capsys):
    with pytest.raises(SystemExit) as err:
        main(["normalize"])
    assert err.value.code == 2
    with pytest.raises(SystemExit) as err:
        main(["normalize", "--sample", "type_i", "--form", "x.form"])
    assert err.value.code == 2
    capsys.readouterr()


# -- verify-paper ----------------------------------------------------------------------


def test_verify_paper_all_pass(capsys):
    code, out, err = run(["verify-paper"], capsys)
    assert code == 0
    assert out.count("PASS") == 5
    assert "FAIL" not in out


def test_verify_paper_json(capsys):
    code, doc = run_json(["verify-paper"], capsys)
    assert code == 0
    assert doc["result"]["all_passed"] is True
    names = [item["name"] for item in doc["result"]["items"]]
    assert names == [
        "contractions",
        "endomorphism-matrix",
        "trace-invariant",
        "normal-form-classification",
        "scan-sign-rule",
    ]


def test_verify_paper_mutation_fails_contraction_item(capsys, monkeypatch):
    original = plectic6.forms.contract
    monkeypatch.setattr(
        plectic6.forms, "contract", lambda v, a: -original(v, a)
    )
    code, doc = run_json(["verify-paper"], capsys)
    assert code == 1
    by_name = {item["name"]: item["passed"] for item in doc["result"]["items"]}
    assert by_name["contractions"] is False
    # the mutation is confined to the seam: everything else still passes
    del by_name["contractions"]
    assert all(by_name.values())


# -- shared command plumbing -------------------------------------------------------------


def test_output_flag_writes_file(alpha1_file, tmp_path, capsys):
    out_path = tmp_path / "report.json"
    code = main(
        ["classify", "--form", alpha1_file, "--format", "json", "--output", str(out_path)]
    )
    assert code == 0
    assert capsys.readouterr().out == ""
    doc = json.loads(out_path.read_text())
    assert doc["result"]["tag"] == "type_i"


def test_unknown_flag_exits_2(capsys):
    with pytest.raises(SystemExit) as err:
        main(["classify", "--form", "x", "--bogus"])
    assert err.value.code == 2
    capsys.readouterr()


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "plectic6", "classify", "--no-such-flag"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 2
    proc = subprocess.run(
        [sys.executable, "-m", "plectic6", "verify-paper"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.count("PASS") == 5


def test_json_uses_full_precision(capsys):
    code, doc = run_json(["normalize", "--sample", "type_i", "--seed", "3"], capsys)
    assert code == 0
    rebuilt = np.array(doc["result"]["matrix"])
    direct = plectic6.normalize(plectic6.random_orbit_sample("type_i", 3))
    assert np.array_equal(rebuilt, direct)  # 17 significant digits round-trip
