import json
import subprocess
import sys

import numpy as np
import pytest

from mmlrsketch.cli import main
from mmlrsketch.matrixio import read_matrix, write_matrix


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def without_timing(text):
    report = json.loads(text)
    report.pop("timing", None)
    return json.dumps(report, sort_keys=True)


def test_verify_small_run_holds(capsys):
    code, out, _ = run(["verify", "--m", "60", "--n", "4", "--d", "2", "--c", "20",
                        "--trials", "4", "--seed", "3"], capsys)
    assert code == 0
    report = json.loads(out)
    assert report["command"] == "verify"
    assert len(report["trials"]) == 4
    assert report["summary"]["all_hold"] is True
    assert report["config"]["p_list"] == ["1", "2", "inf"]


@pytest.mark.parametrize("kind", ["without", "with", "gaussian"])
def test_verify_is_deterministic(tmp_path, capsys, kind):
    argv = ["verify", "--m", "40", "--n", "3", "--d", "1", "--c", "12", "--trials", "3",
            "--seed", "11", "--sketch", kind, "--p", "1,1.5,inf"]
    assert main(argv + ["--out", str(tmp_path / "a.json")]) == 0
    assert main(argv + ["--out", str(tmp_path / "b.json")]) == 0
    a = (tmp_path / "a.json").read_text()
    b = (tmp_path / "b.json").read_text()
    assert without_timing(a) == without_timing(b)
    assert a.split('"timing"')[0] == b.split('"timing"')[0]


def test_verify_injected_tolerance_fails(capsys):
    code, out, _ = run(["verify", "--m", "60", "--n", "4", "--d", "1", "--c", "20",
                        "--trials", "2", "--identity-tol", "1e-30"], capsys)
    assert code == 1
    assert json.loads(out)["summary"]["all_hold"] is False


@pytest.mark.parametrize("argv", [
    ["verify", "--m", "10", "--n", "4", "--c", "3"],
    ["verify", "--m", "10", "--n", "4", "--c", "11"],
    ["verify", "--trials", "0"],
    ["verify", "--sketch", "file"],
])
def test_verify_config_errors_exit_2(capsys, argv):
    code, _, err = run(argv, capsys)
    assert code == 2
    assert "error" in err


def test_verify_csv_summary(capsys):
    code, out, _ = run(["verify", "--m", "30", "--n", "2", "--c", "8", "--format", "csv"], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("proposition_id,evaluated")
    assert any(line.startswith("P4.1,") for line in lines)


def test_verify_with_files(tmp_path, capsys, rng):
    a = rng.standard_normal((20, 3))
    write_matrix(tmp_path / "a.mtx", a)
    write_matrix(tmp_path / "b.csv", rng.standard_normal((20, 2)))
    write_matrix(tmp_path / "s.mtx", np.eye(20)[:8])
    code, out, _ = run(["verify", "--a", str(tmp_path / "a.mtx"), "--b", str(tmp_path / "b.csv"),
                        "--sketch", "file", "--s", str(tmp_path / "s.mtx"), "--c", "8"], capsys)
    assert code == 0
    inst = json.loads(out)["trials"][0]["instance"]
    assert (inst["m"], inst["n"], inst["d"], inst["c"]) == (20, 3, 2, 8)


def test_solve_identity_design(tmp_path, capsys, rng):
    b = rng.standard_normal((4, 2))
    write_matrix(tmp_path / "a.mtx", np.eye(4))
    write_matrix(tmp_path / "b.mtx", b)
    out_dir = tmp_path / "out"
    code, out, _ = run(["solve", str(tmp_path / "a.mtx"), str(tmp_path / "b.mtx"),
                        "--sketch", "gaussian", "--c", "4", "--out", str(out_dir)], capsys)
    assert code == 0
    np.testing.assert_allclose(read_matrix(out_dir / "x_hat.mtx"), b, atol=1e-15)
    assert (out_dir / "x_tilde.mtx").exists()
    report = json.loads((out_dir / "report.json").read_text())
    assert report["norms"]["2"]["residual_exact"] <= 1e-15
    assert json.loads(out) == report


def test_solve_consistent_system(tmp_path, capsys, rng):
    a = rng.standard_normal((30, 4))
    write_matrix(tmp_path / "a.mtx", a)
    write_matrix(tmp_path / "b.mtx", a @ rng.standard_normal((4, 2)))
    code, out, _ = run(["solve", str(tmp_path / "a.mtx"), str(tmp_path / "b.mtx"),
                        "--sketch", "without", "--c", "10", "--format", "csv"], capsys)
    assert code == 0
    rows = [line.split(",") for line in out.strip().splitlines()[1:]]
    for row in rows:
        assert all(float(x) <= 1e-10 for x in row[1:])


def test_solve_malformed_file(tmp_path, capsys):
    (tmp_path / "a.mtx").write_text("%%MatrixMarket matrix array real general\n2 1\n1\nx\n")
    write_matrix(tmp_path / "b.mtx", np.ones((2, 1)))
    code, _, err = run(["solve", str(tmp_path / "a.mtx"), str(tmp_path / "b.mtx")], capsys)
    assert code == 2
    assert "line 4" in err


def test_solve_missing_file(tmp_path, capsys):
    code, _, err = run(["solve", str(tmp_path / "nope.mtx"), str(tmp_path / "b.mtx")], capsys)
    assert code == 2


def test_solve_rank_deficient(tmp_path, capsys):
    write_matrix(tmp_path / "a.mtx", np.ones((4, 2)))
    write_matrix(tmp_path / "b.mtx", np.ones((4, 1)))
    code, _, err = run(["solve", str(tmp_path / "a.mtx"), str(tmp_path / "b.mtx")], capsys)
    assert code == 2
    assert "rank" in err


def test_worked_example_command(tmp_path, capsys):
    code, _, err = run(["paper-example", "--out", str(tmp_path / "ex.json")], capsys)
    report = json.loads((tmp_path / "ex.json").read_text())
    failed = set(report["summary"]["failed_checks"])
    # stated subspace claims that do not survive the range-based decomposition
    assert failed == {"subspace dims (S1, S0, S10, SQ)", "dim Z != dim SQ",
                      "Z ⊆ SQ (largest angle from Z to SQ)"}
    assert code == 1
    assert "[FAIL] subspace dims" in err
    assert report["timing"]["seconds"] < 1.0


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "mmlrsketch", "--version"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.startswith("mmlrsketch ")
