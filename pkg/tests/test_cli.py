import csv
import io
import json
import math
import os
import subprocess
import sys

import pytest


def run(*args, stdin=None, env=None):
    full_env = {k: v for k, v in os.environ.items() if k != "REFLECTODE_TOL"}
    full_env.update(env or {})
    return subprocess.run([sys.executable, "-m", "reflectode", *args], input=stdin, capture_output=True, text=True,
                          env=full_env, timeout=120)


def rows(stdout):
    return list(csv.DictReader(io.StringIO(stdout)))


def error_of(proc):
    lines = proc.stderr.strip().splitlines()
    assert len(lines) == 1
    return json.loads(lines[0])


def test_classify_oscillatory():
    proc = run("classify", "--a", "-5", "--b", "4")
    assert proc.returncode == 0
    data = json.loads(proc.stdout)
    assert data["case"] == "C1" and data["omega"] == 3.0
    assert data["degenerate_t0"]["kind"] == "progression"
    assert data["thresholds"]["eta(a,b)"] == pytest.approx(0.2145004, abs=1e-7)


def test_solve_bump_zero():
    proc = run("solve", "--a", "1", "--b", "1", "--t0", "0", "--c", "0", "--h", "bump(1)", "--eval", "1.5", "0.5")
    assert proc.returncode == 0
    table = rows(proc.stdout)
    assert list(table[0]) == ["t", "u"]
    assert float(table[0]["u"]) == pytest.approx(0.0, abs=1e-10)
    assert float(table[1]["u"]) == pytest.approx(0.8125, abs=1e-10)


def test_solve_grid_and_closed_form_agree():
    common = ["--a", "1", "--b", "-1", "--t0", "0.2", "--c", "1", "--h", "cos(t)", "--grid", "-1", "1", "5"]
    green = rows(run("solve", *common).stdout)
    closed = rows(run("solve", *common, "--method", "closed-form").stdout)
    assert [r["t"] for r in green] == ["-1.0", "-0.5", "0.0", "0.5", "1.0"]
    for g, c in zip(green, closed):
        assert float(g["u"]) == pytest.approx(float(c["u"]), abs=1e-9)


def test_solve_sidecar(tmp_path):
    path = tmp_path / "side.json"
    proc = run("solve", "--a", "1", "--b", "2", "--t0", "1", "--c", repr(math.sinh(1)), "--h", "exp(t)",
               "--eval", "0.5", "--sidecar", str(path))
    assert proc.returncode == 0
    side = json.loads(path.read_text())
    assert side["case"] == "C2"
    assert side["lambda"] == pytest.approx(0.0, abs=1e-10)
    assert side["ubar_t0"] == pytest.approx(math.sinh(1), abs=1e-10)


def test_green_pinned_corners():
    proc = run("green", "--a", "1", "--b", "1", "--t-range", "0", "1", "--s-range", "0", "1", "--n", "2")
    assert proc.returncode == 0
    values = {(float(r["t"]), float(r["s"])): float(r["G"]) for r in rows(proc.stdout)}
    assert values[(1.0, 1.0)] == 1.0
    assert values[(1.0, 0.0)] == 0.0


def test_region_infinite_strip():
    data = json.loads(run("region", "--a", "1", "--b", "-2").stdout)
    assert data["strip"] == {"interval": [0.0, "inf"], "sign": "nonnegative"}


def test_validate_passes_on_smooth_problem():
    proc = run("validate", "--a", "1", "--b", "2", "--h", "exp(t)", "--window", "-1", "1")
    assert proc.returncode == 0
    data = json.loads(proc.stdout)
    assert data["pass"] is True and data["sup_error"] <= 1e-8


def test_nsolve_first_order_matches_solve():
    args = ["--a", "-2", "--b", "1", "--t0", "0.3", "--c", "0.5", "--h", "cos(t) + t", "--eval", "-1", "1"]
    first = rows(run("nsolve", *args).stdout)
    second = rows(run("solve", *args).stdout)
    for x, y in zip(first, second):
        assert float(x["u"]) == pytest.approx(float(y["u"]), abs=1e-9)


def test_nonunique_exit_code():
    proc = run("solve", "--a", "1", "--b", "1", "--t0", "0.5", "--h", "1", "--eval", "1")
    assert proc.returncode == 2
    assert proc.stdout == ""
    err = error_of(proc)
    assert err["error"] == "NonuniqueProblemError"
    assert err["degenerate_t0"] == {"kind": "point", "base": 0.5}


@pytest.mark.parametrize(
    "args",
    [("solve", "--a", "1", "--b", "1", "--h", "cos(", "--eval", "0"),
     ("nsolve", "--a", "1", "--b", "2", "--h", "1", "--order", "2", "--eval", "0"),
     ("classify", "--a", "1"),
     ("frobnicate",),
     ("classify", "--a", "nan", "--b", "1")],
)
def test_other_errors_exit_one(args):
    proc = run(*args)
    assert proc.returncode == 1
    assert "error" in error_of(proc)


def test_expression_error_reports_offset():
    err = error_of(run("solve", "--a", "1", "--b", "1", "--h", "cos(", "--eval", "0"))
    assert "offset 4" in err["message"]


def test_problem_file_from_stdin_with_flag_override():
    problem = json.dumps({"a": 1, "b": 1, "t0": 0, "c": 0, "h": "bump(1)", "window": [0, 2]})
    proc = run("solve", "--file", "-", "--eval", "1.5", stdin=problem)
    assert float(rows(proc.stdout)[0]["u"]) == pytest.approx(0.0, abs=1e-10)
    proc = run("solve", "--file", "-", "--c", "1", "--eval", "1.5", stdin=problem)
    assert float(rows(proc.stdout)[0]["u"]) == pytest.approx(-2.0, abs=1e-10)


def test_window_from_file_sets_default_grid(tmp_path):
    path = tmp_path / "p.json"
    path.write_text(json.dumps({"a": 1, "b": 2, "h": "exp(t)", "window": [-1, 1]}))
    table = rows(run("solve", "--file", str(path)).stdout)
    assert float(table[0]["t"]) == -1.0 and float(table[-1]["t"]) == 1.0


def test_tolerance_environment_variable():
    args = ("solve", "--a", "-5", "--b", "4", "--h", "cos(3*t)^2", "--eval", "1.3")
    assert run(*args, env={"REFLECTODE_TOL": "not-a-number"}).returncode == 1
    coarse = float(rows(run(*args, env={"REFLECTODE_TOL": "1e-3"}).stdout)[0]["u"])
    fine = float(rows(run(*args).stdout)[0]["u"])
    assert coarse == pytest.approx(fine, abs=1e-3)
    assert run("--tol", "1e-12", *args, env={"REFLECTODE_TOL": "bad"}).returncode == 0


def test_output_is_deterministic_and_round_trips():
    args = ("solve", "--a", "-5", "--b", "4", "--t0", "0.1", "--c", "0.2", "--h", "cos(3*t)^2", "--grid", "-2", "2", "7")
    first, second = run(*args), run(*args)
    assert first.stdout == second.stdout
    for row in rows(first.stdout):
        value = float(row["u"])
        assert repr(value) == row["u"]
