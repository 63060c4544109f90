import io
import json
import os
import subprocess
import sys

import pytest

from weakppc import PointSet, read_points, write_points
from weakppc.cli import main


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main([str(a) for a in argv], stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def values(text):
    return [float(line) for line in text.splitlines() if line and not line.startswith("#")]


@pytest.fixture
def grid4_file(tmp_path):
    path = tmp_path / "grid4.txt"
    write_points(PointSet([0.0, 0.25, 0.5, 0.75]), path)
    return path


# -- gen -------------------------------------------------------------------------

def test_gen_vdc_file(tmp_path):
    path = tmp_path / "pts.txt"
    code, out, _ = run("gen", "--kind", "vdc", "--base", 2, "--n", 8, "--out", path)
    assert code == 0
    assert "N=8" in out
    ps = read_points(path)
    assert ps.points.tolist() == [0.5, 0.25, 0.75, 0.125, 0.625, 0.375, 0.875, 0.0625]
    assert values(path.read_text())[0] == 0.5
    assert len(values(path.read_text())) == 8


def test_gen_kronecker_stdout():
    code, out, err = run("gen", "--kind", "kronecker", "--alpha", 0.5, "--n", 2, "--out", "-")
    assert code == 0
    assert values(out) == [0.5, 0.0]
    assert "N=2" in err


def test_gen_uniform_deterministic(tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    assert run("gen", "--kind", "uniform", "--n", 10, "--seed", 42, "--out", a)[0] == 0
    assert run("gen", "--kind", "uniform", "--n", 10, "--seed", 42, "--out", b)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert len(values(a.read_text())) == 10


def test_gen_meta_header():
    _, out, _ = run("gen", "--kind", "multiset", "--m-distinct", 3, "--n", 6, "--seed", 1)
    header = [line for line in out.splitlines() if line.startswith("#")]
    assert any("multiset" in line for line in header)
    assert "# n: 6" in header


@pytest.mark.parametrize("argv", [
    ["gen", "--kind", "uniform", "--n", "10"],             # no seed
    ["gen", "--kind", "kronecker", "--n", "10"],           # no alpha
    ["gen", "--kind", "vdc"],                              # no n
    ["gen", "--kind", "sobol", "--n", "4"],                # unknown kind
    ["gen", "--n", "-3", "--kind", "vdc"],
    ["frobnicate"],
    [],
])
def test_gen_usage_errors(argv):
    assert run(*argv)[0] == 2


# -- stat ------------------------------------------------------------------------

GOLDEN_CSV = (
    "s,F,two_s,T,integral_F,I2_closed,I2_sweep\n"
    "0.25,0.5,0.5,0.0,0.0,0.0625,0.0625\n"
    "0.5,0.75,1.0,4.0,0.125,0.25,0.25\n"
)


def test_stat_golden(grid4_file):
    code, out, _ = run("stat", "--input", grid4_file, "--beta", 0, "--s", "0.25,0.5")
    assert code == 0
    assert out == GOLDEN_CSV


def test_stat_to_file_is_atomic(grid4_file, tmp_path):
    path = tmp_path / "out.csv"
    code, out, _ = run("stat", "--input", grid4_file, "--beta", 0, "--s", "0.25,0.5", "--out", path)
    assert code == 0 and out == ""
    assert path.read_text() == GOLDEN_CSV
    assert sorted(os.listdir(tmp_path)) == ["grid4.txt", "out.csv"]


def test_stat_overflow(grid4_file):
    code, out, err = run("stat", "--input", grid4_file, "--beta", 0.5, "--s", "0.5,1.5")
    assert code == 1
    assert out == ""
    assert "1.5" in err and "s <= 1.0" in err


def test_stat_generated_grid():
    code, out, _ = run("stat", "--kind", "uniform", "--seed", 1, "--n", 500,
                       "--beta", 0.5, "--smax", 2, "--steps", 4)
    assert code == 0
    rows = out.strip().splitlines()
    assert len(rows) == 5
    assert [float(r.split(",")[0]) for r in rows[1:]] == [0.5, 1.0, 1.5, 2.0]


def test_stat_oracle_columns():
    code, out, _ = run("stat", "--kind", "uniform", "--seed", 4, "--n", 200, "--beta", 0.5,
                       "--s", "0.5,3", "--oracle")
    assert code == 0
    lines = out.strip().splitlines()
    header = lines[0].split(",")
    assert header[-4:] == ["F_oracle", "integral_F_oracle", "I2_oracle", "I2_oracle_bound"]
    for line in lines[1:]:
        row = dict(zip(header, map(float, line.split(","))))
        assert row["F"] == row["F_oracle"]
        assert abs(row["integral_F"] - row["integral_F_oracle"]) <= 1e-12
        assert abs(row["I2_sweep"] - row["I2_oracle"]) <= row["I2_oracle_bound"]
        assert abs(row["I2_closed"] - row["I2_sweep"]) <= 1e-9 * max(1.0, row["I2_closed"])


@pytest.mark.parametrize("argv", [
    ["stat", "--beta", "0.5", "--s", "1"],                                  # no input
    ["stat", "--kind", "vdc", "--n", "10", "--s", "1"],                     # no beta
    ["stat", "--kind", "vdc", "--n", "10", "--beta", "2", "--s", "1"],
    ["stat", "--kind", "vdc", "--n", "10", "--beta", "0.5"],                # no grid
    ["stat", "--kind", "vdc", "--n", "10", "--beta", "0.5", "--s", "x"],
    ["stat", "--kind", "vdc", "--n", "10", "--beta", "0.5", "--s", "-1"],
])
def test_stat_usage_errors(argv):
    assert run(*argv)[0] == 2


def test_stat_missing_file(tmp_path):
    assert run("stat", "--input", tmp_path / "nope.txt", "--beta", 0, "--s", "0.1")[0] == 1


# -- verify ------------------------------------------------------------------------

def reports(out):
    data = json.loads(out)
    assert isinstance(data, list)
    for r in data:
        assert list(r) == ["check", "params", "pass", "tolerance", "worst_violation", "witness"]
    return data


def test_verify_identities(tmp_path):
    pts = tmp_path / "pts.txt"
    run("gen", "--kind", "uniform", "--seed", 3, "--n", 1500, "--out", pts)
    code, out, _ = run("verify", "identities", "--input", pts, "--beta", 0.5, "--s", "1.0")
    assert code == 0
    (rep,) = reports(out)
    assert rep["pass"] and rep["worst_violation"] < 1e-9 and rep["tolerance"] == 1e-9


def test_verify_identities_oracle():
    code, out, _ = run("verify", "identities", "--kind", "vdc", "--n", 300, "--beta", 0.8,
                       "--s", "0.5,2", "--oracle")
    assert code == 0
    checks = [r["check"] for r in reports(out)]
    assert checks == ["identity_i2", "identity_integral", "oracle_pairs"] * 2


def test_verify_bounds_uniform():
    code, out, err = run("verify", "bounds", "--kind", "uniform", "--seed", 7, "--beta", 0.5,
                         "--ladder", "1e3,1e4,1e5", "--smax", 5)
    assert code == 0, err
    (rep,) = reports(out)
    assert rep["pass"] and rep["tolerance"] == 0.1
    assert 1.9 <= rep["witness"]["slope0"] <= 2.1


def test_verify_bounds_failure_exit_code():
    # golden Kronecker at beta = 1 stays far below 2s
    code, out, err = run("verify", "bounds", "--kind", "kronecker", "--kron-alpha", 0.6180339887498949,
                         "--beta", 1, "--ladder", "1e3,1e4", "--smax", 0.3, "--steps", 20)
    assert code == 1
    assert not reports(out)[0]["pass"]
    assert err.startswith("FAIL bounds")


def test_verify_remark():
    code, out, _ = run("verify", "remark", "--c", 2, "--delta", 0.1)
    assert code == 0
    (rep,) = reports(out)
    assert rep["pass"] and abs(rep["witness"]["integral"] - 2.2) <= 1e-12
    code, out, err = run("verify", "remark", "--c", 1, "--delta", 0.05)
    assert code == 1 and "FAIL remark" in err
    assert "lower" in reports(out)[0]["witness"]["failed"]


def test_verify_covering(grid4_file):
    code, out, _ = run("verify", "covering", "--input", grid4_file, "--beta", 0.5,
                       "--s", "0.25,0.5", "--K", "2,5", "--alpha", 0)
    assert code == 0
    checks = [r["check"] for r in reports(out)]
    assert checks == ["covering", "covering", "cauchy_schwarz", "alpha_beta"] * 2


def test_verify_covering_alpha_overflow(grid4_file):
    # the alpha window is the binding one
    code, _, err = run("verify", "covering", "--input", grid4_file, "--beta", 0.5,
                       "--s", "0.9", "--alpha", 0)
    assert code == 1 and "scale overflow" in err


def test_verify_monotone():
    code, out, _ = run("verify", "monotone", "--kind", "uniform", "--seed", 2, "--alpha", 0.25,
                       "--beta", 0.5, "--ladder", "1e4,1e5", "--smax", 2, "--steps", 8,
                       "--tol", 0.1)
    (rep,) = reports(out)
    assert code == (0 if rep["pass"] else 1)
    assert rep["check"] == "monotone" and rep["tolerance"] == 0.1


@pytest.mark.parametrize("argv", [
    ["verify"],
    ["verify", "remark", "--c", "2"],
    ["verify", "remark", "--c", "-1", "--delta", "0.1"],
    ["verify", "bounds", "--beta", "0.5", "--ladder", "10,100", "--s", "0.1"],     # no generator
    ["verify", "bounds", "--kind", "vdc", "--beta", "0.5", "--ladder", "100,10", "--s", "0.1"],
    ["verify", "monotone", "--kind", "vdc", "--beta", "0.5", "--ladder", "10,100", "--s", "0.1"],
    ["verify", "monotone", "--kind", "vdc", "--alpha", "0.6", "--beta", "0.5", "--ladder", "10,100",
     "--s", "0.1"],
    ["verify", "covering", "--kind", "vdc", "--n", "8", "--beta", "0.5", "--s", "0.1", "--K", "1"],
    ["verify", "identities", "--kind", "vdc", "--beta", "0.5", "--s", "0.1"],             # no n
])
def test_verify_usage_errors(argv):
    assert run(*argv)[0] == 2


# -- config and determinism ----------------------------------------------------------

def test_config_file(tmp_path, grid4_file):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"input": str(grid4_file), "beta": 0, "s": "0.25,0.5"}))
    code, out, _ = run("--config", cfg, "stat")
    assert code == 0 and out == GOLDEN_CSV
    # explicit flags win over the file
    code, out, _ = run("--config", cfg, "stat", "--s", "0.25")
    assert out == GOLDEN_CSV.rsplit("\n", 2)[0] + "\n"


def test_bad_config_file(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text("[1, 2]")
    assert run("--config", cfg, "verify", "remark", "--c", 2, "--delta", 0.1)[0] == 2
    assert run("--config", tmp_path / "missing.json", "verify", "remark")[0] == 2


def test_backend_flag(grid4_file):
    code, out, _ = run("--backend", "python", "stat", "--input", grid4_file, "--beta", 0,
                       "--s", "0.25,0.5")
    assert code == 0 and out == GOLDEN_CSV


def test_reruns_are_byte_identical():
    commands = [
        ["gen", "--kind", "uniform", "--seed", 5, "--n", 50],
        ["stat", "--kind", "vdc", "--n", 1000, "--beta", 0.5, "--smax", 3, "--steps", 6],
        ["verify", "identities", "--kind", "uniform", "--seed", 5, "--n", 500, "--beta", 0.3,
         "--s", "0.5,1", "--oracle"],
        ["verify", "remark", "--c", 2, "--delta", 0.1],
    ]
    for argv in commands:
        assert run(*argv)[1] == run(*argv)[1]


def test_module_entry_point(grid4_file):
    proc = subprocess.run([sys.executable, "-m", "weakppc", "stat", "--input", str(grid4_file),
                           "--beta", "0", "--s", "0.25,0.5"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout == GOLDEN_CSV
    proc = subprocess.run([sys.executable, "-m", "weakppc", "verify", "remark", "--c", "1",
                           "--delta", "0.05"], capture_output=True, text=True)
    assert proc.returncode == 1
    proc = subprocess.run([sys.executable, "-m", "weakppc", "gen"], capture_output=True, text=True)
    assert proc.returncode == 2
