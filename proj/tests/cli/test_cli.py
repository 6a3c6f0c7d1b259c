"""End-to-end checks of the radarbias command-line tool.

RADARBIAS_CLI points at the built executable; RADARBIAS_DATA at tests/data.
"""

import csv
import io
import json
import math
import os
import subprocess
from pathlib import Path

import jsonschema
import pytest

CLI = os.environ.get("RADARBIAS_CLI", "radarbias")
DATA = Path(os.environ.get("RADARBIAS_DATA", Path(__file__).parents[1] / "data"))
SCHEMAS = Path(__file__).parents[2] / "schemas"


def run(*args, stdin=None):
    return subprocess.run([CLI, *map(str, args)], input=stdin, capture_output=True, text=True)


def schema(name):
    return json.loads((SCHEMAS / name).read_text())


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def write_scenario(tmp_path, **fields):
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(fields))
    return path


def test_register_example_a():
    res = run("register", DATA / "example_a.json")
    assert res.returncode == 0, res.stderr
    out = json.loads(res.stdout)
    jsonschema.validate(out, schema("register.output.schema.json"))
    expected = {
        ("bias1", "range"): -1.7678e2,
        ("bias1", "azimuth"): -1.0000e-2,
        ("bias1", "elevation"): -1.4142e-3,
        ("bias2", "range"): 3.5355e1,
        ("bias2", "azimuth"): 5.0000e-3,
        ("bias2", "elevation"): -3.5355e-3,
    }
    for (sensor, field), want in expected.items():
        assert out[sensor][field] == pytest.approx(want, rel=1e-3)
    assert out["unit_weight_cost"] == pytest.approx(1.6250e4, rel=1e-3)


def test_register_reads_stdin_and_writes_output(tmp_path):
    target = tmp_path / "out.json"
    text = (DATA / "example_a.json").read_text()
    res = run("--output", target, "register", "-", stdin=text)
    assert res.returncode == 0, res.stderr
    assert res.stdout == ""
    assert json.loads(target.read_text())["bias2"]["range"] == pytest.approx(35.355, rel=1e-3)


def test_register_csv():
    res = run("--format", "csv", "register", DATA / "example_a.json")
    assert res.returncode == 0
    (row,) = rows(res.stdout)
    assert float(row["unit_weight_cost"]) == pytest.approx(16250, rel=1e-3)


def test_register_singular_geometry():
    res = run("register", DATA / "zero_range.json")
    assert res.returncode == 2
    assert "singular geometry: sensor 2" in res.stderr


def test_register_config_errors(tmp_path):
    assert run("register", DATA / "malformed.json").returncode == 3
    assert run("register", tmp_path / "missing.json").returncode == 3
    doc = json.loads((DATA / "example_a.json").read_text())
    doc["sensor3"] = {}
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    res = run("register", bad)
    assert res.returncode == 3
    assert "unknown field: sensor3" in res.stderr


def test_sample_configs_match_schemas():
    jsonschema.validate(json.loads((DATA / "example_a.json").read_text()), schema("register.schema.json"))
    jsonschema.validate(json.loads((DATA / "scenario.json").read_text()), schema("simulate.schema.json"))


@pytest.mark.parametrize("rho,alpha,beta", [(2, 0.2, 0.04385), (10, 0.5, 0.2959)])
def test_gains_table_rows(rho, alpha, beta):
    res = run("gains", "--rho", rho, "--alpha", alpha)
    assert res.returncode == 0, res.stderr
    (row,) = rows(res.stdout)
    assert list(row) == ["rho", "alpha", "beta", "eig1_mod", "eig2_mod", "S11dot", "S21dot", "excluded_root"]
    assert abs(float(row["beta"]) - beta) < 5e-5
    assert float(row["excluded_root"]) == pytest.approx(4 - 2 * alpha)


def test_gains_grid():
    res = run("gains", "--grid", "rho=2,6;alpha=0.2:0.4:0.2")
    assert res.returncode == 0, res.stderr
    table = rows(res.stdout)
    assert [(float(r["rho"]), float(r["alpha"])) for r in table] == [(2, 0.2), (2, 0.4), (6, 0.2), (6, 0.4)]
    assert abs(float(table[3]["beta"]) - 0.1866) < 5e-5


def test_gains_alpha_zero():
    res = run("gains", "--rho", 2, "--alpha", 0)
    assert res.returncode == 2
    assert "condition 1" in res.stderr


def test_transform_identity():
    res = run("transform", "--from", "enu1", "--to", "enu1", "--point", "1.5,-2,3")
    assert res.returncode == 0
    assert json.loads(res.stdout)["point"] == [1.5, -2, 3]


def test_transform_spherical_to_cartesian():
    res = run("transform", "--from", "spherical", "--to", "cartesian", "--point", "1,0,0")
    assert json.loads(res.stdout)["point"] == [1, 0, 0]


def test_transform_round_trip():
    point = [12345.678, -6789.012, 1500.25]
    sites = ["--site1", "0.1,0.6", "--site2", "0.12,0.58", "--digits", 17]
    there = run("--format", "csv", "transform", "--from", "enu1", "--to", "enu2",
                "--point", ",".join(map(str, point)), *sites)
    assert there.returncode == 0, there.stderr
    mid = rows(there.stdout)[0]
    back = run("--format", "csv", "transform", "--from", "enu2", "--to", "enu1",
               "--point", ",".join(mid[k] for k in "xyz"), *sites)
    (row,) = rows(back.stdout)
    assert math.dist([float(row[k]) for k in "xyz"], point) < 1e-9


def test_transform_velocity_uses_rotation_only():
    args = ["transform", "--from", "enu1", "--to", "enu2", "--point", "0,0,0", "--site1", "0.1,0.6",
            "--site2", "0.12,0.58"]
    assert json.loads(run(*args, "--velocity").stdout)["point"] == [0, 0, 0]
    assert json.loads(run(*args).stdout)["point"] != [0, 0, 0]


def test_transform_unknown_frame():
    res = run("transform", "--from", "ecef", "--to", "enu1", "--point", "1,2,3")
    assert res.returncode == 3
    assert "unknown frame" in res.stderr


def test_simulate_report(tmp_path):
    res = run("simulate", DATA / "scenario.json")
    assert res.returncode == 0, res.stderr
    out = json.loads(res.stdout)
    jsonschema.validate(out, schema("simulate.output.schema.json"))
    assert len(out["run_seeds"]) == 2000
    assert out["samples"] == 2000 * 100
    assert "run_seeds" not in json.loads(run("simulate", DATA / "scenario.json", "--omit-seeds").stdout)


def test_simulate_is_deterministic():
    a = run("--format", "csv", "simulate", DATA / "scenario.json")
    b = run("--format", "csv", "simulate", DATA / "scenario.json")
    c = run("--format", "csv", "--seed", 8, "simulate", DATA / "scenario.json")
    assert a.stdout == b.stdout
    assert a.stdout != c.stdout


def test_simulate_noiseless(tmp_path):
    path = write_scenario(tmp_path, N=0, q22=0, Lambda=0, alpha=0.2, beta=0.04385, n_runs=10, n_steps=50,
                          initial_state=[100, 5])
    res = run("--format", "csv", "simulate", path)
    assert res.returncode == 0, res.stderr
    assert all(float(r["empirical"]) == 0.0 for r in rows(res.stdout))


def test_simulate_without_bias(tmp_path):
    path = write_scenario(tmp_path, rho=2, Lambda=0, alpha=0.2, beta=0.04385, n_runs=20000, seed=3)
    res = run("--format", "csv", "simulate", path)
    assert res.returncode == 0, res.stderr
    for r in rows(res.stdout):
        assert float(r["relative_error"]) < 0.05, r


def test_simulate_full_scenario(tmp_path):
    path = write_scenario(tmp_path, rho=2, Lambda=4, alpha=0.2, beta=0.04385, n_runs=20000, seed=4)
    res = run("--format", "csv", "simulate", path)
    table = {r["entry"]: r for r in rows(res.stdout)}
    assert float(table["S11"]["relative_error"]) < 0.05
    assert float(table["S21"]["relative_error"]) < 0.10


def test_simulate_invalid_gains(tmp_path):
    path = write_scenario(tmp_path, rho=2, alpha=0.2, beta=0, n_runs=10)
    res = run("simulate", path)
    assert res.returncode == 2
    assert "condition 2" in res.stderr
