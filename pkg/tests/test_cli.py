import csv
import io
import json
import math
import os
import subprocess
import sys

import pytest
from scipy import special as sp

from indexkernel import cli


def run(*args, env=None):
    full_env = dict(os.environ)
    full_env.pop("INDEXKERNEL_TOL", None)
    if env:
        full_env.update(env)
    return subprocess.run(
        [sys.executable, "-m", "indexkernel", *args], capture_output=True, text=True, env=full_env, timeout=600
    )


def field(stdout, name):
    for line in stdout.splitlines():
        if line.startswith(name):
            return line[len(name):].strip()
    raise AssertionError(f"{name} missing from {stdout!r}")


def test_eval_k0():
    r = run("eval", "K", "tau=0", "x=1")
    assert r.returncode == 0
    assert float(field(r.stdout, "value")) == pytest.approx(sp.k0(1.0), rel=1e-13)
    assert float(field(r.stdout, "error_estimate")) >= 0
    assert field(r.stdout, "route")


def test_eval_d0():
    r = run("eval", "D", "order=0", "z=2")
    assert r.returncode == 0
    assert float(field(r.stdout, "value")) == pytest.approx(math.exp(-1.0), rel=1e-14)


def test_eval_other_functions_json():
    cases = {
        ("W", "mu=0", "tau=0", "x=2"): math.sqrt(2 / math.pi) * sp.k0(1.0),
        ("S_weighted", "mu=0.3", "tau=0", "x=1.5"): None,
        ("erfc", "x=0.5"): sp.erfc(0.5),
        ("E1", "x=1"): sp.exp1(1.0),
        ("gamma_abs2", "a=0.5", "tau=0"): math.pi,
        ("hyp2f1", "a=1", "b=1", "c=2", "z=-1"): math.log(2.0),
    }
    for args, expected in cases.items():
        r = run("eval", *args, "--format", "json")
        assert r.returncode == 0, r.stderr
        out = json.loads(r.stdout)
        assert out["function"] == args[0]
        if expected is not None:
            assert out["value"] == pytest.approx(expected, rel=1e-12), args


def test_eval_malformed_parameter():
    r = run("eval", "W", "mu=0.5+nu-form", "tau=1", "x=1")
    assert r.returncode == 2
    assert "mu" in r.stderr


def test_eval_usage_errors():
    assert run("eval", "Q", "x=1").returncode == 2
    assert run("eval", "K", "x").returncode == 2
    assert run("eval", "K", "tau=1", "x=1", "mu=2").returncode == 2
    r = run("eval", "K", "tau=1", "x=-1")
    assert r.returncode == 2 and "x" in r.stderr


def test_verify_pass():
    r = run("verify", "COR1", "x=1", "alpha=1")
    assert r.returncode == 0
    assert field(r.stdout, "result").startswith("PASS")


def test_verify_domain_violation():
    r = run("verify", "COR6", "mu=0.8")
    assert r.returncode == 2
    assert "mu < 1/2" in r.stderr


def test_verify_reduction_note():
    r = run("verify", "THM1", "mu=0", "x=1", "alpha=1")
    assert r.returncode == 0
    assert "COR1" in field(r.stdout, "note")


def test_verify_failure_exit_code():
    # an absurd tolerance makes an otherwise correct case fail; numbers still print
    r = run("verify", "COR3A", "phi=0.5", "--tol", "1e-17", "--quad-tol", "1e-18")
    assert r.returncode == 1
    assert field(r.stdout, "result").startswith("FAIL")
    assert float(field(r.stdout, "lhs")) > 0


def test_verify_char_file(tmp_path):
    path = tmp_path / "chi.txt"
    path.write_text("5 odd\n0, 1, 0+1i, 0-1i, -1\n")
    r = run("verify", "CHAR_ODD", "x=1", "--char-file", str(path), "--format", "json")
    assert r.returncode == 0
    rows = json.loads(r.stdout)
    assert rows[0]["case"] == "CHAR_ODD" and rows[0]["pass"] is True
    path.write_text("5 odd\n0, 1, 1, -1, -1\n")
    assert run("verify", "CHAR_ODD", "--char-file", str(path)).returncode == 2


def test_env_tolerance_override():
    r = run("verify", "COR3A", "phi=0.5", "--quad-tol", "1e-18", env={"INDEXKERNEL_TOL": "1e-17"})
    assert r.returncode == 1
    assert field(r.stdout, "result").endswith("1e-17")
    assert run("verify", "COR1", env={"INDEXKERNEL_TOL": "abc"}).returncode == 2


def test_run_config_invariants():
    with pytest.raises(cli.UsageError):
        cli.RunConfig(tolerance=1e-10, quad_tolerance=1e-8)
    with pytest.raises(cli.UsageError):
        cli.RunConfig(n_max=0)
    assert run("verify", "COR1", "--tol", "1e-12", "--quad-tol", "1e-10").returncode == 2


def test_json_numbers_round_trip():
    text = cli.to_json([{"a": 0.1, "b": 1 / 3, "c": None, "d": True, "e": "x"}])
    row = json.loads(text)[0]
    assert row["a"] == 0.1 and row["b"] == 1 / 3 and row["c"] is None and row["d"] is True
    assert "0.10000000000000001" in text


def test_suite_csv_columns(tmp_path):
    out = tmp_path / "suite.csv"
    r = run("suite", "--format", "csv", "--parallel=false", "--out", str(out))
    assert r.returncode == 0, r.stdout[-2000:]
    rows = list(csv.reader(io.StringIO(out.read_text())))
    assert tuple(rows[0]) == cli.CSV_COLUMNS
    body = rows[1:]
    assert len({row[0] for row in body}) == 20
    assert all(row[8] == "true" for row in body)
    assert "all" in r.stdout
