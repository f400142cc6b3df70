"""Command-line contract: exit codes, CSV/JSON shape, determinism."""

import json
import subprocess
import sys

import pytest

from axbriesz import cli


def run(*args):
    return subprocess.run([sys.executable, "-m", "axbriesz.cli", *args],
                          capture_output=True, text=True)


def test_profiles_pass_and_header():
    r = run("profiles", "--n", "2", "--k", "0")
    assert r.returncode == 0
    lines = r.stdout.splitlines()
    assert lines[0].startswith("n,k,X,value,leading_infinity,leading_local,ratio_infinity,ratio_local")
    assert "\r" not in r.stdout
    summary = json.loads(r.stderr)
    assert summary["command"] == "profiles" and summary["pass"] is True
    assert set(summary) == {"command", "config", "pass", "metrics"}


def test_profiles_bad_dimension():
    r = run("profiles", "--n", "9")
    assert r.returncode == 2
    assert "n out of supported range 1..6" in r.stderr


def test_profiles_unreachable_tolerance():
    r = run("profiles", "--n", "1", "--k", "0", "--tol", "1e-9")
    assert r.returncode == 1
    header, *rows = r.stdout.splitlines()
    ok = header.split(",").index("ok")
    assert any(row.split(",")[ok] == "false" for row in rows)


def test_usage_errors():
    assert cli.main([]) == 2
    assert cli.main(["nonsense"]) == 2
    assert cli.main(["schrodinger", "--p", "1.0"]) == 2
    assert cli.main(["schrodinger", "--trials", "10"]) == 2


def test_out_prefix(tmp_path, capsys):
    code = cli.main(["profiles", "--n", "1", "--k", "1", "--out", str(tmp_path / "prof")])
    assert code == 0
    printed = json.loads(capsys.readouterr().out)
    on_disk = json.loads((tmp_path / "prof.json").read_text())
    assert printed == on_disk
    assert (tmp_path / "prof.csv").read_text().startswith("n,k,X,")


def test_weak11_deterministic():
    a = run("weak11", "--n", "1", "--j", "1", "--seed", "42", "--trials", "3")
    b = run("weak11", "--n", "1", "--j", "1", "--seed", "42", "--trials", "3")
    assert a.returncode in (0, 1)
    assert a.stdout == b.stdout and a.stderr == b.stderr
    assert "C_emp" in json.loads(a.stderr)["metrics"]


def test_opnorms_xi_sweep_rows():
    r = run("opnorms", "--variant", "Kj", "--xi-sweep")
    header, *rows = r.stdout.splitlines()
    cols = header.split(",")
    assert cols == ["variant", "n", "j", "alpha", "xi", "weight", "a2", "norm", "grid_nu", "grid_extent"]
    xis = {float(row.split(",")[cols.index("xi")]) for row in rows}
    assert {2.0 ** k for k in range(-3, 4)} <= xis


def test_hardy_plumbing():
    r = run("hardy", "--n", "1", "--j", "1", "--Umax", "64")
    assert r.returncode == 0
    header, *rows = r.stdout.splitlines()
    assert header == "n,j,U,mass,log_U"
    assert [float(row.split(",")[2]) for row in rows] == [4.0, 8.0, 16.0, 32.0, 64.0]
    metrics = json.loads(r.stderr)["metrics"]
    assert metrics["slope"] > 0
