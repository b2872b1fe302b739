"""Command-line interface: JSON reports, CSV side outputs, configs and exit codes."""

import json

import numpy as np
import pytest
from click.testing import CliRunner

from cr3bp import cli
from cr3bp import index as ix


@pytest.fixture
def run():
    runner = CliRunner()

    def invoke(*args, **kw):
        return runner.invoke(cli.main, [str(a) for a in args], **kw)

    return invoke


def _report(result):
    assert result.exit_code == 0, result.output
    data = json.loads(result.output)
    assert list(data)[0] == "schema_version" and data["schema_version"] == cli.SCHEMA_VERSION
    return data


# --- serialization -----------------------------------------------------------------

def test_dumps_uses_round_trip_precision():
    assert cli.dumps(0.1) == "0.10000000000000001"
    assert float(cli.dumps(np.pi)) == np.pi
    assert cli.dumps(float("nan")) == "null"
    assert cli.dumps(np.bool_(True)) == "true"
    assert json.loads(cli.dumps({"a": [1, 2.5], "b": {"c": None}, "z": 1 + 2j})) == {
        "a": [1, 2.5], "b": {"c": None}, "z": {"re": 1.0, "im": 2.0}}


# --- subcommands --------------------------------------------------------------------

def test_lagrange(run, tmp_path):
    f = tmp_path / "l.csv"
    d = _report(run("lagrange", "--mu", 0.5, "--csv", f))
    assert d["command"] == "lagrange" and d["r1"] == 0.5
    pts = {p["index"]: p for p in d["points"]}
    assert pts[1]["L"] == -2.0
    assert pts[4]["q2"] == pytest.approx(np.sqrt(3) / 2, abs=1e-15)
    rows = np.loadtxt(f, delimiter=",", skiprows=1, ndmin=2)
    assert len(rows) == 5


def test_lyapunov_index(run):
    d = _report(run("lyapunov", "--eps", 1e-3))
    assert d["index"] == 2
    assert d["closure_residual"] < 1e-8


def test_index_of_path_file(run, tmp_path):
    f = tmp_path / "rot.csv"
    ix.write_path_csv(ix.rotation_path(2), f, n=1200)
    d = _report(run("index", "--path-file", f))
    assert d["robbin_salamon"] == 4


def test_index_requires_exactly_one_source(run, tmp_path):
    assert run("index").exit_code == 2
    f = tmp_path / "rot.csv"
    ix.write_path_csv(ix.rotation_path(1), f, n=400)
    assert run("index", "--path-file", f, "--orbit", "lyapunov").exit_code == 2


def test_index_bad_path_file_is_a_computation_failure(run, tmp_path):
    f = tmp_path / "bad.csv"
    f.write_text("t,psi_00,psi_01,psi_10,psi_11\n0,1,0,0,1\n1,2,0,0,2\n")
    r = run("index", "--path-file", f)
    assert r.exit_code == 1
    assert "ValueError" in r.output


def test_convexity_small_scan(run, tmp_path):
    f = tmp_path / "scan.csv"
    d = _report(run("--threads", 2, "convexity", "--h", -2.5, "--res", 64, "--theta-res", 16, "--csv", f))
    assert d["positive"] is True
    rows = np.loadtxt(f, delimiter=",", skiprows=1)
    assert rows.shape[1] == 4 and len(rows) * 16 == d["n_points"]
    assert f.read_text().startswith("x1,x2,theta_min,det_min")


def test_convexity_rejects_connected_levels(run):
    assert run("convexity", "--h", -1.5).exit_code == 2


def test_appendixb(run):
    d = _report(run("appendixb", "--n", 100))
    assert d["ok"] is True and d["identities_ok"] is True


def test_liouville(run):
    d = _report(run("liouville", "--res", 80))
    assert d["min_margin"] > 0
    assert d["constants"]["check_c"] > d["constants"]["hat_c"]


def test_shield(run, tmp_path):
    f = tmp_path / "shield.csv"
    d = _report(run("shield", "--c0", 0.5, "--csv", f))
    assert d["energy"] == pytest.approx(d["energy_expected"], rel=1e-6)
    assert f.read_text().splitlines()[0] == "s,r,area"


def test_shoot_rejects_energy_above_l1(run):
    assert run("shoot", "--energy", -1.0).exit_code == 2


# --- validation and configuration -----------------------------------------------------

@pytest.mark.parametrize("args", [
    ("lagrange", "--mu", 1.5),
    ("lyapunov", "--eps", -1e-3),
    ("lyapunov", "--tol", 0.5),
    ("appendixb", "--n", 4),
    ("--threads", 0, "lagrange"),
    ("shield", "--b", 1.5),
])
def test_invalid_input_exits_with_2(run, args):
    assert run(*args).exit_code == 2


def test_config_supplies_defaults(run, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"version": 1, "lagrange": {"mu": 0.3}}))
    assert _report(run("--config", cfg, "lagrange"))["mu"] == 0.3
    # explicit flags win over the file
    assert _report(run("--config", cfg, "lagrange", "--mu", 0.2))["mu"] == 0.2


@pytest.mark.parametrize("content", [{"lagrange": {"mu": 0.3}}, {"version": 99}])
def test_config_needs_supported_version(run, tmp_path, content):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(content))
    assert run("--config", cfg, "lagrange").exit_code == 2
