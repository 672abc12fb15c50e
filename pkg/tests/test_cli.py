"""Command line contract: outputs, determinism and exit codes."""

import json
import math
import subprocess
import sys

import numpy as np
import pytest

from gptham.cli import EXIT_CHECK, EXIT_DYNAMICS, EXIT_OK, EXIT_USAGE, main

TWO_PI = 2.0 * math.pi

BALL_SCENARIO = {
    "theory": "ball",
    "hamiltonian": {"vector": [0.0, 0.0, 1.0]},
    "time": {"tMax": TWO_PI, "steps": 32},
    "initialState": [1.0, 0.0, 0.0],
    "seed": 7,
}

CUBE_SCENARIO = {
    "theory": "cube",
    "hamiltonian": {"vector": [0.0, 0.0, 1.0]},
    "time": {"tMax": TWO_PI, "dt": math.pi / 2.0},
    "initialState": [1.0, 1.0, 1.0],
}


def run_cli(*argv):
    # argparse raises SystemExit on usage errors; the console script would
    # propagate the same code
    try:
        return main(list(argv))
    except SystemExit as exc:
        return exc.code


@pytest.fixture
def scenario_file(tmp_path):
    def write(payload, name="scenario.json"):
        path = tmp_path / name
        path.write_text(json.dumps(payload))
        return str(path)

    return write


# ---------------------------------------------------------------------------
# list-theories


def test_list_theories_text(capsys):
    assert run_cli("list-theories") == EXIT_OK
    out = capsys.readouterr().out
    for name in ("ball", "cylinder", "cone", "octahedron", "cube", "spekkens"):
        assert name in out


def test_list_theories_json(capsys):
    assert run_cli("list-theories", "--format", "json") == EXIT_OK
    body = json.loads(capsys.readouterr().out)
    assert len(body["theories"]) == 6


# ---------------------------------------------------------------------------
# evolve


def test_evolve_writes_deterministic_csv(tmp_path, scenario_file, capsys):
    scenario = scenario_file(BALL_SCENARIO)
    out1, out2 = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
    assert run_cli("evolve", "--scenario", scenario, "--out", out1) == EXIT_OK
    assert run_cli("evolve", "--scenario", scenario, "--out", out2) == EXIT_OK
    data1 = (tmp_path / "a.csv").read_bytes()
    assert data1 == (tmp_path / "b.csv").read_bytes()
    lines = data1.decode().splitlines()
    assert lines[0] == "t,u1,u2,u3,energy"
    assert lines[1] == "0,1,0,0,0"
    assert len(lines) == 34  # header + 33 samples
    assert b"\r" not in data1


def test_evolve_json_report(scenario_file, tmp_path, capsys):
    scenario = scenario_file(CUBE_SCENARIO)
    out = str(tmp_path / "cube.csv")
    code = run_cli("evolve", "--scenario", scenario, "--out", out, "--format", "json")
    assert code == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["evolutionSpec"]["mode"] == "discrete"
    assert report["energyConstant"] is True
    assert report["exitCode"] == EXIT_OK
    assert report["outputs"] == [out]


def test_evolve_svg_output(scenario_file, tmp_path, capsys):
    scenario = scenario_file(BALL_SCENARIO)
    out = str(tmp_path / "t.csv")
    svg = str(tmp_path / "t.svg")
    code = run_cli(
        "evolve", "--scenario", scenario, "--out", out, "--svg", svg, "--plane", "xy"
    )
    assert code == EXIT_OK
    content = (tmp_path / "t.svg").read_text()
    assert content.startswith("<svg")
    assert "<polyline" in content


def test_evolve_off_lattice_exit_65(scenario_file, tmp_path, capsys):
    bad = dict(CUBE_SCENARIO, time={"tMax": 1.0, "dt": 0.3})
    scenario = scenario_file(bad)
    code = run_cli("evolve", "--scenario", scenario, "--out", str(tmp_path / "x.csv"))
    assert code == EXIT_DYNAMICS
    err = capsys.readouterr().err
    assert "minimal admissible time" in err
    assert not (tmp_path / "x.csv").exists()


def test_evolve_inadmissible_exit_65(scenario_file, tmp_path, capsys):
    cone = {
        "theory": "cone",
        "hamiltonian": {"vector": [1.0, 0.0, 0.0]},
        "time": {"tMax": 1.0, "dt": 0.5},
        "initialState": [0.0, 0.0, 0.0],
    }
    code = run_cli(
        "evolve", "--scenario", scenario_file(cone), "--out", str(tmp_path / "x.csv")
    )
    assert code == EXIT_DYNAMICS


# ---------------------------------------------------------------------------
# usage errors


def test_missing_scenario_file_exit_64(tmp_path, capsys):
    code = run_cli(
        "evolve", "--scenario", str(tmp_path / "nope.json"),
        "--out", str(tmp_path / "x.csv"),
    )
    assert code == EXIT_USAGE


def test_invalid_json_exit_64(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code = run_cli("evolve", "--scenario", str(bad), "--out", str(tmp_path / "x.csv"))
    assert code == EXIT_USAGE


def test_unknown_scenario_field_exit_64(scenario_file, tmp_path, capsys):
    scenario = scenario_file(dict(BALL_SCENARIO, extra=1))
    code = run_cli("evolve", "--scenario", scenario, "--out", str(tmp_path / "x.csv"))
    assert code == EXIT_USAGE


def test_unknown_theory_exit_64(scenario_file, tmp_path, capsys):
    scenario = scenario_file(dict(BALL_SCENARIO, theory="teapot"))
    code = run_cli("evolve", "--scenario", scenario, "--out", str(tmp_path / "x.csv"))
    assert code == EXIT_USAGE


def test_bad_flag_exit_64(capsys):
    assert run_cli("list-theories", "--nope") == EXIT_USAGE
    assert run_cli("frobnicate") == EXIT_USAGE


# ---------------------------------------------------------------------------
# verify


def test_verify_ball_passes(scenario_file, capsys):
    code = run_cli("verify", "--scenario", scenario_file(BALL_SCENARIO))
    assert code == EXIT_OK
    out = capsys.readouterr().out
    for name in ("OBS", "GEN", "INV", "QUAN"):
        assert f"{name}: pass" in out


def test_verify_failing_check_exit_2(scenario_file, capsys):
    cone = {
        "theory": "cone",
        "hamiltonian": {"vector": [1.0, 0.0, 0.0]},
        "time": {"tMax": 1.0, "dt": 0.5},
        "initialState": [0.0, 0.0, 0.0],
        "checks": ["GEN"],
    }
    code = run_cli("verify", "--scenario", scenario_file(cone))
    assert code == EXIT_CHECK
    assert "GEN: FAIL" in capsys.readouterr().out


# ---------------------------------------------------------------------------
# symmetry / phase-group


def test_symmetry_command(capsys):
    assert run_cli("symmetry", "--theory", "cube", "--format", "json") == EXIT_OK
    body = json.loads(capsys.readouterr().out)
    assert body["groupOrder"] == 48
    assert run_cli("symmetry", "--theory", "cube", "--rotations-only") == EXIT_OK
    assert "rotations 24" in capsys.readouterr().out


def test_phase_group_command(capsys):
    code = run_cli("phase-group", "--theory", "cube", "--measurement", "z",
                   "--format", "json")
    assert code == EXIT_OK
    body = json.loads(capsys.readouterr().out)
    assert body["finiteOrder"] == 4
    assert run_cli("phase-group", "--theory", "cube", "--measurement", "w") == EXIT_USAGE


# ---------------------------------------------------------------------------
# energy


def test_energy_command(tmp_path, capsys):
    periods = tmp_path / "periods.csv"
    periods.write_text("i,j,tau\n1,2,%r\n2,3,%r\n" % (TWO_PI, math.pi))
    assert run_cli("energy", "--periods", str(periods), "--format", "json") == EXIT_OK
    body = json.loads(capsys.readouterr().out)
    np.testing.assert_allclose(body["energies"], [0.0, 1.0, 3.0], atol=1e-9)


def test_energy_inconsistent_cycle_exit_2(tmp_path, capsys):
    periods = tmp_path / "periods.csv"
    rows = [(1, 2, TWO_PI), (2, 3, TWO_PI), (1, 3, TWO_PI)]
    periods.write_text("\n".join("%d,%d,%r" % row for row in rows))
    assert run_cli("energy", "--periods", str(periods)) == EXIT_CHECK
    assert "check failed" in capsys.readouterr().err


def test_energy_bad_rows_exit_64(tmp_path, capsys):
    periods = tmp_path / "periods.csv"
    periods.write_text("1,2\n")
    assert run_cli("energy", "--periods", str(periods)) == EXIT_USAGE
    empty = tmp_path / "empty.csv"
    empty.write_text("# only comments\n")
    assert run_cli("energy", "--periods", str(empty)) == EXIT_USAGE


# ---------------------------------------------------------------------------
# liouville


def test_liouville_command(capsys):
    code = run_cli("liouville", "--potential", "harmonic", "--format", "json")
    assert code == EXIT_OK
    body = json.loads(capsys.readouterr().out)
    assert body["antisymmetryDefect"] == 0.0
    assert body["orthogonalityDefect"] < 1e-9


def test_liouville_bad_grid_exit_64(capsys):
    assert run_cli("liouville", "--grid", "7") == EXIT_USAGE


# ---------------------------------------------------------------------------
# installed entry point


def test_console_script_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "gptham.cli", "list-theories", "--format", "json"],
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert proc.returncode == EXIT_OK
    assert len(json.loads(proc.stdout)["theories"]) == 6
