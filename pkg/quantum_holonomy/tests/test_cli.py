import json

import numpy as np
import pytest
from click.testing import CliRunner

from astropy.table import Table

from ..cli import cli
from ..gates import design_one_parameter_gate
from ..helpers import BranchCutWarning
from ..report import report_from_json
from ..scenario import load_scenario, serialize_scenario
from .helpers import scenario_path


def _invoke(*args):
    return CliRunner().invoke(cli, [str(arg) for arg in args])


def test_separate_output(tmp_path):
    output = tmp_path / "report.json"
    result = _invoke("separate", scenario_path("stationary"), "--steps", 1024,
                     "--output", output)
    assert result.exit_code == 0, result.output
    report = report_from_json(output.read_text())
    assert report.passed
    assert report.grid["steps"] == 1024


def test_separate_failure(tmp_path):
    result = _invoke("separate", scenario_path("noncommuting_block"), "--steps", 256,
                     "--tol", 1e-300, "--output", tmp_path / "report.json")
    assert result.exit_code == 1
    assert "failed checks" in result.output


def test_simulate_trace(tmp_path):
    output = tmp_path / "summary.json"
    result = _invoke("simulate", scenario_path("rabi_half_flip"), "--output", output)
    assert result.exit_code == 0, result.output
    summary = json.loads(output.read_text())
    assert summary["cyclic"] is False
    table = Table.read(str(tmp_path / "summary.csv"), format="ascii.csv")
    assert len(table) == 1025
    assert "overlap" in table.colnames


def test_check_holonomic_gate():
    with pytest.warns(BranchCutWarning):
        result = _invoke("check-holonomic", scenario_path("gate_013"), "--steps", 1024)
    assert result.exit_code == 0, result.output
    assert "purely holonomic: yes" in result.output


def test_check_holonomic_noncyclic():
    result = _invoke("check-holonomic", scenario_path("rabi_half_flip"))
    assert result.exit_code == 2
    assert "input error" in result.output
    assert "not cyclic" in result.output


def test_check_holonomic_detuned(tmp_path):
    design = design_one_parameter_gate(np.diag([0.0, 1.0, 3.0]), 1, 1, steps=1024)
    path = tmp_path / "detuned.json"
    path.write_text(serialize_scenario(design.detuned(population_shift=1.01).scenario))
    assert load_scenario(str(path)).design["detuned"]["population_shift"] == 1.01
    with pytest.warns(BranchCutWarning):
        result = _invoke("check-holonomic", path)
    assert result.exit_code == 1
    assert "purely holonomic: no" in result.output


def test_design_gate_verify():
    with pytest.warns(BranchCutWarning):
        result = _invoke("design-gate", "--energies", "0,1,3", "--N", 1, "--m", 1,
                         "--steps", 1024, "--verify")
    assert result.exit_code == 0, result.output
    assert '"matches": true' in result.output


def test_design_gate_file(tmp_path):
    output = tmp_path / "gate.json"
    result = _invoke("design-gate", "--energies", "0,1,3", "--N", 1, "--m", 1,
                     "--output", output)
    assert result.exit_code == 0, result.output
    scenario = load_scenario(str(output))
    assert scenario.design["N"] == 1
    assert scenario.rank == 2


def test_design_gate_infeasible():
    result = _invoke("design-gate", "--energies", "0,1,2", "--N", 1, "--m", 0)
    assert result.exit_code == 1
    assert "infeasible design" in result.output


def test_design_gate_bad_energies():
    result = _invoke("design-gate", "--energies", "0,1", "--N", 1, "--m", 1)
    assert result.exit_code == 2
    assert "--energies must be 3 comma-separated numbers" in result.output


def test_malformed_scenario(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"dim": 2,')
    result = _invoke("separate", path)
    assert result.exit_code == 2
    assert "input error" in result.output


def test_convergence_table(tmp_path):
    output = tmp_path / "convergence.csv"
    result = _invoke("convergence", scenario_path("free"), "--levels", 2,
                     "--steps", 64, "--output", output)
    assert result.exit_code == 0, result.output
    table = Table.read(str(output), format="ascii.csv")
    assert list(table["steps"]) == [64, 128]


def test_design_gate_zero_population():
    result = _invoke("design-gate", "--energies", "0,1,2", "--N", 1, "--m", 1)
    assert result.exit_code == 1
    assert "|a1|^2 = m/N - E1/(E2 - E1) = 0 is not in (0, 1)" in result.output
