import numpy as np
import pytest
from numpy.testing import assert_allclose

from ..coefficients import Sinusoid
from ..gates import (
    a0_branch_diagnostic,
    design_one_parameter_gate,
    design_population,
    feasibility_table,
    verify_gate_design,
)
from ..helpers import (
    BranchCutWarning,
    InfeasibleDesignError,
    TrivialGateWarning,
    ValidationError,
)
from ..holonomy import dynamic_operator
from ..linalg import dagger, frobenius
from ..propagation import TimeGrid
from ..report import simulate
from ..scenario import parse_scenario, serialize_scenario

HC = np.diag([0.0, 1.0, 3.0])


@pytest.fixture(scope="module")
def design():
    return design_one_parameter_gate(HC, 1, 1, steps=1024)


def test_design_parameters(design):
    assert_allclose(design.population, 0.5)
    assert_allclose(design.theta_T, np.pi)
    assert_allclose(design.energies, [0.0, 1.0, 3.0])
    assert_allclose(design.predicted_U, np.diag([1.0, -1.0]), atol=1e-15)
    assert not design.is_trivial
    assert design.scenario.name == "gate-N1-m1"
    frame = design.scenario.frame0.columns
    assert_allclose(frame[:, 0], [1.0, 0.0, 0.0])
    assert_allclose(frame[:, 1], [0.0, np.sqrt(0.5), -np.sqrt(0.5)])
    # the auxiliary state is orthogonal to the qubit subspace
    assert_allclose(dagger(frame) @ design.auxiliary_state, 0.0, atol=1e-15)


def test_design_population():
    assert_allclose(design_population([0.0, 1.0, 3.0], 1, 1), 0.5)
    assert_allclose(design_population([0.0, 1.0, 2.0], 2, 3), 0.5)
    with pytest.raises(ValidationError):
        design_population([0.0, 1.0, 3.0], 0, 1)


def test_verify(design):
    with pytest.warns(BranchCutWarning):
        report = verify_gate_design(design)
    assert report.cyclic
    assert report.verdict.is_purely_holonomic
    assert_allclose(report.verdict.alpha, 0.0, atol=1e-8)
    assert report.gate["matches"]
    assert report.gate["residual"] < 1e-5
    assert report.theorem2_residual < 1e-6
    assert report.passed
    assert "branch-cut-shift" in report.flags


def test_verify_with_grid(design):
    with pytest.warns(BranchCutWarning):
        report = verify_gate_design(design, grid=TimeGrid(1.0, 512))
    assert report.grid["steps"] == 512
    with pytest.raises(ValidationError):
        verify_gate_design(design, grid=TimeGrid(2.0, 512))


def test_design_roundtrip(design):
    scenario = parse_scenario(serialize_scenario(design.scenario))
    assert scenario.design["N"] == 1
    assert scenario.design["predicted_U"]["re"] == [[1.0, 0.0], [0.0, -1.0]]


@pytest.mark.parametrize("phases", [(0.0, 0.0), (0.4, -1.1)])
def test_sinusoid_profile(phases):
    profile = Sinusoid(amplitude=1.0, frequency=np.pi)
    design = design_one_parameter_gate(
        HC, 1, 1, phase_a1=phases[0], phase_a2=phases[1], profile=profile, steps=4096
    )
    assert_allclose(design.profile.area(0.0, 1.0), np.pi, rtol=1e-10)
    with pytest.warns(BranchCutWarning):
        report = verify_gate_design(design)
    assert report.verdict.is_purely_holonomic
    assert report.gate["matches"]


def test_m0_is_parallel_transport():
    # E_1 < 0 relative to the reference level makes m = 0 feasible
    design = design_one_parameter_gate(np.diag([0.0, -1.0, 1.0]), 1, 0, reference_level=1,
                                       steps=256)
    assert_allclose(design.energies, [0.0, -1.0, 1.0])
    traj = simulate(design.scenario)
    F = dynamic_operator(traj).F
    assert np.max(frobenius(F)) < 1e-8


def test_infeasible():
    with pytest.raises(InfeasibleDesignError) as exc:
        design_one_parameter_gate(HC, 1, 0)
    assert exc.value.args[0] == (
        "(N, m) = (1, 0) is infeasible: |a1|^2 = m/N - E1/(E2 - E1) = -0.5 is not in (0, 1)"
    )
    assert exc.value.population == -0.5


def test_infeasible_boundary():
    # |a1|^2 = 0 leaves a state of the qubit subspace unchanged: not a valid design
    with pytest.raises(InfeasibleDesignError):
        design_one_parameter_gate(np.diag([0.0, 1.0, 2.0]), 1, 1)


def test_invalid_design():
    with pytest.raises(ValidationError):
        design_one_parameter_gate(HC, 0, 1)
    with pytest.raises(ValidationError):
        design_one_parameter_gate(np.diag([0.0, 1.0, 1.0]), 1, 1)
    with pytest.raises(ValidationError):
        design_one_parameter_gate(np.identity(2), 1, 1)
    with pytest.raises(ValidationError):
        design_one_parameter_gate(HC, 1, 1, profile=Sinusoid(frequency=2.0 * np.pi))


def test_trivial_gate():
    with pytest.warns(TrivialGateWarning):
        design = design_one_parameter_gate(np.diag([0.0, 1.0, 2.0]), 2, 3, steps=512)
    assert design.is_trivial
    assert_allclose(design.predicted_U, np.identity(2), atol=1e-12)
    report = verify_gate_design(design)
    assert "trivial-gate" in report.flags
    assert report.verdict.is_purely_holonomic


def test_detuned_population(design):
    detuned = design.detuned(population_shift=1.01)
    assert "detuned" in detuned.flags
    assert detuned.scenario.name == "gate-N1-m1-detuned"
    with pytest.warns(BranchCutWarning):
        report = verify_gate_design(detuned)
    assert report.cyclic
    assert not report.verdict.is_purely_holonomic
    # D^dagger(T) = diag(1, exp(0.01 i pi))
    assert_allclose(report.verdict.residual, 2.0 * np.sqrt(2.0) * np.sin(0.0025 * np.pi),
                    rtol=1e-6)


def test_detuned_area(design):
    detuned = design.detuned(area_factor=1.01)
    report = verify_gate_design(detuned)
    assert not report.cyclic
    assert "noncyclic" in report.flags
    assert report.gate["matches"] is False
    assert report.theorem2_residual is None
    with pytest.raises(InfeasibleDesignError):
        design.detuned(population_shift=3.0)


def test_feasibility_table():
    table = feasibility_table([0.0, 1.0, 2.0], range(-2, 3), range(-3, 4))
    assert set(table.colnames) == {"N", "m", "population", "feasible"}
    assert len(table) == 4 * 7
    unit = table[np.abs(table["N"]) == 1]
    assert not np.any(unit["feasible"])
    feasible = table[table["feasible"]]
    assert len(feasible) > 0
    assert_allclose(feasible["population"], 0.5)


def test_a0_branch():
    amplitudes = np.ones(3) / np.sqrt(3.0)
    half = a0_branch_diagnostic(HC, amplitudes, np.pi)
    assert half.cyclicity_defect > 0.1
    full = a0_branch_diagnostic(HC, amplitudes, 2.0 * np.pi)
    assert full.cyclicity_defect < 1e-12
    assert full.trivial_residual < 1e-12
    with pytest.raises(ValidationError):
        a0_branch_diagnostic(HC, [0.0, 0.0, 0.0], np.pi)
