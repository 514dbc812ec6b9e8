import numpy as np
import pytest
import scipy.linalg
from numpy.testing import assert_allclose

from ..coefficients import Constant, Linear
from ..hamiltonian import HamiltonianSpec
from ..helpers import ValidationError
from ..linalg import Frame, dagger, frobenius
from ..propagation import TimeGrid, check_cyclic, propagate_frame, propagate_unitary
from .helpers import SIGMA_X, SIGMA_Z, precession_scenario, random_hermitian


def test_grid():
    grid = TimeGrid(2.0, 16)
    assert grid.step == 0.125
    assert len(grid.nodes) == 17
    assert len(grid.midpoints) == 16
    assert grid.nodes[-1] == 2.0
    assert_allclose(grid.midpoints[0], 0.0625)
    assert grid.refined().steps == 32
    assert grid.summary() == {"duration": 2.0, "steps": 16, "step": 0.125}


@pytest.mark.parametrize("duration, steps", [(0.0, 32), (-1.0, 32), (1.0, 15), (1.0, 20.5)])
def test_invalid_grid(duration, steps):
    with pytest.raises(ValidationError):
        TimeGrid(duration, steps)


def test_constant_hamiltonian_is_exact():
    matrix = random_hermitian(3, seed=21)
    spec = HamiltonianSpec([(Constant(value=1.0), matrix)], 2.0)
    grid = TimeGrid(2.0, 64)
    unitaries = propagate_unitary(spec, grid)
    assert_allclose(unitaries[0], np.identity(3), atol=0.0)
    assert_allclose(unitaries[-1], scipy.linalg.expm(-2.0j * matrix), atol=1e-12)
    assert np.max(frobenius(dagger(unitaries) @ unitaries - np.identity(3))) < 1e-12


def test_second_order():
    spec = HamiltonianSpec(
        [(Constant(value=1.0), SIGMA_X), (Linear(slope=4.0, intercept=0.0), SIGMA_Z)], 1.0
    )
    finals = [propagate_unitary(spec, TimeGrid(1.0, steps))[-1] for steps in (64, 128, 256)]
    ratio = frobenius(finals[1] - finals[0]) / frobenius(finals[2] - finals[1])
    assert 3.6 < ratio < 4.4


def test_frame_trajectory():
    scenario = precession_scenario(np.pi / 3, steps=256)
    traj = propagate_frame(scenario.hamiltonian, scenario.frame0, scenario.grid)
    traj.check_invariants()
    assert traj.frames.shape == (257, 2, 1)
    assert traj.projectors.shape == (257, 2, 2)
    assert traj.hamiltonians.shape == (257, 2, 2)
    assert traj.midpoint_hamiltonians.shape == (256, 2, 2)
    assert traj.dim == 2 and traj.rank == 1
    assert_allclose(traj.final_frame, -traj.initial_frame, atol=1e-12)
    assert traj.cyclicity_defect < 1e-12
    assert check_cyclic(traj)
    assert traj.frame(10).rank == 1


def test_check_cyclic_inclusive():
    spec = HamiltonianSpec([(Constant(value=0.25 * np.pi), SIGMA_X)], 1.0)
    traj = propagate_frame(spec, Frame(np.array([[1.0], [0.0]])), TimeGrid(1.0, 32))
    assert traj.cyclicity_defect > 0.1
    assert not check_cyclic(traj)
    assert check_cyclic(traj, tol=traj.cyclicity_defect)


def test_dimension_mismatch():
    spec = HamiltonianSpec([(Constant(), SIGMA_Z)], 1.0)
    with pytest.raises(ValidationError):
        propagate_frame(spec, Frame(np.identity(3)[:, :1]), TimeGrid(1.0, 32))
    with pytest.raises(ValidationError):
        propagate_frame(spec, Frame(np.identity(2)[:, :1]), TimeGrid(2.0, 32))
