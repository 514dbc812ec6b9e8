import numpy as np

from astropy.utils.data import get_pkg_data_filename

from ..coefficients import Constant, Linear, PiecewiseConstant, Sinusoid
from ..hamiltonian import HamiltonianSpec
from ..linalg import Frame
from ..propagation import TimeGrid
from ..scenario import Scenario

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]])
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def precession_scenario(theta, steps=2048, omega=2.0 * np.pi, duration=1.0):
    """
    Spin-1/2 in H = (omega/2) sigma_z, state at polar angle theta.
    """
    spec = HamiltonianSpec([(Constant(value=0.5 * omega), SIGMA_Z)], duration)
    state = np.array([np.cos(0.5 * theta), np.sin(0.5 * theta)], dtype=complex)
    return Scenario(spec, Frame(state[:, None]), TimeGrid(duration, steps))


def stationary_scenario(steps=1024):
    """
    Frame (e_1, e_2) of H = diag(0, 1, 2) over T = 2 pi.
    """
    spec = HamiltonianSpec([(Constant(value=1.0), np.diag([0.0, 1.0, 2.0]))], 2.0 * np.pi)
    return Scenario(spec, Frame(np.identity(3)[:, :2]), TimeGrid(2.0 * np.pi, steps))


def rotating_field_scenario(duration, steps=4096):
    """
    H(t) = cos(pi t/T) sigma_z + sin(pi t/T) sigma_x, started in the ground
    state of sigma_z.
    """
    rate = np.pi / duration
    spec = HamiltonianSpec(
        [
            (Sinusoid(amplitude=1.0, frequency=rate, phase=0.5 * np.pi), SIGMA_Z),
            (Sinusoid(amplitude=1.0, frequency=rate), SIGMA_X),
        ],
        duration,
    )
    return Scenario(spec, Frame(np.array([[0.0], [1.0]])), TimeGrid(duration, steps))


def random_hermitian(dim, seed):
    rng = np.random.default_rng(seed)
    matrix = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return 0.5 * (matrix + matrix.conj().T)


def random_unitary(dim, seed):
    rng = np.random.default_rng(seed)
    matrix = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(matrix)
    return q * (np.diag(r) / np.abs(np.diag(r)))[None, :]


def random_loop_scenario(steps, seed=11):
    """
    Two-segment loop in d = 3 with a random two-dimensional initial frame.

    Each half runs H_j = W_j diag(0, 4 pi, 8 pi) W_j^dagger for T/2 = 0.5,
    which returns U to the identity, so every subspace is cyclic.
    """
    energies = np.diag([0.0, 4.0 * np.pi, 8.0 * np.pi])
    rotations = [random_unitary(3, seed + 1), random_unitary(3, seed + 2)]
    blocks = [w @ energies @ w.conj().T for w in rotations]
    spec = HamiltonianSpec(
        [
            (PiecewiseConstant([0.5], [1.0, 0.0]), blocks[0]),
            (PiecewiseConstant([0.5], [0.0, 1.0]), blocks[1]),
        ],
        1.0,
    )
    frame0 = Frame(random_unitary(3, seed)[:, :2])
    return Scenario(spec, frame0, TimeGrid(1.0, steps))


def random_drive_scenario(steps, seed=23):
    """
    Smooth non-cyclic drive H0 + sin(2 pi t) H1 + t H2 in d = 3, scaled by
    1/2, with a random two-dimensional initial frame.
    """
    spec = HamiltonianSpec(
        [
            (Constant(value=0.5), random_hermitian(3, seed + 1)),
            (Sinusoid(amplitude=0.5, frequency=2.0 * np.pi), random_hermitian(3, seed + 2)),
            (Linear(slope=0.5, intercept=0.0), random_hermitian(3, seed + 3)),
        ],
        1.0,
    )
    frame0 = Frame(random_unitary(3, seed)[:, :2])
    return Scenario(spec, frame0, TimeGrid(1.0, steps))


def scenario_path(name):
    """
    File name of a bundled scenario.
    """
    return get_pkg_data_filename(
        "data/scenarios/" + name + ".json", package="quantum_holonomy"
    )
