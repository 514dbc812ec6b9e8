import numpy as np
import pytest
from numpy.testing import assert_allclose

from ..coefficients import Constant, Linear, Sinusoid
from ..hamiltonian import HamiltonianSpec, eval_hamiltonian, spectral_decompose
from ..helpers import DomainError, ValidationError
from ..holonomy import holonomy_operator
from ..linalg import Frame, frobenius
from ..propagation import TimeGrid, propagate_frame, propagate_unitary
from .helpers import SIGMA_X, SIGMA_Z, random_hermitian


def _driven_spec(duration=1.0):
    return HamiltonianSpec(
        [
            (Sinusoid(amplitude=2.0, frequency=2.0 * np.pi), SIGMA_X),
            (Linear(slope=1.0, intercept=0.5), SIGMA_Z),
        ],
        duration,
    )


def test_eval_hamiltonian():
    spec = _driven_spec()
    t = 0.125
    expected = 2.0 * np.sin(0.25 * np.pi) * SIGMA_X + (t + 0.5) * SIGMA_Z
    assert_allclose(eval_hamiltonian(spec, t), expected, atol=1e-15)
    stack = eval_hamiltonian(spec, [0.0, t, 1.0])
    assert stack.shape == (3, 2, 2)
    assert_allclose(stack[1], expected, atol=1e-15)


@pytest.mark.parametrize("t_invalid", [-0.1, 1.5])
def test_domain(t_invalid):
    with pytest.raises(DomainError) as exc:
        eval_hamiltonian(_driven_spec(), t_invalid)
    assert exc.value.args[0] == "time outside of the Hamiltonian domain [0, 1.0]"


def test_unbounded_domain():
    spec = HamiltonianSpec([(Constant(value=1.0), SIGMA_Z)])
    assert_allclose(eval_hamiltonian(spec, 10.0), SIGMA_Z)


def test_validation():
    with pytest.raises(ValidationError) as exc:
        HamiltonianSpec([], 1.0)
    assert exc.value.args[0] == "a Hamiltonian needs at least one term"
    with pytest.raises(ValidationError) as exc:
        HamiltonianSpec([(Constant(), np.array([[0.0, 1.0], [0.0, 0.0]]))], 1.0)
    assert exc.value.args[0] == "term 0 matrix is not Hermitian"
    with pytest.raises(ValidationError) as exc:
        HamiltonianSpec([(Constant(), SIGMA_Z), (Constant(), np.identity(3))], 1.0)
    assert exc.value.args[0] == "term 1 matrix has the wrong dimension"
    with pytest.raises(ValidationError):
        HamiltonianSpec([(Constant(), SIGMA_Z)], -1.0)


def test_shifted():
    spec = _driven_spec().shifted(0.75)
    assert_allclose(
        eval_hamiltonian(spec, 0.3),
        eval_hamiltonian(_driven_spec(), 0.3) - 0.75 * np.identity(2),
        atol=1e-15,
    )


def test_time_reversed_undoes_evolution():
    spec = _driven_spec()
    reverse = spec.time_reversed()
    assert_allclose(eval_hamiltonian(reverse, 0.2), -eval_hamiltonian(spec, 0.8), atol=1e-14)
    grid = TimeGrid(1.0, 512)
    forward = propagate_unitary(spec, grid)[-1]
    backward = propagate_unitary(reverse, grid)[-1]
    # the midpoint samples of the reversed run mirror those of the forward run
    assert_allclose(backward @ forward, np.identity(2), atol=1e-12)


def test_reparameterized_keeps_holonomy():
    spec = HamiltonianSpec(
        [(Constant(value=np.pi), SIGMA_Z), (Constant(value=0.4), SIGMA_X)], 1.0
    )
    frame0 = Frame(np.array([[1.0], [0.0]]))
    grid = TimeGrid(1.0, 4096)
    original = propagate_frame(spec, frame0, grid)
    warped = propagate_frame(spec.reparameterized(), frame0, grid)
    # same path of projectors, same end point
    assert frobenius(warped.projectors[-1] - original.projectors[-1]) < 1e-5
    gamma = holonomy_operator(original)[-1]
    gamma_warped = holonomy_operator(warped)[-1]
    assert frobenius(gamma - gamma_warped) < 1e-5


def test_concatenated():
    first = HamiltonianSpec([(Constant(value=1.0), SIGMA_Z)], 0.5)
    second = HamiltonianSpec([(Constant(value=2.0), SIGMA_X)], 1.5)
    joined = first.concatenated(second)
    assert joined.duration == 2.0
    assert_allclose(eval_hamiltonian(joined, 0.25), SIGMA_Z, atol=1e-15)
    assert_allclose(eval_hamiltonian(joined, 1.25), 2.0 * SIGMA_X, atol=1e-15)


def test_concatenated_dimension():
    first = HamiltonianSpec([(Constant(), SIGMA_Z)], 1.0)
    second = HamiltonianSpec([(Constant(), np.identity(3))], 1.0)
    with pytest.raises(ValidationError):
        first.concatenated(second)


def test_spectral_decompose():
    matrix = random_hermitian(3, seed=11)
    decomposition = spectral_decompose(matrix)
    assert np.all(np.diff(decomposition.eigenvalues) > 0.0)
    assert_allclose(decomposition.reconstruct(), matrix, atol=1e-13)


def test_spectral_decompose_non_hermitian():
    with pytest.raises(ValidationError) as exc:
        spectral_decompose(np.array([[0.0, 1.0], [2.0, 0.0]]))
    assert exc.value.args[0] == "matrix is not Hermitian"
