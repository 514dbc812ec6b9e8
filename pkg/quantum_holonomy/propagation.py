# -*- coding: utf-8 -*-
"""
Schroedinger propagation on uniform time grids.

Every step uses the exponential midpoint rule

    U(t_{k+1}) = exp(-i h H(t_k + h/2)) U(t_k),

which is second order and unitary to rounding.
"""
from dataclasses import dataclass

import numpy as np

from astropy import log

from . import conf
from .hamiltonian import eval_hamiltonian
from .helpers import ValidationError, _check_finite
from .linalg import (
    Frame,
    dagger,
    expm_antihermitian,
    frobenius,
    polar_unitary_factor,
)

__all__ = [
    "TimeGrid",
    "FrameTrajectory",
    "propagate_unitary",
    "propagate_frame",
    "check_cyclic",
]


@dataclass(frozen=True)
class TimeGrid:
    """
    Uniform grid t_k = k T / N on [0, T].

    Parameters
    ----------
    duration : float
        T > 0

    steps : int
        N >= 16

    Raises
    ------
    ValidationError
        non-positive duration or fewer than 16 steps
    """

    duration: float
    steps: int

    def __post_init__(self):
        if not (np.isfinite(self.duration) and self.duration > 0.0):
            raise ValidationError("grid duration must be positive")
        if int(self.steps) != self.steps or self.steps < 16:
            raise ValidationError("grid needs an integer number of steps >= 16")
        object.__setattr__(self, "duration", float(self.duration))
        object.__setattr__(self, "steps", int(self.steps))

    @property
    def step(self):
        """Step size h = T / N."""
        return self.duration / self.steps

    @property
    def nodes(self):
        return np.arange(self.steps + 1) * self.step

    @property
    def midpoints(self):
        return (np.arange(self.steps) + 0.5) * self.step

    def refined(self, factor=2):
        return TimeGrid(self.duration, self.steps * factor)

    def summary(self):
        return {"duration": self.duration, "steps": self.steps, "step": self.step}


@dataclass(frozen=True, eq=False)
class FrameTrajectory:
    """
    Frames psi(t_k) evolved by the Schroedinger equation.

    Attributes
    ----------
    grid : TimeGrid

    frames : complex array (N+1, d, l)
        psi-frames at the grid nodes

    projectors : complex array (N+1, d, d)
        P(t_k) = psi psi^dagger

    hamiltonians : complex array (N+1, d, d)
        H(t_k)

    midpoint_hamiltonians : complex array (N, d, d)
        H(t_k + h/2)

    cyclicity_defect : float
        ||P(T) - P(0)||_F
    """

    grid: TimeGrid
    frames: np.ndarray
    projectors: np.ndarray
    hamiltonians: np.ndarray
    midpoint_hamiltonians: np.ndarray
    cyclicity_defect: float

    @property
    def dim(self):
        return self.frames.shape[1]

    @property
    def rank(self):
        return self.frames.shape[2]

    @property
    def initial_frame(self):
        return self.frames[0]

    @property
    def final_frame(self):
        return self.frames[-1]

    def frame(self, k):
        """Frame at node k."""
        return Frame(self.frames[k], atol=1e-9)

    def check_invariants(self):
        """
        Check orthonormality of the frames and consistency of the projectors.

        Raises
        ------
        ValidationError
            an invariant is violated
        """
        identity = np.identity(self.rank)
        if np.any(frobenius(dagger(self.frames) @ self.frames - identity) > 1e-9):
            raise ValidationError("trajectory frames are not orthonormal")
        if np.any(frobenius(self.frames @ dagger(self.frames) - self.projectors) > 1e-10):
            raise ValidationError("trajectory projectors do not match the frames")


def _step_propagators(spec, grid):
    hamiltonians = eval_hamiltonian(spec, grid.midpoints)
    _check_finite(hamiltonians, "Hamiltonian samples")
    return hamiltonians, expm_antihermitian(-1j * grid.step * hamiltonians)


def _check_dims(spec, grid, dim=None):
    if not isinstance(grid, TimeGrid):
        raise ValidationError("grid must be a TimeGrid")
    if spec.duration is not None and abs(spec.duration - grid.duration) > 1e-12 * max(
        1.0, grid.duration
    ):
        raise ValidationError("grid duration does not match the Hamiltonian duration")
    if dim is not None and dim != spec.dim:
        raise ValidationError(
            "frame dimension %d does not match Hamiltonian dimension %d" % (dim, spec.dim)
        )


def propagate_unitary(spec, grid, reunitarize_every=None):
    """
    Full d x d evolution operators at the grid nodes.

    Parameters
    ----------
    spec : HamiltonianSpec

    grid : TimeGrid

    reunitarize_every : int, optional
        polar re-unitarization cadence; default ``conf.reunitarize_every``

    Returns
    -------
    unitaries : complex array (N+1, d, d)
        U(t_k), U(0) = 1
    """
    _check_dims(spec, grid)
    if reunitarize_every is None:
        reunitarize_every = int(conf.reunitarize_every)
    _, steps = _step_propagators(spec, grid)
    unitaries = np.empty((grid.steps + 1, spec.dim, spec.dim), dtype=np.complex128)
    unitaries[0] = np.identity(spec.dim)
    for k in range(grid.steps):
        unitaries[k + 1] = steps[k] @ unitaries[k]
        if (k + 1) % reunitarize_every == 0:
            unitaries[k + 1] = polar_unitary_factor(unitaries[k + 1])
    _check_finite(unitaries, "propagated unitaries")
    return unitaries


def propagate_frame(spec, frame0, grid):
    """
    Evolve an l-frame with the Schroedinger equation.

    Uses the same stepping as `propagate_unitary`, so
    frames(t_k) = U(t_k) frame0.

    Parameters
    ----------
    spec : HamiltonianSpec

    frame0 : Frame
        initial frame psi(0)

    grid : TimeGrid

    Returns
    -------
    trajectory : FrameTrajectory
    """
    _check_dims(spec, grid, frame0.dim)
    unitaries = propagate_unitary(spec, grid)
    frames = unitaries @ frame0.columns
    projectors = frames @ dagger(frames)
    hamiltonians = eval_hamiltonian(spec, grid.nodes)
    midpoint_hamiltonians = eval_hamiltonian(spec, grid.midpoints)
    defect = float(frobenius(projectors[-1] - projectors[0]))
    log.debug(
        "propagated d=%d l=%d frame over %d steps, cyclicity defect %.3e"
        % (frame0.dim, frame0.rank, grid.steps, defect)
    )
    return FrameTrajectory(
        grid=grid,
        frames=frames,
        projectors=projectors,
        hamiltonians=hamiltonians,
        midpoint_hamiltonians=midpoint_hamiltonians,
        cyclicity_defect=defect,
    )


def check_cyclic(traj, tol=None):
    """
    Whether the subspace returns to itself, ||P(T) - P(0)||_F <= tol.

    Parameters
    ----------
    traj : FrameTrajectory

    tol : float, optional
        default ``conf.cyclic_tol``; the comparison is inclusive

    Returns
    -------
    cyclic : bool
    """
    if tol is None:
        tol = float(conf.cyclic_tol)
    return bool(traj.cyclicity_defect <= tol)
