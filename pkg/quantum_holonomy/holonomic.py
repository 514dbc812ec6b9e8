# -*- coding: utf-8 -*-
"""
Checks built on the holonomy/dynamic separation: purely holonomic
evolutions, composition of segments, the geometric phase of a cyclic ray and
the adiabatic reduction F = -i E 1.
"""
from dataclasses import dataclass, asdict
from typing import NamedTuple

import numpy as np

from astropy import log

from . import conf
from .hamiltonian import eval_hamiltonian
from .helpers import (
    PreconditionError,
    TrackingError,
    ValidationError,
    _warn,
    reduce_phase,
)
from .holonomy import dynamic_operator, holonomy_operator
from .linalg import dagger, frobenius
from .propagation import FrameTrajectory, TimeGrid, check_cyclic, propagate_frame

__all__ = [
    "HolonomicVerdict",
    "Composition",
    "AAPhase",
    "AdiabaticDiagnostic",
    "purely_holonomic_check",
    "join_trajectories",
    "compose_segments",
    "run_segments",
    "aa_phase",
    "adiabatic_diagnostic",
]

# |tr D^dagger| below which the global phase is undefined
_TRACE_FLOOR = 1e-9


@dataclass(frozen=True)
class HolonomicVerdict:
    """
    Whether D^dagger(T) is a global phase, D^dagger(T) = exp(i alpha) 1.

    Attributes
    ----------
    is_purely_holonomic : bool
        residual <= tolerance

    alpha : float
        global phase in (-pi, pi]; nan when undefined

    residual : float
        ||D^dagger(T) - exp(i alpha) 1||_F

    tolerance : float

    alpha_defined : bool
        False when |tr D^dagger(T)| <= 1e-9
    """

    is_purely_holonomic: bool
    alpha: float
    residual: float
    tolerance: float
    alpha_defined: bool = True

    def to_dict(self):
        doc = asdict(self)
        if not self.alpha_defined:
            doc["alpha"] = None
        return doc


def purely_holonomic_check(dynamic_T, tol=None):
    """
    Purely holonomic verdict from the dynamic matrix D(T).

    alpha = arg tr D^dagger(T).  A traceless D^dagger(T) cannot be a
    multiple of the identity; the verdict is then negative, alpha is nan
    and the residual is taken with alpha = 0.

    Parameters
    ----------
    dynamic_T : complex array (l, l)
        D(T), unitary

    tol : float, optional
        default ``conf.holonomic_tol``

    Returns
    -------
    verdict : HolonomicVerdict

    Raises
    ------
    ValidationError
        D(T) not unitary within 1e-7
    """
    if tol is None:
        tol = float(conf.holonomic_tol)
    dynamic_T = np.asarray(dynamic_T, dtype=np.complex128)
    size = dynamic_T.shape[-1]
    identity = np.identity(size)
    if frobenius(dagger(dynamic_T) @ dynamic_T - identity) > 1e-7:
        raise ValidationError("D(T) is not unitary")
    adjoint = dagger(dynamic_T)
    trace = np.trace(adjoint)
    if abs(trace) <= _TRACE_FLOOR:
        residual = float(frobenius(adjoint - identity))
        return HolonomicVerdict(False, float("nan"), residual, tol, alpha_defined=False)
    alpha = reduce_phase(np.angle(trace))
    residual = float(frobenius(adjoint - np.exp(1j * alpha) * identity))
    return HolonomicVerdict(bool(residual <= tol), alpha, residual, tol)


def join_trajectories(first, second):
    """
    One trajectory from two consecutive segments with the same step.

    Raises
    ------
    PreconditionError
        different steps, or the second segment does not start on the final
        frame of the first within 1e-7
    """
    if abs(first.grid.step - second.grid.step) > 1e-12 * first.grid.step:
        raise PreconditionError("segments must use the same time step")
    if first.dim != second.dim or first.rank != second.rank:
        raise PreconditionError("segments have frames of different shape")
    mismatch = frobenius(second.initial_frame - first.final_frame)
    if mismatch > 1e-7:
        raise PreconditionError(
            "second segment does not start on the final frame of the first "
            "(||psi_2(0) - psi_1(T_1)||_F = %.3e)" % mismatch
        )
    grid = TimeGrid(
        first.grid.duration + second.grid.duration, first.grid.steps + second.grid.steps
    )
    frames = np.concatenate((first.frames, second.frames[1:]))
    projectors = np.concatenate((first.projectors, second.projectors[1:]))
    return FrameTrajectory(
        grid=grid,
        frames=frames,
        projectors=projectors,
        hamiltonians=np.concatenate((first.hamiltonians, second.hamiltonians[1:])),
        midpoint_hamiltonians=np.concatenate(
            (first.midpoint_hamiltonians, second.midpoint_hamiltonians)
        ),
        cyclicity_defect=float(frobenius(projectors[-1] - projectors[0])),
    )


class Composition(NamedTuple):
    """
    Output of `compose_segments`.

    Attributes
    ----------
    residual : float
        ||D^dagger(T_1 + T_2) - D^dagger(T_1 + T_2; T_1) D^dagger(T_1)||_F with
        D(T_1 + T_2) from the single run over both segments

    verdict : HolonomicVerdict
        purely holonomic check of the total D

    dynamic_total : complex array (l, l)
        D(T_1) D(T_1 + T_2; T_1)

    segments : tuple of complex arrays (l, l)
        D(T_1) and D(T_1 + T_2; T_1)

    frame_residual : float
        largest ||psi(t_k) - psi_joined(t_k)||_F between the single run and
        the joined segments
    """

    residual: float
    verdict: HolonomicVerdict
    dynamic_total: np.ndarray
    segments: tuple
    frame_residual: float


def compose_segments(first, second, whole, tol=None):
    """
    Compose the dynamic parts of two consecutive segments.

    The reverse-time-ordered products satisfy
    D(T_1 + T_2) = D(T_1) D(T_1 + T_2; T_1), so the dynamic contributions of
    two segments can cancel.  The product is checked against the dynamic
    matrix of ``whole``, an independent run over [0, T_1 + T_2].

    Parameters
    ----------
    first, second : FrameTrajectory
        segments on [0, T_1] and [T_1, T_1 + T_2]

    whole : FrameTrajectory
        single run from psi_1(0) on the joined grid

    tol : float, optional
        verdict tolerance, default ``conf.holonomic_tol``

    Returns
    -------
    composition : Composition

    Raises
    ------
    PreconditionError
        different steps, frame mismatch at T_1, or ``whole`` not on the
        joined grid or not started on psi_1(0)
    """
    joined = join_trajectories(first, second)
    if whole.grid.steps != joined.grid.steps or not np.isclose(
        whole.grid.duration, joined.grid.duration, rtol=1e-12, atol=0.0
    ):
        raise PreconditionError("single run does not cover the joined segments")
    if whole.dim != joined.dim or whole.rank != joined.rank:
        raise PreconditionError("single run has frames of different shape")
    if frobenius(whole.initial_frame - first.initial_frame) > 1e-7:
        raise PreconditionError("single run does not start on the first segment's frame")
    dynamic_first = dynamic_operator(first).matrices[-1]
    dynamic_second = dynamic_operator(second).matrices[-1]
    total = dynamic_first @ dynamic_second
    direct = dynamic_operator(whole).matrices[-1]
    residual = float(frobenius(dagger(direct) - dagger(dynamic_second) @ dagger(dynamic_first)))
    frame_residual = float(np.max(frobenius(whole.frames - joined.frames)))
    verdict = purely_holonomic_check(total, tol)
    log.debug(
        "segment composition residual %.3e, frame residual %.3e" % (residual, frame_residual)
    )
    return Composition(residual, verdict, total, (dynamic_first, dynamic_second), frame_residual)


def run_segments(first, second, frame0, steps, tol=None):
    """
    Propagate two Hamiltonian segments and their concatenation, and compose.

    Segment 2 starts on the final frame of segment 1.  The single run
    propagates ``first.concatenated(second)`` from ``frame0``.

    Parameters
    ----------
    first, second : HamiltonianSpec
        segments with durations T_1 and T_2

    frame0 : Frame

    steps : tuple of int
        (N_1, N_2); T_1 / N_1 must equal T_2 / N_2

    tol : float, optional
        verdict tolerance

    Returns
    -------
    composition : Composition
    """
    if first.duration is None or second.duration is None:
        raise ValidationError("segments need Hamiltonians with a duration")
    first_steps, second_steps = steps
    grids = TimeGrid(first.duration, first_steps), TimeGrid(second.duration, second_steps)
    if abs(grids[0].step - grids[1].step) > 1e-12 * grids[0].step:
        raise PreconditionError("segments must use the same time step")
    segment = propagate_frame(first, frame0, grids[0])
    following = propagate_frame(second, segment.frame(-1), grids[1])
    whole = propagate_frame(
        first.concatenated(second),
        frame0,
        TimeGrid(first.duration + second.duration, first_steps + second_steps),
    )
    return compose_segments(segment, following, whole, tol)


class AAPhase(NamedTuple):
    """
    Phases of a cyclic ray [rad].

    Attributes
    ----------
    total : float
        arg <psi(0)|psi(T)>

    dynamic : float
        -int <psi|H|psi> dt

    geometric : float
        total - dynamic in (-pi, pi]

    holonomy_phase : float
        arg Gamma(T) of the 1 x 1 holonomy

    phase_mismatch : float
        |exp(i geometric) - exp(i holonomy_phase)|

    consistent : bool
        phase_mismatch within the tolerance
    """

    total: float
    dynamic: float
    geometric: float
    holonomy_phase: float
    phase_mismatch: float
    consistent: bool


def aa_phase(traj, cyclic_tol=None, tol=None):
    """
    Geometric phase of a cyclic state vector.

        gamma = arg <psi(0)|psi(T)> + int_0^T <psi(t)|H(t)|psi(t)> dt

    with the integral by the midpoint rule.  The phase is cross-checked
    against arg Gamma(T) of the holonomy operator; a mismatch above ``tol``
    emits a HolonomyWarning.

    Parameters
    ----------
    traj : FrameTrajectory
        l = 1

    cyclic_tol : float, optional
        default ``conf.cyclic_tol``

    tol : float, optional
        cross-check tolerance, default ``conf.residual_tol``

    Returns
    -------
    phases : AAPhase

    Raises
    ------
    PreconditionError
        l != 1 or a non-cyclic evolution
    """
    if traj.rank != 1:
        raise PreconditionError("geometric phase of a ray needs l = 1, got l = %d" % traj.rank)
    if not check_cyclic(traj, cyclic_tol):
        raise PreconditionError(
            "geometric phase needs a cyclic ray, ||P(T) - P(0)||_F = %.3e"
            % traj.cyclicity_defect
        )
    states = traj.frames[:-1, :, 0]
    energies = np.einsum(
        "ki,kij,kj->k", np.conj(states), traj.midpoint_hamiltonians, states
    ).real
    total = float(np.angle(np.vdot(traj.initial_frame[:, 0], traj.final_frame[:, 0])))
    dynamic = -float(np.sum(energies)) * traj.grid.step
    geometric = reduce_phase(total - dynamic)
    frame0 = traj.initial_frame
    gamma_T = dagger(frame0) @ holonomy_operator(traj)[-1] @ frame0
    holonomy_phase = float(np.angle(gamma_T[0, 0]))
    if tol is None:
        tol = float(conf.residual_tol)
    mismatch = float(abs(np.exp(1j * geometric) - np.exp(1j * holonomy_phase)))
    consistent = mismatch <= tol
    if not consistent:
        _warn(
            "geometric phase %.6f and holonomy phase %.6f differ by %.3e"
            % (geometric, holonomy_phase, mismatch)
        )
    return AAPhase(total, dynamic, geometric, holonomy_phase, mismatch, consistent)


class AdiabaticDiagnostic(NamedTuple):
    """
    Output of `adiabatic_diagnostic`.

    Attributes
    ----------
    offdiag_max : float
        max_k max_ij |F_ij(t_k) + i E(t_k) delta_ij|

    reduction_residual : float
        ||U(T) - exp(-i int E dt) Gamma(T)||_F

    energy_integral : float
        int_0^T E dt

    levels : tuple of int
        indices of the tracked eigenvalues in the ascending spectrum
    """

    offdiag_max: float
    reduction_residual: float
    energy_integral: float
    levels: tuple


def _eigenspace_levels(hamiltonian, frame0):
    columns = frame0.columns
    block = dagger(columns) @ hamiltonian @ columns
    energy = float(np.mean(np.diag(block).real))
    if frobenius(hamiltonian @ columns - columns @ block) > 1e-8 or frobenius(
        block - energy * np.identity(frame0.rank)
    ) > 1e-8:
        raise PreconditionError("initial frame does not span an eigenspace of H(0)")
    values = np.linalg.eigvalsh(hamiltonian)
    matches = np.flatnonzero(np.abs(values - energy) <= 1e-8)
    if len(matches) != frame0.rank:
        raise PreconditionError(
            "initial frame spans %d of the %d levels at E = %g"
            % (frame0.rank, len(matches), energy)
        )
    return tuple(int(j) for j in matches)


def adiabatic_diagnostic(spec, frame0, grid, method="projector-product"):
    """
    Distance of an evolution from its adiabatic reduction.

    In the adiabatic limit F(t) = -i E(t) 1 and the evolution of the
    initial eigenspace is exp(-i int E dt) Gamma(T).  E(t) is the
    instantaneous eigenvalue tracked by its position in the ascending
    spectrum (the mean over the block for a degenerate eigenspace).

    Parameters
    ----------
    spec : HamiltonianSpec

    frame0 : Frame
        orthonormal basis of an eigenspace of H(0)

    grid : TimeGrid

    Returns
    -------
    diagnostic : AdiabaticDiagnostic

    Raises
    ------
    PreconditionError
        frame0 is not an eigenspace of H(0)
    TrackingError
        the tracked levels come within 1e-8 of a neighbouring level
    """
    levels = _eigenspace_levels(eval_hamiltonian(spec, 0.0), frame0)
    lowest, highest = levels[0], levels[-1]
    traj = propagate_frame(spec, frame0, grid)

    energies = {}
    for label, hamiltonians in (
        ("nodes", traj.hamiltonians),
        ("midpoints", traj.midpoint_hamiltonians),
    ):
        values = np.linalg.eigvalsh(hamiltonians)
        gaps = []
        if lowest > 0:
            gaps.append(values[:, lowest] - values[:, lowest - 1])
        if highest < values.shape[1] - 1:
            gaps.append(values[:, highest + 1] - values[:, highest])
        if gaps and np.min(gaps) < 1e-8:
            raise TrackingError(
                "tracked level meets a neighbouring level (gap %.3e)" % np.min(gaps)
            )
        energies[label] = np.mean(values[:, lowest: highest + 1], axis=1)

    dynamic = dynamic_operator(traj)
    identity = np.identity(traj.rank)
    deviation = dynamic.F + 1j * energies["nodes"][:, None, None] * identity
    offdiag_max = float(np.max(np.abs(deviation)))

    energy_integral = float(np.sum(energies["midpoints"]) * grid.step)
    columns = frame0.columns
    gamma_T = dagger(columns) @ holonomy_operator(traj, method)[-1] @ columns
    evolution_T = dagger(columns) @ traj.final_frame
    residual = float(frobenius(evolution_T - np.exp(-1j * energy_integral) * gamma_T))
    log.debug(
        "adiabatic diagnostic: max |F + iE| = %.3e, reduction residual %.3e"
        % (offdiag_max, residual)
    )
    return AdiabaticDiagnostic(offdiag_max, residual, energy_integral, levels)
