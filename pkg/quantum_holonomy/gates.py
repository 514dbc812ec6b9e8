# -*- coding: utf-8 -*-
"""
Purely holonomic single-qubit gates driven by one-parameter Hamiltonians

    H(t) = omega(t) Hc

with a constant Hermitian 3 x 3 matrix Hc.  The qubit is the
two-dimensional subspace orthogonal to an auxiliary state psi_0; the gate
depends on omega only through the pulse area theta_T = int omega dt.
"""
import dataclasses
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg

from astropy import log
from astropy.table import Table

from .coefficients import Constant
from .hamiltonian import HamiltonianSpec, spectral_decompose
from .helpers import (
    InfeasibleDesignError,
    TrivialGateWarning,
    ValidationError,
    _warn,
    default_steps,
    reduce_phase,
)
from .linalg import Frame, dagger, expm_antihermitian, frobenius
from .propagation import TimeGrid
from .scenario import Scenario, matrix_to_dict

__all__ = [
    "GateDesign",
    "A0Branch",
    "design_one_parameter_gate",
    "design_population",
    "feasibility_table",
    "a0_branch_diagnostic",
    "verify_gate_design",
]

# smallest accepted eigenvalue gap of Hc
_LEVEL_GAP = 1e-8


def _levels(hamiltonian, reference_level):
    decomposition = spectral_decompose(hamiltonian)
    values = decomposition.eigenvalues
    vectors = decomposition.eigenvectors.columns
    if len(values) != 3:
        raise ValidationError("gate design needs a 3 x 3 Hamiltonian")
    if np.min(np.diff(values)) <= _LEVEL_GAP:
        raise ValidationError(
            "gate design needs three distinct energies, got %s" % np.array2string(values)
        )
    if reference_level not in (0, 1, 2):
        raise ValidationError("reference_level must be 0, 1 or 2")
    others = [k for k in range(3) if k != reference_level]
    order = [reference_level] + others
    energies = values[order] - values[reference_level]
    return energies, vectors[:, order]


def design_population(energies, N, m):
    """
    |a_1|^2 = m/N - E_1/(E_2 - E_1) of the (N, m) design.

    Parameters
    ----------
    energies : sequence of 3 floats
        (E_0 = 0, E_1, E_2)

    N : int
        nonzero winding number

    m : int
        branch of the dynamic phase

    Returns
    -------
    population : float
    """
    if N == 0:
        raise ValidationError("N = 0 gives a trivial evolution")
    _, e1, e2 = energies
    if e1 == e2:
        raise ValidationError("E_1 = E_2 gives a trivial holonomy")
    return m / N - e1 / (e2 - e1)


@dataclass(frozen=True, eq=False)
class GateDesign:
    """
    One-parameter-Hamiltonian gate.

    Attributes
    ----------
    energies : float array (3,)
        (E_0 = 0, E_1, E_2) after the shift of the reference level to zero

    eigenvectors : complex array (3, 3)
        (v_0, v_1, v_2) as columns

    reference_level : int
        index of E_0 in the ascending spectrum of Hc

    N, m : int
        winding number and dynamic-phase branch

    population : float
        |a_1|^2

    phase_a1, phase_a2 : float
        phases of a_1, a_2 [rad]

    theta_T : float
        pulse area int omega dt [rad]

    auxiliary_state : complex array (3,)
        psi_0 = a_1 v_1 + a_2 v_2

    scenario : Scenario
        Hamiltonian omega(t) (Hc - E_ref 1) with frame (v_0, a_2* v_1 - a_1* v_2)

    predicted_U : complex array (2, 2)
        diag(1, exp(-2 pi i N E_1 / (E_2 - E_1)))

    flags : tuple of str
    """

    energies: np.ndarray
    eigenvectors: np.ndarray
    reference_level: int
    N: int
    m: int
    population: float
    phase_a1: float
    phase_a2: float
    theta_T: float
    auxiliary_state: np.ndarray
    scenario: Scenario
    predicted_U: np.ndarray
    profile: object = None
    flags: tuple = ()

    @property
    def is_trivial(self):
        return "trivial-gate" in self.flags

    def to_dict(self):
        """
        Design parameters as stored in the ``design`` block of a scenario.
        """
        return {
            "energies": [float(e) for e in self.energies],
            "reference_level": self.reference_level,
            "N": self.N,
            "m": self.m,
            "population": self.population,
            "phase_a1": self.phase_a1,
            "phase_a2": self.phase_a2,
            "theta_T": self.theta_T,
            "predicted_U": matrix_to_dict(self.predicted_U),
            "flags": list(self.flags),
        }

    def detuned(self, area_factor=1.0, population_shift=1.0):
        """
        Negative control with a mis-set pulse area or population.

        Scaling the pulse area breaks the cyclicity of the qubit subspace;
        scaling |a_1|^2 keeps the evolution cyclic but leaves a dynamic
        phase.  The predicted gate of the original design is kept.

        Parameters
        ----------
        area_factor : float
            theta_T -> area_factor * theta_T

        population_shift : float
            |a_1|^2 -> population_shift * |a_1|^2

        Returns
        -------
        design : GateDesign

        Raises
        ------
        InfeasibleDesignError
            shifted population outside (0, 1)
        """
        population = self.population * population_shift
        if not 0.0 < population < 1.0:
            raise InfeasibleDesignError(
                "detuned population %g is outside (0, 1)" % population,
                N=self.N,
                m=self.m,
                population=population,
            )
        frame, auxiliary = _qubit_frame(
            self.eigenvectors, population, self.phase_a1, self.phase_a2
        )
        (coefficient, matrix), = self.scenario.hamiltonian.terms
        hamiltonian = HamiltonianSpec(
            [(coefficient.scaled(area_factor), matrix)], self.scenario.duration
        )
        design = self.to_dict()
        design["detuned"] = {
            "area_factor": float(area_factor),
            "population_shift": float(population_shift),
        }
        scenario = dataclasses.replace(
            self.scenario,
            hamiltonian=hamiltonian,
            frame0=frame,
            design=design,
            name=(self.scenario.name or "gate") + "-detuned",
        )
        return dataclasses.replace(
            self,
            population=population,
            theta_T=self.theta_T * area_factor,
            auxiliary_state=auxiliary,
            scenario=scenario,
            flags=self.flags + ("detuned",),
        )


def _qubit_frame(eigenvectors, population, phase_a1, phase_a2):
    a1 = np.sqrt(population) * np.exp(1j * phase_a1)
    a2 = np.sqrt(1.0 - population) * np.exp(1j * phase_a2)
    v0, v1, v2 = eigenvectors.T
    columns = np.stack((v0, np.conj(a2) * v1 - np.conj(a1) * v2), axis=1)
    return Frame(columns), a1 * v1 + a2 * v2


def design_one_parameter_gate(
    hamiltonian,
    N,
    m,
    phase_a1=0.0,
    phase_a2=0.0,
    profile=None,
    duration=1.0,
    reference_level=0,
    steps=None,
):
    """
    Purely holonomic gate for H(t) = omega(t) Hc.

    The spectrum of Hc is shifted so that the reference level is E_0 = 0.
    The qubit subspace returns to itself when (E_2 - E_1) theta_T = 2 pi N
    and the dynamic phase vanishes when
    |a_1|^2 = m/N - E_1/(E_2 - E_1) lies in (0, 1).  The gate is then

        U(T) = Gamma(T) = diag(1, exp(-2 pi i N E_1 / (E_2 - E_1)))

    in the basis (v_0, a_2* v_1 - a_1* v_2).

    Parameters
    ----------
    hamiltonian : complex array (3, 3)
        Hc, Hermitian with three distinct eigenvalues

    N : int
        nonzero winding number

    m : int
        dynamic-phase branch; m = 0 gives parallel transport, F = 0

    phase_a1, phase_a2 : float
        free phases of a_1, a_2 [rad]

    profile : coefficient model, optional
        pulse shape omega(t), rescaled to the area theta_T; constant by
        default

    duration : float
        T

    reference_level : int
        index of the eigenvalue of Hc taken as E_0

    steps : int, optional
        grid steps of the generated scenario

    Returns
    -------
    design : GateDesign

    Raises
    ------
    ValidationError
        N = 0, degenerate spectrum, or a profile of zero area
    InfeasibleDesignError
        |a_1|^2 not in (0, 1)
    """
    if int(N) != N or int(m) != m:
        raise ValidationError("N and m must be integers")
    N, m = int(N), int(m)
    if N == 0:
        raise ValidationError("N = 0 gives a trivial U(T) and Gamma(T)")
    hamiltonian = np.asarray(hamiltonian, dtype=np.complex128)
    energies, eigenvectors = _levels(hamiltonian, reference_level)
    _, e1, e2 = energies
    population = design_population(energies, N, m)
    if not 0.0 < population < 1.0:
        raise InfeasibleDesignError(
            "(N, m) = (%d, %d) is infeasible: |a1|^2 = m/N - E1/(E2 - E1) = %g "
            "is not in (0, 1)" % (N, m, population),
            N=N,
            m=m,
            population=population,
        )
    theta_T = 2.0 * np.pi * N / (e2 - e1)

    if profile is None:
        profile = Constant(value=1.0)
    if not hasattr(profile, "scaled"):
        raise ValidationError("pulse profile must support scaling")
    area = profile.area(0.0, duration)
    if abs(area) <= 1e-12:
        raise ValidationError("pulse profile has zero area on [0, T]")
    omega = profile.scaled(theta_T / area)

    reference = spectral_decompose(hamiltonian).eigenvalues[reference_level]
    shifted = hamiltonian - reference * np.identity(3)
    frame, auxiliary = _qubit_frame(eigenvectors, population, phase_a1, phase_a2)
    phase = reduce_phase(-2.0 * np.pi * N * e1 / (e2 - e1))
    predicted = np.diag([1.0, np.exp(1j * phase)]).astype(np.complex128)

    flags = ()
    if abs(np.exp(1j * phase) - 1.0) <= 1e-9:
        flags = ("trivial-gate",)
        _warn(
            "design (N, m) = (%d, %d) is valid but its gate is the identity" % (N, m),
            TrivialGateWarning,
        )

    design = GateDesign(
        energies=energies,
        eigenvectors=eigenvectors,
        reference_level=reference_level,
        N=N,
        m=m,
        population=float(population),
        phase_a1=float(phase_a1),
        phase_a2=float(phase_a2),
        theta_T=float(theta_T),
        auxiliary_state=auxiliary,
        scenario=None,
        predicted_U=predicted,
        profile=omega,
        flags=flags,
    )
    scenario = Scenario(
        hamiltonian=HamiltonianSpec([(omega, shifted)], duration),
        frame0=frame,
        grid=TimeGrid(duration, default_steps() if steps is None else steps),
        design=design.to_dict(),
        name="gate-N%d-m%d" % (N, m),
    )
    log.debug(
        "gate design N=%d m=%d: |a1|^2 = %.6g, theta_T = %.6g" % (N, m, population, theta_T)
    )
    return dataclasses.replace(design, scenario=scenario)


def feasibility_table(energies, n_range=range(-3, 4), m_range=range(-3, 4)):
    """
    Feasibility of the (N, m) designs for a spectrum (E_0 = 0, E_1, E_2).

    Parameters
    ----------
    energies : sequence of 3 floats

    n_range, m_range : iterables of int
        N = 0 is skipped

    Returns
    -------
    table : astropy.table.Table
        columns N, m, population, feasible
    """
    rows = []
    for N in n_range:
        if N == 0:
            continue
        for m in m_range:
            population = design_population(energies, N, m)
            rows.append((N, m, population, bool(0.0 < population < 1.0)))
    return Table(rows=rows, names=("N", "m", "population", "feasible"))


class A0Branch(NamedTuple):
    """
    Output of `a0_branch_diagnostic`.

    Attributes
    ----------
    cyclicity_defect : float
        ||P(T) - P(0)||_F of the qubit subspace

    trivial_residual : float
        ||U(T) - exp(i beta) 1||_F with beta = arg tr U(T)

    evolution_T : complex array (2, 2)
    """

    cyclicity_defect: float
    trivial_residual: float
    evolution_T: np.ndarray


def a0_branch_diagnostic(hamiltonian, amplitudes, theta_T, reference_level=0):
    """
    Qubit evolution when the auxiliary state has a v_0 component.

    With psi_0 = a_0 v_0 + a_1 v_1 + a_2 v_2 and a_0 != 0 the qubit
    subspace is cyclic only when exp(-i E_1 theta_T) = exp(-i E_2 theta_T)
    = 1, and then U(T) is a multiple of the identity.

    Parameters
    ----------
    hamiltonian : complex array (3, 3)

    amplitudes : sequence of 3 complex
        (a_0, a_1, a_2), normalized here

    theta_T : float
        pulse area [rad]

    Returns
    -------
    diagnostic : A0Branch
    """
    energies, eigenvectors = _levels(np.asarray(hamiltonian, dtype=np.complex128), reference_level)
    amplitudes = np.asarray(amplitudes, dtype=np.complex128)
    norm = np.linalg.norm(amplitudes)
    if amplitudes.shape != (3,) or norm == 0.0:
        raise ValidationError("amplitudes must be three numbers, not all zero")
    auxiliary = eigenvectors @ (amplitudes / norm)
    # orthonormal basis of the complement of psi_0
    frame = scipy.linalg.null_space(np.conj(auxiliary)[None, :])
    shifted = eigenvectors @ np.diag(energies) @ dagger(eigenvectors)
    propagator = expm_antihermitian(-1j * theta_T * shifted)
    final = propagator @ frame
    defect = float(frobenius(final @ dagger(final) - frame @ dagger(frame)))
    evolution = dagger(frame) @ final
    trace = np.trace(evolution)
    beta = np.angle(trace) if abs(trace) > 1e-9 else 0.0
    residual = float(frobenius(evolution - np.exp(1j * beta) * np.identity(2)))
    return A0Branch(defect, residual, evolution)


def verify_gate_design(design, grid=None, method="projector-product", schedule="linear"):
    """
    Run the separation pipeline on a design and compare with its gate.

    Parameters
    ----------
    design : GateDesign

    grid : TimeGrid, optional
        overrides the grid of the design scenario

    Returns
    -------
    report : SeparationReport
        with a ``gate`` block holding the predicted gate, the distance of
        U(T) from it up to a global phase and whether it is within 1e-5
    """
    from .report import run_separation

    scenario = design.scenario
    if grid is not None:
        if abs(grid.duration - scenario.duration) > 1e-12 * max(1.0, grid.duration):
            raise ValidationError("grid duration differs from the design duration")
        scenario = scenario.with_steps(grid.steps)
    report = run_separation(scenario, method=method, schedule=schedule)
    gate = {"predicted_U": matrix_to_dict(design.predicted_U)}
    if report.evolution_T is None:
        gate.update({"residual": None, "matches": False})
    else:
        evolution = report.evolution_T
        overlap = np.trace(dagger(design.predicted_U) @ evolution)
        phase = np.angle(overlap) if abs(overlap) > 1e-9 else 0.0
        residual = float(frobenius(evolution - np.exp(1j * phase) * design.predicted_U))
        gate.update({"residual": residual, "matches": bool(residual <= 1e-5)})
    flags = tuple(flag for flag in design.flags if flag not in report.flags)
    return dataclasses.replace(report, gate=gate, flags=report.flags + flags)
