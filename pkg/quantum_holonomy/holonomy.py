# -*- coding: utf-8 -*-
"""
Separation of the evolution of a subspace into holonomy and dynamic parts.

For a frame trajectory psi(t) (d x l, Schroedinger evolved) the evolution
operator on the subspace factorizes as

    U(t) = Gamma(t) D(t)

with the holonomy operator Gamma(t) (parallel transport of the initial
subspace along the path of projectors P(t)) and the dynamic operator D(t),
the reverse-time-ordered exponential of F_ij = -i <psi_i|H|psi_j>.

Operators on the full space are d x d arrays; matrices in a frame basis are
l x l arrays.  Time samples are stacked along the first axis.
"""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from astropy import log

from . import conf
from .helpers import (
    BranchCutWarning,
    PreconditionError,
    ValidationError,
    _check_finite,
    _warn,
)
from .linalg import (
    dagger,
    expm_antihermitian,
    expm_hermitian,
    frobenius,
    logm_unitary_principal,
    polar_unitary_factor,
)
from .propagation import check_cyclic

__all__ = [
    "HOLONOMY_METHODS",
    "GAUGE_SCHEDULES",
    "OperatorTrajectory",
    "DynamicEvolution",
    "GaugeFrame",
    "MatrixForms",
    "InseparableForm",
    "evolution_operator",
    "projector_derivative",
    "holonomy_operator",
    "dynamic_operator",
    "dynamic_operator_adjoint",
    "operator_trajectory",
    "separation_residual",
    "build_gauge_frame",
    "connection_matrix",
    "matrix_holonomy",
    "ordered_exponential",
    "matrix_forms",
    "theorem2_check",
    "route_equivalence_residual",
    "parallel_transport_residual",
    "inseparable_form_diagnostic",
]

HOLONOMY_METHODS = ("projector-product", "midpoint-ode")


def _linear(s):
    return s, np.ones_like(s)


def _smoothstep(s):
    return 3.0 * s**2 - 2.0 * s**3, 6.0 * s - 6.0 * s**2


# g(s) and dg/ds on s = t/T in [0, 1]
GAUGE_SCHEDULES = {"linear": _linear, "smoothstep": _smoothstep}


def _antihermitian_part(matrix):
    return 0.5 * (matrix - dagger(matrix))


def ordered_exponential(generators, step, later="left"):
    """
    Ordered product of single-step exponentials exp(h M_k).

    Parameters
    ----------
    generators : complex array (n, l, l)
        anti-Hermitian samples M_0 ... M_{n-1}, usually at midpoints

    step : float
        h

    later : {"left", "right"}
        "left" gives the time-ordered exp(h M_{n-1}) ... exp(h M_0);
        "right" gives the reverse-time-ordered exp(h M_0) ... exp(h M_{n-1})

    Returns
    -------
    partial : complex array (n+1, l, l)
        products over the first k factors, partial[0] = 1
    """
    if later not in ("left", "right"):
        raise ValidationError('later must be "left" or "right"')
    generators = np.asarray(generators, dtype=np.complex128)
    factors = expm_antihermitian(step * _antihermitian_part(generators))
    size = generators.shape[-1]
    partial = np.empty((len(generators) + 1, size, size), dtype=np.complex128)
    partial[0] = np.identity(size)
    for k, factor in enumerate(factors):
        if later == "left":
            partial[k + 1] = factor @ partial[k]
        else:
            partial[k + 1] = partial[k] @ factor
    return partial


@dataclass(frozen=True, eq=False)
class OperatorTrajectory:
    """
    Evolution, holonomy and dynamic operators sampled at the grid nodes.

    Attributes
    ----------
    grid : TimeGrid

    evolution : complex array (N+1, d, d)
        U(t_k) restricted to the initial subspace

    holonomy : complex array (N+1, d, d)
        Gamma(t_k)

    dynamic : complex array (N+1, d, d)
        D(t_k)

    initial_projector : complex array (d, d)
        P(0)

    method : str
        holonomy method
    """

    grid: object
    evolution: np.ndarray
    holonomy: np.ndarray
    dynamic: np.ndarray
    initial_projector: np.ndarray
    method: str = "projector-product"

    def partial_isometry_defect(self, projectors):
        """
        Largest of ||Gamma^dagger Gamma - P(0)||_F and ||(1 - P(t)) Gamma||_F.
        """
        gram = dagger(self.holonomy) @ self.holonomy - self.initial_projector
        leak = self.holonomy - projectors @ self.holonomy
        return float(max(np.max(frobenius(gram)), np.max(frobenius(leak))))

    def support_defect(self):
        """
        Largest ||X (1 - P(0))||_F of the evolution and dynamic operators.
        """
        complement = np.identity(self.initial_projector.shape[0]) - self.initial_projector
        return float(
            max(
                np.max(frobenius(self.evolution @ complement)),
                np.max(frobenius(self.dynamic @ complement)),
            )
        )


class DynamicEvolution(NamedTuple):
    """
    Output of `dynamic_operator`.

    Attributes
    ----------
    operator : complex array (N+1, d, d)
        D(t_k) embedded on the initial frame

    matrices : complex array (N+1, l, l)
        D(t_k)

    F : complex array (N+1, l, l)
        F(t_k) at the nodes

    F_mid : complex array (N, l, l)
        F at the midpoints, the samples used in the products
    """

    operator: np.ndarray
    matrices: np.ndarray
    F: np.ndarray
    F_mid: np.ndarray


def evolution_operator(traj):
    """
    Evolution operator on the subspace, U(t_k) = sum_j |psi_j(t_k)><psi_j(0)|.

    Parameters
    ----------
    traj : FrameTrajectory

    Returns
    -------
    evolution : complex array (N+1, d, d)
    """
    return traj.frames @ dagger(traj.initial_frame)[None, :, :]


def _commutator_derivative(hamiltonians, projectors):
    derivative = -1j * (hamiltonians @ projectors - projectors @ hamiltonians)
    return 0.5 * (derivative + dagger(derivative))


def projector_derivative(traj):
    """
    Time derivative of the projector, dP/dt = -i [H, P], at the grid nodes.

    Parameters
    ----------
    traj : FrameTrajectory

    Returns
    -------
    derivative : complex array (N+1, d, d)
        Hermitian matrices
    """
    return _commutator_derivative(traj.hamiltonians, traj.projectors)


def _projector_product_links(traj):
    # overlap of consecutive frames, O_k = psi_{k+1}^dagger psi_k
    return dagger(traj.frames[1:]) @ traj.frames[:-1]


def _midpoint_ode_links(traj):
    step = traj.grid.step
    hamiltonians = traj.midpoint_hamiltonians
    half_steps = expm_antihermitian(-0.5j * step * hamiltonians)
    half_frames = half_steps @ traj.frames[:-1]
    projectors = half_frames @ dagger(half_frames)
    derivative = _commutator_derivative(hamiltonians, projectors)
    transport = expm_hermitian(step * derivative)
    return dagger(traj.frames[1:]) @ transport @ traj.frames[:-1]


def _holonomy_cores(traj, method, reunitarize_every):
    if method not in HOLONOMY_METHODS:
        raise ValidationError(
            "unknown holonomy method %r, expected one of %s"
            % (method, ", ".join(HOLONOMY_METHODS))
        )
    if reunitarize_every is None:
        reunitarize_every = int(conf.reunitarize_every)
    if reunitarize_every < 1:
        raise ValidationError("reunitarize_every must be at least 1")
    if method == "projector-product":
        links = _projector_product_links(traj)
    else:
        links = _midpoint_ode_links(traj)
    # unpolarized links shrink by 1 - h^2 Var(H)/2 per step
    links = polar_unitary_factor(links)
    rank = traj.rank
    cores = np.empty((traj.grid.steps + 1, rank, rank), dtype=np.complex128)
    cores[0] = np.identity(rank)
    for k, link in enumerate(links):
        cores[k + 1] = link @ cores[k]
        if (k + 1) % reunitarize_every == 0:
            cores[k + 1] = polar_unitary_factor(cores[k + 1])
    _check_finite(cores, "holonomy cores")
    return cores


def holonomy_operator(traj, method="projector-product", reunitarize_every=None):
    """
    Holonomy operator Gamma(t_k) on the grid nodes.

    Gamma(t) = psi(t) C(t) psi(0)^dagger with an l x l core C.  The cores
    follow from link matrices between consecutive nodes:

    ``projector-product``
        Kato product P(t_k) ... P(t_1) P(0); the link is the overlap
        psi(t_{k+1})^dagger psi(t_k).

    ``midpoint-ode``
        midpoint step of dGamma/dt = (dP/dt) Gamma followed by the projection
        onto P(t_{k+1}); the link is
        psi(t_{k+1})^dagger exp(h dP/dt(t_k + h/2)) psi(t_k).

    Every link is replaced by its polar factor, which keeps the core
    unitary to second order in h.  The accumulated core is polar
    re-unitarized every ``reunitarize_every`` steps against round-off drift.

    Parameters
    ----------
    traj : FrameTrajectory

    method : {"projector-product", "midpoint-ode"}

    reunitarize_every : int, optional
        polar re-unitarization cadence of the core [steps]; default
        ``conf.reunitarize_every``

    Returns
    -------
    holonomy : complex array (N+1, d, d)
    """
    cores = _holonomy_cores(traj, method, reunitarize_every)
    return traj.frames @ cores @ dagger(traj.initial_frame)[None, :, :]


def _dynamic_matrices(traj):
    frames = traj.frames
    # exact for the midpoint frame exp(-i h/2 H) psi_k, which commutes with H
    f_mid = -1j * dagger(frames[:-1]) @ traj.midpoint_hamiltonians @ frames[:-1]
    f_nodes = -1j * dagger(frames) @ traj.hamiltonians @ frames
    return _antihermitian_part(f_nodes), _antihermitian_part(f_mid)


def dynamic_operator(traj):
    """
    Dynamic operator D(t_k) and the matrix F(t).

    F_ij = -i <psi_i(t)|H(t)|psi_j(t)>, symmetrized to exact
    anti-Hermiticity.  D is the reverse-time-ordered product

        D(t_k) = exp(h F_0) exp(h F_1) ... exp(h F_{k-1})

    of midpoint samples, embedded on the initial frame as
    psi(0) D psi(0)^dagger.

    Parameters
    ----------
    traj : FrameTrajectory

    Returns
    -------
    dynamic : DynamicEvolution
    """
    f_nodes, f_mid = _dynamic_matrices(traj)
    matrices = ordered_exponential(f_mid, traj.grid.step, later="right")
    frame0 = traj.initial_frame
    operator = frame0[None, :, :] @ matrices @ dagger(frame0)[None, :, :]
    return DynamicEvolution(operator, matrices, f_nodes, f_mid)


def dynamic_operator_adjoint(traj):
    """
    Adjoint of the dynamic operator as a time-ordered product.

        D^dagger(t_k) = exp(-h F_{k-1}) ... exp(-h F_0)

    Returns
    -------
    adjoint : complex array (N+1, d, d)
    """
    _, f_mid = _dynamic_matrices(traj)
    matrices = ordered_exponential(-f_mid, traj.grid.step, later="left")
    frame0 = traj.initial_frame
    return frame0[None, :, :] @ matrices @ dagger(frame0)[None, :, :]


def operator_trajectory(traj, method="projector-product"):
    """
    Evolution, holonomy and dynamic operators of a frame trajectory.

    Returns
    -------
    ops : OperatorTrajectory
    """
    ops = OperatorTrajectory(
        grid=traj.grid,
        evolution=evolution_operator(traj),
        holonomy=holonomy_operator(traj, method),
        dynamic=dynamic_operator(traj).operator,
        initial_projector=traj.projectors[0],
        method=method,
    )
    log.debug(
        "operator trajectory (%s): partial-isometry defect %.3e"
        % (method, ops.partial_isometry_defect(traj.projectors))
    )
    return ops


def separation_residual(ops):
    """
    Largest ||U(t_k) - Gamma(t_k) D(t_k)||_F over the grid nodes.

    Parameters
    ----------
    ops : OperatorTrajectory

    Returns
    -------
    residual : float

    Raises
    ------
    ValidationError
        operator samples on different grids
    """
    count = ops.grid.steps + 1
    shapes = {ops.evolution.shape, ops.holonomy.shape, ops.dynamic.shape}
    if len(shapes) != 1 or ops.evolution.shape[0] != count:
        raise ValidationError("operator samples are not on the same grid")
    residual = frobenius(ops.evolution - ops.holonomy @ ops.dynamic)
    return float(np.max(residual))


@dataclass(frozen=True, eq=False)
class GaugeFrame:
    """
    Closed basis phi(t) = psi(t) V(t) of the evolving subspace.

    V(t) = exp(g(t/T) L) with L = log U(T)^dagger, so that
    phi(T) = phi(0) = psi(0) for a cyclic evolution.

    Attributes
    ----------
    grid : TimeGrid

    phi_frames : complex array (N+1, d, l)

    V : complex array (N+1, l, l)

    generator : complex array (l, l)
        L, anti-Hermitian

    schedule : str
        name of the interpolation schedule g

    branch_shifted : bool
        the logarithm was taken on the shifted branch
    """

    grid: object
    phi_frames: np.ndarray
    V: np.ndarray
    generator: np.ndarray
    schedule: str
    branch_shifted: bool = False

    def closure_defect(self):
        """||phi(T) - phi(0)||_F"""
        return float(frobenius(self.phi_frames[-1] - self.phi_frames[0]))

    def gauge_at(self, times):
        """
        V(t) and dV/dt V^dagger = g'(t) L at arbitrary times.

        Returns
        -------
        V : complex array (n, l, l)
        rate : float array (n,)
            g'(t)
        """
        s = np.asarray(times, dtype=float) / self.grid.duration
        g, dg = GAUGE_SCHEDULES[self.schedule](s)
        V = expm_antihermitian(g[:, None, None] * self.generator[None, :, :])
        return V, dg / self.grid.duration


def _loop_unitary(traj):
    return polar_unitary_factor(dagger(traj.initial_frame) @ traj.final_frame)


def build_gauge_frame(traj, schedule="linear", cyclic_tol=None):
    """
    Gauge frame of a cyclic trajectory.

    Parameters
    ----------
    traj : FrameTrajectory

    schedule : {"linear", "smoothstep"}
        g(s) = s or g(s) = 3 s^2 - 2 s^3

    cyclic_tol : float, optional
        default ``conf.cyclic_tol``

    Returns
    -------
    gauge : GaugeFrame

    Raises
    ------
    PreconditionError
        the trajectory is not cyclic
    """
    if schedule not in GAUGE_SCHEDULES:
        raise ValidationError(
            "unknown gauge schedule %r, expected one of %s"
            % (schedule, ", ".join(GAUGE_SCHEDULES))
        )
    if not check_cyclic(traj, cyclic_tol):
        raise PreconditionError(
            "gauge frame needs a cyclic evolution, ||P(T) - P(0)||_F = %.3e"
            % traj.cyclicity_defect
        )
    loop = _loop_unitary(traj)
    principal = logm_unitary_principal(dagger(loop))
    generator = principal.generator
    if principal.near_branch_cut:
        shift = float(conf.branch_shift)
        generator = logm_unitary_principal(dagger(loop), shift=shift).generator
        _warn(
            "loop unitary has an eigenvalue at -1, logarithm taken on the "
            "branch (-pi + %g, pi + %g]" % (shift, shift),
            BranchCutWarning,
        )
    s = traj.grid.nodes / traj.grid.duration
    g, _ = GAUGE_SCHEDULES[schedule](s)
    V = expm_antihermitian(g[:, None, None] * generator[None, :, :])
    # g(1) = 1 exactly; the last sample then closes on psi(0)
    V[-1] = expm_antihermitian(generator)
    phi_frames = traj.frames @ V
    return GaugeFrame(
        grid=traj.grid,
        phi_frames=phi_frames,
        V=V,
        generator=generator,
        schedule=schedule,
        branch_shifted=principal.near_branch_cut,
    )


def connection_matrix(gauge, F, times=None):
    """
    Connection A_ij = <dphi_i/dt|phi_j> from the analytic gauge derivative.

        A(t) = dV^dagger/dt V - V^dagger F V = -g'(t) L - V^dagger F V

    Parameters
    ----------
    gauge : GaugeFrame

    F : complex array (n, l, l)
        F samples at the nodes (n = N+1) or at the midpoints (n = N)

    times : float array (n,), optional
        sample times of F; inferred from n when omitted

    Returns
    -------
    A : complex array (n, l, l)
        anti-Hermitian
    """
    F = np.asarray(F, dtype=np.complex128)
    if times is None:
        if len(F) == gauge.grid.steps + 1:
            times = gauge.grid.nodes
        elif len(F) == gauge.grid.steps:
            times = gauge.grid.midpoints
        else:
            raise ValidationError("F samples do not match the gauge grid")
    V, rate = gauge.gauge_at(times)
    A = -rate[:, None, None] * gauge.generator[None, :, :] - dagger(V) @ F @ V
    return _antihermitian_part(A)


def matrix_holonomy(A, grid):
    """
    Holonomy matrix Gamma(T) as the time-ordered product of exp(h A).

        Gamma(T) = exp(h A_{N-1}) ... exp(h A_1) exp(h A_0)

    Parameters
    ----------
    A : complex array (N, l, l) or (N+1, l, l)
        midpoint samples, or node samples whose neighbours are averaged

    grid : TimeGrid

    Returns
    -------
    gamma : complex array (l, l)
    """
    A = np.asarray(A, dtype=np.complex128)
    if len(A) == grid.steps + 1:
        A = 0.5 * (A[1:] + A[:-1])
    elif len(A) != grid.steps:
        raise ValidationError("connection samples do not match the grid")
    return ordered_exponential(A, grid.step, later="left")[-1]


@dataclass(frozen=True, eq=False)
class MatrixForms:
    """
    Matrices of a cyclic evolution in the initial-frame basis.

    Attributes
    ----------
    A, F, K : complex arrays (N+1, l, l)
        connection, dynamic generator and K = V^dagger F V at the nodes

    A_mid, F_mid, K_mid : complex arrays (N, l, l)
        midpoint samples used in the ordered products

    gamma_T : complex array (l, l)
        Gamma(T), time-ordered exponential of A

    dynamic_T : complex array (l, l)
        D(T), reverse-time-ordered exponential of F

    evolution_T : complex array (l, l)
        U(T) = psi(0)^dagger psi(T)

    schedule : str
        gauge schedule used for A

    cyclicity_defect : float
    """

    A: np.ndarray
    F: np.ndarray
    K: np.ndarray
    A_mid: np.ndarray
    F_mid: np.ndarray
    K_mid: np.ndarray
    gamma_T: np.ndarray
    dynamic_T: np.ndarray
    evolution_T: np.ndarray
    schedule: str
    cyclicity_defect: float


def matrix_forms(traj, gauge=None, schedule="linear", dynamic=None):
    """
    Gauge frame, connection and the cycle matrices U(T), Gamma(T), D(T).

    Parameters
    ----------
    traj : FrameTrajectory
        cyclic trajectory

    gauge : GaugeFrame, optional
        built with ``schedule`` when omitted

    dynamic : DynamicEvolution, optional
        reused when given

    Returns
    -------
    forms : MatrixForms
    """
    if gauge is None:
        gauge = build_gauge_frame(traj, schedule)
    if dynamic is None:
        dynamic = dynamic_operator(traj)
    grid = traj.grid
    A = connection_matrix(gauge, dynamic.F, grid.nodes)
    A_mid = connection_matrix(gauge, dynamic.F_mid, grid.midpoints)
    V_nodes = gauge.V
    V_mid, _ = gauge.gauge_at(grid.midpoints)
    K = dagger(V_nodes) @ dynamic.F @ V_nodes
    K_mid = dagger(V_mid) @ dynamic.F_mid @ V_mid
    gamma_T = matrix_holonomy(A_mid, grid)
    forms = MatrixForms(
        A=A,
        F=dynamic.F,
        K=K,
        A_mid=A_mid,
        F_mid=dynamic.F_mid,
        K_mid=K_mid,
        gamma_T=gamma_T,
        dynamic_T=dynamic.matrices[-1],
        evolution_T=dagger(traj.initial_frame) @ traj.final_frame,
        schedule=gauge.schedule,
        cyclicity_defect=traj.cyclicity_defect,
    )
    _check_finite(gamma_T, "Gamma(T)")
    return forms


def theorem2_check(forms, cyclic_tol=None):
    """
    ||U(T) - Gamma(T) D(T)||_F of a cyclic evolution.

    Raises
    ------
    PreconditionError
        the evolution is not cyclic
    """
    if cyclic_tol is None:
        cyclic_tol = float(conf.cyclic_tol)
    if forms.cyclicity_defect > cyclic_tol:
        raise PreconditionError("cycle matrices need a cyclic evolution")
    return float(frobenius(forms.evolution_T - forms.gamma_T @ forms.dynamic_T))


def route_equivalence_residual(forms, holonomy, initial_frame):
    """
    ||Gamma(T) - psi(0)^dagger Gamma_op(T) psi(0)||_F between the
    connection-matrix route and the holonomy operator.
    """
    projected = dagger(initial_frame) @ holonomy[-1] @ initial_frame
    return float(frobenius(forms.gamma_T - projected))


def parallel_transport_residual(holonomy, grid):
    """
    Discrete parallel-transport residual of operator samples X(t_k).

        max_k ||X^dagger(t_k) (X(t_{k+1}) - X(t_{k-1})) / 2h||_F

    over the interior nodes.  Vanishes for the holonomy operator and stays
    finite for an evolution operator that carries a dynamic part.

    Parameters
    ----------
    holonomy : complex array (N+1, d, d)

    grid : TimeGrid

    Returns
    -------
    residual : float
    """
    holonomy = np.asarray(holonomy)
    if len(holonomy) != grid.steps + 1:
        raise ValidationError("operator samples do not match the grid")
    rate = (holonomy[2:] - holonomy[:-2]) / (2.0 * grid.step)
    return float(np.max(frobenius(dagger(holonomy[1:-1]) @ rate)))


class InseparableForm(NamedTuple):
    """
    Output of `inseparable_form_diagnostic`.

    Attributes
    ----------
    residual : float
        ||T exp int (A + K) - U(T)||_F

    split_residual : float
        ||T exp int A  T exp int K - U(T)||_F, small only when A and K
        commute
    """

    residual: float
    split_residual: float


def inseparable_form_diagnostic(gauge, forms):
    """
    Evolution of the cycle matrix from dU/dt = (A + K) U.

    The combined generator reproduces U(T), while the product of the
    separately ordered exponentials of A and K does so only when they
    commute.

    Parameters
    ----------
    gauge : GaugeFrame

    forms : MatrixForms

    Returns
    -------
    diagnostic : InseparableForm
    """
    step = gauge.grid.step
    combined = ordered_exponential(forms.A_mid + forms.K_mid, step, later="left")[-1]
    only_k = ordered_exponential(forms.K_mid, step, later="left")[-1]
    residual = frobenius(combined - forms.evolution_T)
    split = frobenius(forms.gamma_T @ only_k - forms.evolution_T)
    return InseparableForm(float(residual), float(split))
