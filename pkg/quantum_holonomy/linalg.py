# -*- coding: utf-8 -*-
"""
Dense complex linear algebra used by the propagators and the holonomy engine.

All functions accept single matrices and, where noted, stacks of matrices
with shape ``(..., n, n)``.  Matrices are plain complex `numpy.ndarray`
objects.
"""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .helpers import ValidationError, SingularMatrixError, reduce_phase

__all__ = [
    "Frame",
    "Projector",
    "UnitaryLog",
    "frobenius",
    "dagger",
    "eigh_sorted",
    "expm_antihermitian",
    "expm_hermitian",
    "logm_unitary_principal",
    "polar_unitary_factor",
    "orthonormalize_frame",
    "projector_from_frame",
]

# eigenvalue gap below which eigenvectors are treated as one cluster
DEGENERACY_GAP = 1e-10


def dagger(matrix):
    """
    Conjugate transpose over the last two axes.
    """
    return np.conj(np.swapaxes(matrix, -1, -2))


def frobenius(matrix):
    """
    Frobenius norm over the last two axes.

    Parameters
    ----------
    matrix : complex array (..., m, n)

    Returns
    -------
    norm : float or float array (...)
    """
    return np.linalg.norm(matrix, ord="fro", axis=(-2, -1))


def _as_square(matrix, name):
    matrix = np.asarray(matrix, dtype=np.complex128)
    if matrix.ndim < 2 or matrix.shape[-1] != matrix.shape[-2]:
        raise ValidationError(name + " must be square, got shape " + str(matrix.shape))
    if not np.all(np.isfinite(matrix)):
        raise ValidationError(name + " has non-finite entries")
    return matrix


def _fix_phases(vectors):
    """
    Rotate every column so its largest-magnitude component is real positive.

    Ties in magnitude are broken by the lowest index.
    """
    vectors = np.array(vectors, dtype=np.complex128)
    magnitudes = np.abs(vectors)
    largest = magnitudes.max(axis=-2, keepdims=True)
    # first index within rounding of the maximum
    pivot = np.argmax(magnitudes >= largest - 1e-12, axis=-2)
    pivot_values = np.take_along_axis(vectors, pivot[..., None, :], axis=-2)
    return vectors * (np.conj(pivot_values) / np.abs(pivot_values))


def eigh_sorted(hermitian):
    """
    Eigen-decomposition of a Hermitian matrix with a deterministic convention.

    Eigenvalues are ascending; each eigenvector is rotated so that its
    largest-magnitude component is real positive.

    Parameters
    ----------
    hermitian : complex array (..., n, n)

    Returns
    -------
    values : float array (..., n)
    vectors : complex array (..., n, n)
        eigenvectors as columns
    """
    values, vectors = np.linalg.eigh(hermitian)
    return values, _fix_phases(vectors)


def expm_antihermitian(matrix, atol=1e-10):
    """
    Exponential of an anti-Hermitian matrix.

    Computed from the eigen-decomposition of the Hermitian matrix iM, so the
    result is unitary to rounding.

    Parameters
    ----------
    matrix : complex array (..., n, n)
        anti-Hermitian matrix (or stack)

    atol : float
        allowed ||M + M^dagger||_F

    Returns
    -------
    exp_m : complex array (..., n, n)
        unitary exp(M)

    Raises
    ------
    ValidationError
        non-square or non anti-Hermitian input
    """
    matrix = _as_square(matrix, "matrix")
    if np.any(frobenius(matrix + dagger(matrix)) > atol):
        raise ValidationError("matrix is not anti-Hermitian")
    generator = 1j * matrix
    generator = 0.5 * (generator + dagger(generator))
    values, vectors = np.linalg.eigh(generator)
    # M = -i (iM)
    phases = np.exp(-1j * values)
    return (vectors * phases[..., None, :]) @ dagger(vectors)


def expm_hermitian(matrix, atol=1e-10):
    """
    Exponential of a Hermitian matrix (or stack) from its eigen-decomposition.

    Raises
    ------
    ValidationError
        non-square or non-Hermitian input
    """
    matrix = _as_square(matrix, "matrix")
    if np.any(frobenius(matrix - dagger(matrix)) > atol):
        raise ValidationError("matrix is not Hermitian")
    values, vectors = np.linalg.eigh(0.5 * (matrix + dagger(matrix)))
    return (vectors * np.exp(values)[..., None, :]) @ dagger(vectors)


class UnitaryLog(NamedTuple):
    """
    Result of `logm_unitary_principal`.

    Attributes
    ----------
    generator : complex array (n, n)
        anti-Hermitian logarithm
    near_branch_cut : bool
        an eigenvalue lies within 1e-6 of -1
    """

    generator: np.ndarray
    near_branch_cut: bool


def logm_unitary_principal(unitary, shift=0.0, atol=1e-8):
    """
    Anti-Hermitian logarithm of a unitary matrix.

    Eigenphases are taken in (-pi + shift, pi + shift]; shift = 0 gives the
    principal logarithm.

    Parameters
    ----------
    unitary : complex array (n, n)

    shift : float
        branch shift [rad]

    atol : float
        allowed ||U^dagger U - 1||_F

    Returns
    -------
    log : UnitaryLog
        generator and branch-cut flag; the flag is set whenever an
        eigenvalue is within 1e-6 of -1, whatever the shift

    Raises
    ------
    ValidationError
        input not unitary
    """
    unitary = _as_square(unitary, "unitary")
    n = unitary.shape[-1]
    if frobenius(dagger(unitary) @ unitary - np.identity(n)) > atol:
        raise ValidationError("matrix is not unitary")
    # complex Schur form of a normal matrix is diagonal
    schur_form, basis = scipy.linalg.schur(unitary, output="complex")
    eigenvalues = np.diag(schur_form)
    near_cut = bool(np.any(np.abs(eigenvalues + 1.0) <= 1e-6))
    phases = np.atleast_1d(reduce_phase(np.angle(eigenvalues), shift))
    generator = (basis * (1j * phases)[None, :]) @ dagger(basis)
    generator = 0.5 * (generator - dagger(generator))
    return UnitaryLog(generator, near_cut)


def polar_unitary_factor(matrix, min_singular=1e-12):
    """
    Unitary factor of the polar decomposition M = W P.

    W is the unitary (isometry for tall input) closest to M in the Frobenius
    norm.  Accepts stacks of matrices.

    Parameters
    ----------
    matrix : complex array (..., m, n), m >= n

    min_singular : float
        smallest accepted singular value

    Returns
    -------
    unitary : complex array (..., m, n)

    Raises
    ------
    SingularMatrixError
        rank-deficient input
    """
    matrix = np.asarray(matrix, dtype=np.complex128)
    if matrix.ndim < 2 or matrix.shape[-2] < matrix.shape[-1]:
        raise ValidationError("polar factor needs an m x n matrix with m >= n")
    singular = np.linalg.svd(matrix, compute_uv=False)
    if np.any(singular[..., -1] <= min_singular):
        raise SingularMatrixError("matrix is rank deficient, no unique polar factor")
    stack = matrix.reshape((-1,) + matrix.shape[-2:])
    unitary = np.stack([scipy.linalg.polar(block)[0] for block in stack])
    return unitary.reshape(matrix.shape)


@dataclass(frozen=True, eq=False)
class Frame:
    """
    Column-orthonormal d x l array spanning an l-dimensional subspace.

    Parameters
    ----------
    columns : complex array (d, l)

    atol : float
        allowed ||V^dagger V - 1||_F

    Raises
    ------
    ValidationError
        wrong shape or columns not orthonormal
    """

    columns: np.ndarray
    atol: float = 1e-10

    def __post_init__(self):
        columns = np.array(self.columns, dtype=np.complex128)
        if columns.ndim == 1:
            columns = columns[:, None]
        if columns.ndim != 2 or not (1 <= columns.shape[1] <= columns.shape[0]):
            raise ValidationError("frame must have shape (d, l) with 1 <= l <= d")
        if not np.all(np.isfinite(columns)):
            raise ValidationError("frame has non-finite entries")
        defect = frobenius(dagger(columns) @ columns - np.identity(columns.shape[1]))
        if defect > self.atol:
            raise ValidationError(
                "frame columns are not orthonormal (||V^dagger V - 1|| = %.3g)" % defect
            )
        columns.setflags(write=False)
        object.__setattr__(self, "columns", columns)

    @property
    def dim(self):
        return self.columns.shape[0]

    @property
    def rank(self):
        return self.columns.shape[1]


@dataclass(frozen=True, eq=False)
class Projector:
    """
    Orthogonal projector onto the span of a frame.

    Raises
    ------
    ValidationError
        matrix not Hermitian, not idempotent or with non-integer trace
    """

    matrix: np.ndarray

    def __post_init__(self):
        matrix = _as_square(self.matrix, "projector").copy()
        if frobenius(matrix - dagger(matrix)) > 1e-12:
            raise ValidationError("projector is not Hermitian")
        if frobenius(matrix @ matrix - matrix) > 1e-10:
            raise ValidationError("projector is not idempotent")
        trace = np.trace(matrix).real
        if abs(trace - round(trace)) > 1e-8:
            raise ValidationError("projector trace is not an integer")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @property
    def rank(self):
        return int(round(np.trace(self.matrix).real))


def orthonormalize_frame(columns, min_singular=1e-10):
    """
    Orthonormalize the columns of a d x l array.

    QR decomposition with the R factor given a real positive diagonal, so the
    result is unique and leaves orthonormal input unchanged.

    Parameters
    ----------
    columns : complex array (d, l) or (d,)

    Returns
    -------
    frame : Frame

    Raises
    ------
    SingularMatrixError
        linearly dependent columns
    """
    columns = np.array(columns, dtype=np.complex128)
    if columns.ndim == 1:
        columns = columns[:, None]
    if columns.ndim != 2 or columns.shape[1] > columns.shape[0]:
        raise ValidationError("frame must have shape (d, l) with l <= d")
    singular = np.linalg.svd(columns, compute_uv=False)
    if singular[-1] <= min_singular:
        raise SingularMatrixError("frame columns are linearly dependent")
    q, r = scipy.linalg.qr(columns, mode="economic")
    diagonal = np.diag(r)
    q = q * (diagonal / np.abs(diagonal))[None, :]
    return Frame(q)


def projector_from_frame(frame):
    """
    Projector V V^dagger onto the span of a frame.

    Parameters
    ----------
    frame : Frame

    Returns
    -------
    projector : Projector
    """
    columns = frame.columns
    matrix = columns @ dagger(columns)
    return Projector(0.5 * (matrix + dagger(matrix)))
