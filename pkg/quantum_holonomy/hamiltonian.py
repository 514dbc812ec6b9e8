# -*- coding: utf-8 -*-
"""
Time-dependent Hamiltonians H(t) = sum_k c_k(t) H_k with hbar = 1.
"""
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from astropy.modeling.models import Polynomial1D, Shift, Scale

from .coefficients import Constant, PiecewiseConstant
from .helpers import ValidationError, DomainError
from .linalg import Frame, dagger, eigh_sorted, frobenius

__all__ = [
    "HamiltonianSpec",
    "SpectralDecomposition",
    "eval_hamiltonian",
    "spectral_decompose",
]


def _check_hermitian(matrix, name, atol):
    matrix = np.asarray(matrix, dtype=np.complex128)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValidationError(name + " must be a square matrix")
    if not np.all(np.isfinite(matrix)):
        raise ValidationError(name + " has non-finite entries")
    if frobenius(matrix - dagger(matrix)) > atol:
        raise ValidationError(name + " is not Hermitian")
    return matrix


@dataclass(frozen=True, eq=False)
class HamiltonianSpec:
    """
    Declarative Hamiltonian H(t) = sum_k c_k(t) H_k.

    Parameters
    ----------
    terms : sequence of (coefficient, matrix)
        coefficient models (see `quantum_holonomy.coefficients`) paired with
        constant Hermitian d x d matrices

    duration : float, optional
        T; evaluation outside [0, T] is a domain error.  None leaves the
        domain unbounded.

    Raises
    ------
    ValidationError
        no terms, inconsistent dimensions or non-Hermitian matrices
    """

    terms: tuple
    duration: Optional[float] = None

    def __post_init__(self):
        terms = tuple(self.terms)
        if len(terms) == 0:
            raise ValidationError("a Hamiltonian needs at least one term")
        checked = []
        dim = None
        for k, (coefficient, matrix) in enumerate(terms):
            matrix = _check_hermitian(matrix, "term %d matrix" % k, 1e-12)
            if dim is None:
                dim = matrix.shape[0]
            elif matrix.shape[0] != dim:
                raise ValidationError("term %d matrix has the wrong dimension" % k)
            matrix = 0.5 * (matrix + dagger(matrix))
            matrix.setflags(write=False)
            checked.append((coefficient, matrix))
        if self.duration is not None:
            if not self.duration > 0.0:
                raise ValidationError("duration must be positive")
            for k, (coefficient, _) in enumerate(checked):
                if hasattr(coefficient, "check_domain"):
                    try:
                        coefficient.check_domain(self.duration)
                    except ValueError as err:
                        raise ValidationError("term %d: %s" % (k, err))
        object.__setattr__(self, "terms", tuple(checked))

    @property
    def dim(self):
        return self.terms[0][1].shape[0]

    def coefficients(self, t):
        """
        Coefficient values at the given times.

        Parameters
        ----------
        t : float or float array (n,)

        Returns
        -------
        values : float array (n_terms,) or (n_terms, n)
        """
        t = np.asarray(t, dtype=float)
        return np.array(
            [np.broadcast_to(coefficient(t), t.shape) for coefficient, _ in self.terms],
            dtype=float,
        )

    def with_duration(self, duration):
        return HamiltonianSpec(self.terms, duration)

    def shifted(self, energy):
        """
        Same Hamiltonian with energy * 1 subtracted.
        """
        return HamiltonianSpec(
            self.terms + ((Constant(value=-energy), np.identity(self.dim)),),
            self.duration,
        )

    def time_reversed(self):
        """
        Time-reflected, sign-flipped Hamiltonian -H(T - t).

        Propagating this Hamiltonian on [0, T] undoes the evolution of the
        original one.
        """
        duration = self._require_duration()
        reflect = Scale(-1.0) | Shift(duration)
        terms = tuple(
            ((reflect | coefficient) * Constant(value=-1.0), matrix)
            for coefficient, matrix in self.terms
        )
        return HamiltonianSpec(terms, duration)

    def reparameterized(self):
        """
        Same path of subspaces traversed at a different rate.

        The coefficients become s'(t) c(s(t)) with s(t) = T (t/T)^2, so the
        states at time t are the original states at time s(t).
        """
        duration = self._require_duration()
        warp = Polynomial1D(2, c0=0.0, c1=0.0, c2=1.0 / duration)
        rate = Polynomial1D(1, c0=0.0, c1=2.0 / duration)
        terms = tuple(
            (rate * (warp | coefficient), matrix) for coefficient, matrix in self.terms
        )
        return HamiltonianSpec(terms, duration)

    def concatenated(self, other):
        """
        Run this Hamiltonian on [0, T1] followed by ``other`` on [T1, T1 + T2].
        """
        first = self._require_duration()
        second = other._require_duration()
        if other.dim != self.dim:
            raise ValidationError("cannot concatenate Hamiltonians of different dimension")
        before = PiecewiseConstant([first], [1.0, 0.0])
        after = PiecewiseConstant([first], [0.0, 1.0])
        delay = Shift(-first)
        terms = tuple((before * coefficient, matrix) for coefficient, matrix in self.terms)
        terms += tuple(
            (after * (delay | coefficient), matrix) for coefficient, matrix in other.terms
        )
        return HamiltonianSpec(terms, first + second)

    def _require_duration(self):
        if self.duration is None:
            raise ValidationError("operation needs a Hamiltonian with a duration")
        return self.duration


def eval_hamiltonian(spec, t):
    """
    Evaluate H(t) = sum_k c_k(t) H_k.

    Parameters
    ----------
    spec : HamiltonianSpec

    t : float or float array (n,)
        time(s)

    Returns
    -------
    hamiltonian : complex array (d, d) or (n, d, d)
        Hermitian matrices

    Raises
    ------
    DomainError
        time outside [0, T]
    """
    times = np.asarray(t, dtype=float)
    if spec.duration is not None:
        # rounding of grid nodes at the end point
        slack = 1e-12 * max(1.0, spec.duration)
        if np.any(times < -slack) or np.any(times > spec.duration + slack):
            raise DomainError(
                "time outside of the Hamiltonian domain [0, %s]" % repr(spec.duration)
            )
    values = spec.coefficients(times)
    matrices = np.array([matrix for _, matrix in spec.terms])
    return np.tensordot(np.moveaxis(values, 0, -1), matrices, axes=(-1, 0))


class SpectralDecomposition(NamedTuple):
    """
    Eigenvalues (ascending) and eigenvectors (columns of a Frame).
    """

    eigenvalues: np.ndarray
    eigenvectors: Frame

    def reconstruct(self):
        vectors = self.eigenvectors.columns
        return (vectors * self.eigenvalues[None, :]) @ dagger(vectors)


def spectral_decompose(hermitian, atol=1e-10):
    """
    Spectral decomposition of a Hermitian matrix.

    Eigenvalues ascend; each eigenvector has its largest-magnitude component
    real positive.

    Parameters
    ----------
    hermitian : complex array (d, d)

    Returns
    -------
    decomposition : SpectralDecomposition

    Raises
    ------
    ValidationError
        input not Hermitian
    """
    hermitian = _check_hermitian(hermitian, "matrix", atol)
    values, vectors = eigh_sorted(0.5 * (hermitian + dagger(hermitian)))
    return SpectralDecomposition(values, Frame(vectors))
