import os
import warnings

import numpy as np
from astropy.utils.exceptions import AstropyUserWarning

from . import conf

__all__ = [
    "HolonomyError",
    "ValidationError",
    "SingularMatrixError",
    "DomainError",
    "ScenarioParseError",
    "PreconditionError",
    "InfeasibleDesignError",
    "TrackingError",
    "NumericalError",
    "HolonomyWarning",
    "BranchCutWarning",
    "TrivialGateWarning",
    "default_steps",
    "reduce_phase",
]


class HolonomyError(Exception):
    """
    Base class of the package exceptions.
    """


class ValidationError(HolonomyError, ValueError):
    """
    Input with the wrong shape, symmetry or range.
    """


class SingularMatrixError(ValidationError):
    """
    Rank-deficient input where full rank is required.
    """


class DomainError(ValidationError):
    """
    Time outside of the domain of a Hamiltonian.
    """


class ScenarioParseError(ValidationError):
    """
    Scenario document that does not follow the schema.

    Parameters
    ----------
    path : str
        location of the offending field, e.g. ``terms[1].matrix.im``
    message : str
        what is wrong with the field
    """

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class PreconditionError(HolonomyError, ValueError):
    """
    Operation called on input that does not satisfy its precondition.
    """


class InfeasibleDesignError(HolonomyError, ValueError):
    """
    Gate design parameters without a valid initial state.
    """

    def __init__(self, message, N=None, m=None, population=None):
        self.N = N
        self.m = m
        self.population = population
        super().__init__(message)


class TrackingError(HolonomyError, RuntimeError):
    """
    Instantaneous eigenvalue cannot be followed unambiguously.
    """


class NumericalError(HolonomyError, RuntimeError):
    """
    Non-finite numbers produced during a calculation.
    """


class HolonomyWarning(AstropyUserWarning):
    """
    Base class of the package warnings.
    """


class BranchCutWarning(HolonomyWarning):
    """
    Matrix logarithm evaluated on a shifted branch.
    """


class TrivialGateWarning(HolonomyWarning):
    """
    Valid gate design whose gate is proportional to the identity.
    """


def default_steps():
    """
    Number of grid steps used when none is given.

    The ``HOLONOMY_DEFAULT_STEPS`` environment variable overrides
    ``conf.default_steps``.

    Returns
    -------
    steps : int
    """
    env = os.environ.get("HOLONOMY_DEFAULT_STEPS")
    if env is None:
        return int(conf.default_steps)
    try:
        steps = int(env)
    except ValueError:
        raise ValidationError(
            "HOLONOMY_DEFAULT_STEPS must be an integer, got " + repr(env)
        )
    if steps < 16:
        raise ValidationError("HOLONOMY_DEFAULT_STEPS must be >= 16")
    return steps


def reduce_phase(phase, shift=0.0):
    """
    Reduce phases to the interval (-pi + shift, pi + shift].

    Parameters
    ----------
    phase : float or array
        phases [rad]

    shift : float
        branch shift [rad]

    Returns
    -------
    phase : float or array
        reduced phases
    """
    lower = -np.pi + shift
    reduced = np.mod(np.asarray(phase) - lower, 2.0 * np.pi) + lower
    # np.mod maps the upper end onto the lower end
    reduced = np.where(np.isclose(reduced, lower, rtol=0.0, atol=1e-15), lower + 2.0 * np.pi, reduced)
    if np.ndim(reduced) == 0:
        return float(reduced)
    return reduced


def _check_finite(array, what):
    """
    Raise NumericalError if any value of array is NaN or infinite.
    """
    if not np.all(np.isfinite(array)):
        raise NumericalError(what + " contains non-finite values")


def _warn(message, category=HolonomyWarning):
    warnings.warn(message, category, stacklevel=3)
