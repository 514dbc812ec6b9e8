# -*- coding: utf-8 -*-
"""
Vocabulary of time-dependent coefficient functions c(t) of Hamiltonian terms.

Times are dimensionless and energies are inverse times (hbar = 1).
"""
import numpy as np

from astropy.modeling import Parameter, InputParameterError

from .baseclasses import BaseCoefficientModel
from .helpers import ScenarioParseError

__all__ = [
    "Constant",
    "Linear",
    "Sinusoid",
    "SmoothstepRamp",
    "PiecewiseConstant",
    "coefficient_from_dict",
    "COEFFICIENT_KINDS",
]


class Constant(BaseCoefficientModel):
    r"""
    Constant coefficient c(t) = value

    Parameters
    ----------
    value: float
        constant value
    """

    kind = "constant"

    value = Parameter(description="value: constant coefficient", default=1.0)

    @staticmethod
    def evaluate(t, value):
        return value * np.ones_like(t, dtype=float)

    def area(self, t0, t1):
        return float(self.value.value) * (t1 - t0)

    def scaled(self, factor):
        return Constant(value=factor * self.value.value)


class Linear(BaseCoefficientModel):
    r"""
    Linear coefficient c(t) = slope * t + intercept

    Parameters
    ----------
    slope: float
        slope [1/time]

    intercept: float
        value at t = 0
    """

    kind = "linear"

    slope = Parameter(description="slope: rate of change", default=1.0)
    intercept = Parameter(description="intercept: value at t=0", default=0.0)

    @staticmethod
    def evaluate(t, slope, intercept):
        return slope * t + intercept

    def area(self, t0, t1):
        slope = float(self.slope.value)
        intercept = float(self.intercept.value)
        return 0.5 * slope * (t1**2 - t0**2) + intercept * (t1 - t0)

    def scaled(self, factor):
        return Linear(
            slope=factor * self.slope.value, intercept=factor * self.intercept.value
        )


class Sinusoid(BaseCoefficientModel):
    r"""
    Sinusoidal coefficient c(t) = amplitude * sin(frequency * t + phase) + offset

    Parameters
    ----------
    amplitude: float
        amplitude

    frequency: float
        angular frequency [rad/time]

    phase: float
        phase at t = 0 [rad]

    offset: float
        constant offset

    Raises
    ------
    InputParameterError
       Input frequency values that are not finite
    """

    kind = "sinusoid"

    amplitude = Parameter(description="amplitude", default=1.0)
    frequency = Parameter(description="frequency: angular frequency", default=1.0)
    phase = Parameter(description="phase: phase at t=0", default=0.0)
    offset = Parameter(description="offset: constant offset", default=0.0)

    @frequency.validator
    def frequency(self, value):
        """
        Check that the frequency is finite

        Parameters
        ----------
        value: float
            frequency value to check

        Raises
        ------
        InputParameterError
           Input frequency value is not finite
        """
        if not np.isfinite(value):
            raise InputParameterError("parameter frequency must be finite")

    @staticmethod
    def evaluate(t, amplitude, frequency, phase, offset):
        return amplitude * np.sin(frequency * t + phase) + offset

    def area(self, t0, t1):
        amplitude = float(self.amplitude.value)
        frequency = float(self.frequency.value)
        phase = float(self.phase.value)
        offset = float(self.offset.value)
        if frequency == 0.0:
            return (amplitude * np.sin(phase) + offset) * (t1 - t0)
        return (
            amplitude
            * (np.cos(frequency * t0 + phase) - np.cos(frequency * t1 + phase))
            / frequency
            + offset * (t1 - t0)
        )

    def scaled(self, factor):
        return Sinusoid(
            amplitude=factor * self.amplitude.value,
            frequency=self.frequency.value,
            phase=self.phase.value,
            offset=factor * self.offset.value,
        )


class SmoothstepRamp(BaseCoefficientModel):
    r"""
    Smooth ramp from ``start`` to ``stop`` between times ``t0`` and ``t1``

    c(t) = start + (stop - start) * (3 s^2 - 2 s^3), s = clip((t - t0)/(t1 - t0), 0, 1)

    Parameters
    ----------
    start: float
        value for t <= t0

    stop: float
        value for t >= t1

    t0: float
        ramp start time

    t1: float
        ramp end time, t1 > t0

    Raises
    ------
    InputParameterError
       Input t0 negative or t1 not after t0
    """

    kind = "smoothstep-ramp"

    start = Parameter(description="start: value before the ramp", default=0.0)
    stop = Parameter(description="stop: value after the ramp", default=1.0)
    t0 = Parameter(description="t0: ramp start time", default=0.0)
    t1 = Parameter(description="t1: ramp end time", default=1.0)

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        if not float(self.t1.value) > float(self.t0.value):
            raise InputParameterError("parameter t1 must be larger than t0")

    @t0.validator
    def t0(self, value):
        """
        Check that t0 is in the valid range

        Parameters
        ----------
        value: float
            t0 value to check

        Raises
        ------
        InputParameterError
           Input t0 value is negative
        """
        if value < 0.0:
            raise InputParameterError("parameter t0 must be non-negative")

    @staticmethod
    def evaluate(t, start, stop, t0, t1):
        s = np.clip((t - t0) / (t1 - t0), 0.0, 1.0)
        return start + (stop - start) * (3.0 * s**2 - 2.0 * s**3)

    def scaled(self, factor):
        return SmoothstepRamp(
            start=factor * self.start.value,
            stop=factor * self.stop.value,
            t0=self.t0.value,
            t1=self.t1.value,
        )

    def _kinks(self, t0, t1):
        return [t for t in (self.t0.value, self.t1.value) if t0 < t < t1]


class PiecewiseConstant(BaseCoefficientModel):
    r"""
    Piecewise-constant coefficient

    c(t) = values[k] for breakpoints[k-1] <= t < breakpoints[k]

    Parameters
    ----------
    breakpoints: list of floats
        strictly increasing switching times [time]

    values: list of floats
        one more value than breakpoints

    Raises
    ------
    InputParameterError
       Breakpoints not strictly increasing, negative, or a wrong number
       of values
    """

    kind = "piecewise-constant"

    def __init__(self, breakpoints, values, **kwargs):
        super().__init__(**kwargs)
        breakpoints = np.array(breakpoints, dtype=float).ravel()
        values = np.array(values, dtype=float).ravel()
        if len(values) != len(breakpoints) + 1:
            raise InputParameterError(
                "piecewise-constant needs len(values) == len(breakpoints) + 1"
            )
        if np.any(np.diff(breakpoints) <= 0.0):
            raise InputParameterError("breakpoints must be strictly increasing")
        if np.any(breakpoints < 0.0):
            raise InputParameterError("breakpoints must be non-negative")
        if not (np.all(np.isfinite(breakpoints)) and np.all(np.isfinite(values))):
            raise InputParameterError("breakpoints and values must be finite")
        self.breakpoints = breakpoints
        self.values = values

    def evaluate(self, t):
        index = np.searchsorted(self.breakpoints, t, side="right")
        return self.values[index]

    def area(self, t0, t1):
        edges = np.concatenate(([t0], self.breakpoints[(self.breakpoints > t0) & (self.breakpoints < t1)], [t1]))
        midpoints = 0.5 * (edges[1:] + edges[:-1])
        return float(np.sum(self.evaluate(midpoints) * np.diff(edges)))

    def scaled(self, factor):
        return PiecewiseConstant(self.breakpoints, factor * self.values)

    def to_dict(self):
        return {
            "kind": self.kind,
            "breakpoints": [float(b) for b in self.breakpoints],
            "values": [float(v) for v in self.values],
        }

    def check_domain(self, duration):
        super().check_domain(duration)
        if np.any(self.breakpoints > duration):
            raise ValueError("breakpoints must lie within [0, T]")

    def _kinks(self, t0, t1):
        return [float(t) for t in self.breakpoints if t0 < t < t1]


COEFFICIENT_KINDS = {
    cls.kind: cls for cls in (Constant, Linear, Sinusoid, SmoothstepRamp, PiecewiseConstant)
}


def coefficient_from_dict(doc, path="coefficient"):
    """
    Build a coefficient model from its scenario-document form

    Parameters
    ----------
    doc: dict
       ``{"kind": ..., <parameter>: <value>, ...}``

    path: str
       location of ``doc`` in the enclosing document, for error messages

    Returns
    -------
    coefficient: BaseCoefficientModel

    Raises
    ------
    ScenarioParseError
       unknown kind, unknown or missing parameters, invalid values
    """
    if not isinstance(doc, dict):
        raise ScenarioParseError(path, "coefficient must be an object")
    kind = doc.get("kind")
    if kind not in COEFFICIENT_KINDS:
        raise ScenarioParseError(
            path + ".kind",
            "unknown coefficient kind %r, expected one of %s"
            % (kind, ", ".join(sorted(COEFFICIENT_KINDS))),
        )
    cls = COEFFICIENT_KINDS[kind]
    params = {key: val for key, val in doc.items() if key != "kind"}
    if cls is PiecewiseConstant:
        expected = {"breakpoints", "values"}
    else:
        expected = set(cls.param_names)
    for key in params:
        if key not in expected:
            raise ScenarioParseError(path + "." + key, "unknown parameter for " + kind)
    if cls is PiecewiseConstant:
        for key in expected:
            if key not in params:
                raise ScenarioParseError(path + "." + key, "missing parameter")
            if not isinstance(params[key], list) or not all(
                _is_number(val) for val in params[key]
            ):
                raise ScenarioParseError(path + "." + key, "must be a list of numbers")
    else:
        for key, val in params.items():
            if not _is_number(val):
                raise ScenarioParseError(path + "." + key, "must be a number")
    try:
        return cls(**params)
    except (InputParameterError, ValueError) as err:
        raise ScenarioParseError(path, str(err))


def _is_number(val):
    return isinstance(val, (int, float)) and not isinstance(val, bool)
