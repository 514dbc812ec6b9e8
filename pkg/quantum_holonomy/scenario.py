# -*- coding: utf-8 -*-
"""
Scenario documents: a Hamiltonian, an initial frame, a grid and tolerances.

Documents are JSON::

    {"name": "spin-half",
     "dim": 2, "duration": 1.0, "steps": 4096,
     "terms": [{"coefficient": {"kind": "constant", "value": 3.14},
                "matrix": {"re": [[1, 0], [0, -1]], "im": [[0, 0], [0, 0]]}}],
     "initial_frame": {"re": [[1.0], [0.0]], "im": [[0.0], [0.0]]},
     "tolerances": {"cyclic": 1e-6}}

Floats are written with the shortest representation that round-trips, so
``parse_scenario(serialize_scenario(s))`` reproduces ``s`` bit for bit.
"""
import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

import numpy as np

from astropy import log

from . import conf
from .coefficients import coefficient_from_dict, _is_number
from .hamiltonian import HamiltonianSpec
from .helpers import (
    ScenarioParseError,
    SingularMatrixError,
    ValidationError,
    default_steps,
)
from .linalg import Frame, dagger, frobenius, orthonormalize_frame
from .propagation import TimeGrid

__all__ = [
    "Tolerances",
    "Scenario",
    "parse_scenario",
    "scenario_from_dict",
    "load_scenario",
    "scenario_to_dict",
    "serialize_scenario",
    "scenario_digest",
    "matrix_to_dict",
    "bundled_scenarios",
    "load_bundled_scenario",
]

# frames closer than this to orthonormal are used unchanged
_EXACT_FRAME = 1e-12
# frames further than this from orthonormal are rejected
_MAX_FRAME_ADJUSTMENT = 1e-6

_TOP_LEVEL_KEYS = {
    "name",
    "dim",
    "duration",
    "steps",
    "terms",
    "initial_frame",
    "tolerances",
    "design",
}


@dataclass(frozen=True)
class Tolerances:
    """
    Pass thresholds of a scenario; defaults come from `quantum_holonomy.conf`.
    """

    cyclic: float = field(default_factory=lambda: float(conf.cyclic_tol))
    residual: float = field(default_factory=lambda: float(conf.residual_tol))
    holonomic: float = field(default_factory=lambda: float(conf.holonomic_tol))
    parallel_transport: float = field(
        default_factory=lambda: float(conf.parallel_transport_tol)
    )

    def __post_init__(self):
        for name, value in self.to_dict().items():
            if not (np.isfinite(value) and value > 0.0):
                raise ValidationError("tolerance %s must be positive" % name)

    def to_dict(self):
        return dataclasses.asdict(self)


@dataclass(frozen=True, eq=False)
class Scenario:
    """
    Validated scenario.

    Attributes
    ----------
    hamiltonian : HamiltonianSpec
        Hamiltonian with duration T

    frame0 : Frame
        initial frame psi(0), d x l

    grid : TimeGrid

    tolerances : Tolerances

    adjustment : float
        ||frame0 - given frame||_F of the re-orthonormalization at parse time

    design : dict, optional
        gate-design parameters of generated scenarios, carried through as is

    name : str, optional
    """

    hamiltonian: HamiltonianSpec
    frame0: Frame
    grid: TimeGrid
    tolerances: Tolerances = field(default_factory=Tolerances)
    adjustment: float = 0.0
    design: Optional[dict] = None
    name: Optional[str] = None

    def __post_init__(self):
        if self.hamiltonian.duration is None:
            raise ValidationError("scenario Hamiltonian needs a duration")
        if abs(self.hamiltonian.duration - self.grid.duration) > 1e-12 * max(
            1.0, self.grid.duration
        ):
            raise ValidationError("grid and Hamiltonian durations differ")
        if self.frame0.dim != self.hamiltonian.dim:
            raise ValidationError(
                "initial frame dimension %d does not match Hamiltonian dimension %d"
                % (self.frame0.dim, self.hamiltonian.dim)
            )

    @property
    def dim(self):
        return self.hamiltonian.dim

    @property
    def rank(self):
        return self.frame0.rank

    @property
    def duration(self):
        return self.grid.duration

    def with_steps(self, steps):
        return dataclasses.replace(self, grid=TimeGrid(self.grid.duration, steps))

    def with_tolerances(self, **overrides):
        return dataclasses.replace(
            self, tolerances=dataclasses.replace(self.tolerances, **overrides)
        )


def matrix_to_dict(matrix):
    """
    ``{"re": [[...]], "im": [[...]]}`` form of a complex matrix.
    """
    matrix = np.asarray(matrix, dtype=np.complex128)
    return {
        "re": [[float(x) for x in row] for row in matrix.real],
        "im": [[float(x) for x in row] for row in matrix.imag],
    }


def _parse_matrix(doc, path, rows, cols=None):
    if not isinstance(doc, dict):
        raise ScenarioParseError(path, 'matrix must be an object with "re" and "im"')
    for key in doc:
        if key not in ("re", "im"):
            raise ScenarioParseError(path + "." + key, "unknown matrix field")
    parts = []
    for key in ("re", "im"):
        if key not in doc:
            raise ScenarioParseError(path + "." + key, "missing matrix part")
        part = doc[key]
        where = path + "." + key
        if not isinstance(part, list) or len(part) != rows:
            raise ScenarioParseError(where, "expected %d rows" % rows)
        width = cols if cols is not None else rows
        for i, row in enumerate(part):
            if not isinstance(row, list):
                raise ScenarioParseError("%s[%d]" % (where, i), "row must be a list")
            if len(row) != width:
                raise ScenarioParseError(
                    "%s[%d]" % (where, i),
                    "row has %d entries; give the full %d x %d matrix"
                    % (len(row), rows, width),
                )
            for j, val in enumerate(row):
                if not _is_number(val):
                    raise ScenarioParseError("%s[%d][%d]" % (where, i, j), "must be a number")
        parts.append(np.array(part, dtype=float).reshape(rows, width))
    return parts[0] + 1j * parts[1]


def _require(doc, key, path=""):
    if key not in doc:
        raise ScenarioParseError(path + key, "missing required field")
    return doc[key]


def _parse_frame(doc, dim):
    if not isinstance(doc, dict) or not isinstance(doc.get("re"), list) or not doc["re"]:
        raise ScenarioParseError("initial_frame", 'frame must be an object with "re" and "im"')
    first = doc["re"][0]
    rank = len(first) if isinstance(first, list) else 0
    if rank < 1 or rank > dim:
        raise ScenarioParseError("initial_frame.re", "frame needs between 1 and %d columns" % dim)
    columns = _parse_matrix(doc, "initial_frame", dim, rank)
    defect = frobenius(dagger(columns) @ columns - np.identity(rank))
    if defect <= _EXACT_FRAME:
        return Frame(columns), 0.0
    if defect > _MAX_FRAME_ADJUSTMENT:
        raise ValidationError(
            "initial_frame: columns are not orthonormal (||V^dagger V - 1||_F = %.3g)"
            % defect
        )
    try:
        frame = orthonormalize_frame(columns)
    except SingularMatrixError as err:
        raise ValidationError("initial_frame: %s" % err)
    adjustment = float(frobenius(frame.columns - columns))
    log.debug("initial frame re-orthonormalized, adjustment %.3e" % adjustment)
    return frame, adjustment


def _parse_tolerances(doc):
    if not isinstance(doc, dict):
        raise ScenarioParseError("tolerances", "must be an object")
    known = {f.name for f in dataclasses.fields(Tolerances)}
    for key, val in doc.items():
        if key not in known:
            raise ScenarioParseError("tolerances." + key, "unknown tolerance")
        if not _is_number(val):
            raise ScenarioParseError("tolerances." + key, "must be a number")
    try:
        return Tolerances(**{key: float(val) for key, val in doc.items()})
    except ValidationError as err:
        raise ScenarioParseError("tolerances", str(err))


def scenario_from_dict(doc):
    """
    Build a validated `Scenario` from a decoded document.

    Raises
    ------
    ScenarioParseError
        schema violation, with the path of the offending field
    ValidationError
        non-Hermitian term matrix or non-orthonormal initial frame
    """
    if not isinstance(doc, dict):
        raise ScenarioParseError("", "scenario document must be an object")
    for key in doc:
        if key not in _TOP_LEVEL_KEYS:
            raise ScenarioParseError(key, "unknown field")

    dim = _require(doc, "dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise ScenarioParseError("dim", "must be a positive integer")
    duration = _require(doc, "duration")
    if not _is_number(duration) or not duration > 0.0:
        raise ScenarioParseError("duration", "must be a positive number")
    duration = float(duration)
    if "steps" in doc:
        steps = doc["steps"]
        if not isinstance(steps, int) or isinstance(steps, bool) or steps < 16:
            raise ScenarioParseError("steps", "must be an integer >= 16")
    else:
        steps = default_steps()

    terms_doc = _require(doc, "terms")
    if not isinstance(terms_doc, list) or len(terms_doc) == 0:
        raise ScenarioParseError("terms", "must be a non-empty list")
    terms = []
    for k, term in enumerate(terms_doc):
        path = "terms[%d]" % k
        if not isinstance(term, dict):
            raise ScenarioParseError(path, "term must be an object")
        for key in term:
            if key not in ("coefficient", "matrix"):
                raise ScenarioParseError(path + "." + key, "unknown field")
        coefficient = coefficient_from_dict(
            _require(term, "coefficient", path + "."), path + ".coefficient"
        )
        matrix = _parse_matrix(_require(term, "matrix", path + "."), path + ".matrix", dim)
        if frobenius(matrix - dagger(matrix)) > 1e-12:
            raise ValidationError(path + ".matrix is not Hermitian")
        terms.append((coefficient, matrix))
    try:
        hamiltonian = HamiltonianSpec(terms, duration)
    except ValidationError as err:
        raise ScenarioParseError("terms", str(err))

    frame0, adjustment = _parse_frame(_require(doc, "initial_frame"), dim)
    tolerances = _parse_tolerances(doc.get("tolerances", {}))

    design = doc.get("design")
    if design is not None and not isinstance(design, dict):
        raise ScenarioParseError("design", "must be an object")
    name = doc.get("name")
    if name is not None and not isinstance(name, str):
        raise ScenarioParseError("name", "must be a string")

    return Scenario(
        hamiltonian=hamiltonian,
        frame0=frame0,
        grid=TimeGrid(duration, steps),
        tolerances=tolerances,
        adjustment=adjustment,
        design=design,
        name=name,
    )


def parse_scenario(text):
    """
    Parse and validate a scenario document.

    Parameters
    ----------
    text : str or bytes
        JSON scenario document

    Returns
    -------
    scenario : Scenario

    Raises
    ------
    ScenarioParseError
        malformed JSON or schema violation; ``err.path`` names the field
    ValidationError
        non-Hermitian term matrix or non-orthonormal initial frame
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise ScenarioParseError(
            "", "not a valid JSON document (line %d column %d)" % (err.lineno, err.colno)
        )
    return scenario_from_dict(doc)


def load_scenario(path):
    """
    Read and parse a scenario file.
    """
    with open(path, "r") as infile:
        return parse_scenario(infile.read())


def scenario_to_dict(scenario):
    """
    Document form of a scenario.

    Raises
    ------
    ValidationError
        a coefficient (e.g. a compound model) has no document form
    """
    terms = []
    for k, (coefficient, matrix) in enumerate(scenario.hamiltonian.terms):
        if not hasattr(coefficient, "to_dict"):
            raise ValidationError(
                "term %d coefficient has no scenario-document form" % k
            )
        terms.append({"coefficient": coefficient.to_dict(), "matrix": matrix_to_dict(matrix)})
    doc = {}
    if scenario.name is not None:
        doc["name"] = scenario.name
    doc.update(
        {
            "dim": scenario.dim,
            "duration": scenario.grid.duration,
            "steps": scenario.grid.steps,
            "terms": terms,
            "initial_frame": matrix_to_dict(scenario.frame0.columns),
            "tolerances": scenario.tolerances.to_dict(),
        }
    )
    if scenario.design is not None:
        doc["design"] = scenario.design
    return doc


def serialize_scenario(scenario):
    """
    JSON text of a scenario, readable by `parse_scenario`.
    """
    return json.dumps(scenario_to_dict(scenario), indent=2)


def scenario_digest(scenario):
    """
    SHA-256 hex digest of the canonical serialization (sorted keys, no
    whitespace) of a validated scenario.
    """
    canonical = json.dumps(
        scenario_to_dict(scenario), sort_keys=True, separators=(",", ":")
    )
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _scenario_dir():
    return resources.files("quantum_holonomy") / "data" / "scenarios"


def bundled_scenarios():
    """
    Names of the scenarios shipped with the package.
    """
    return sorted(
        entry.name[: -len(".json")]
        for entry in _scenario_dir().iterdir()
        if entry.name.endswith(".json")
    )


def load_bundled_scenario(name):
    """
    Parse one of the scenarios shipped with the package.

    Parameters
    ----------
    name : str
        one of `bundled_scenarios()`
    """
    if name not in bundled_scenarios():
        raise ValidationError(
            "unknown bundled scenario %r, expected one of %s"
            % (name, ", ".join(bundled_scenarios()))
        )
    return parse_scenario((_scenario_dir() / (name + ".json")).read_text())
