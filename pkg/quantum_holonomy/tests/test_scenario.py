import copy
import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from .. import conf
from ..helpers import ScenarioParseError, ValidationError
from ..scenario import (
    Tolerances,
    bundled_scenarios,
    load_bundled_scenario,
    load_scenario,
    parse_scenario,
    scenario_digest,
    scenario_from_dict,
    scenario_to_dict,
    serialize_scenario,
)

BASE_DOC = {
    "name": "spin",
    "dim": 2,
    "duration": 1.0,
    "steps": 64,
    "terms": [
        {
            "coefficient": {"kind": "constant", "value": 3.141592653589793},
            "matrix": {"re": [[1.0, 0.0], [0.0, -1.0]], "im": [[0.0, 0.0], [0.0, 0.0]]},
        }
    ],
    "initial_frame": {"re": [[1.0], [0.0]], "im": [[0.0], [0.0]]},
}


def _doc(**changes):
    doc = copy.deepcopy(BASE_DOC)
    doc.update(changes)
    return doc


def test_bundled():
    names = bundled_scenarios()
    for name in [
        "free",
        "gate_013",
        "noncommuting_block",
        "rabi_half_flip",
        "spin_precession",
        "stationary",
    ]:
        assert name in names
    scenario = load_bundled_scenario("gate_013")
    assert scenario.dim == 3
    assert scenario.rank == 2
    assert scenario.design["N"] == 1
    assert scenario.adjustment == 0.0


def test_unknown_bundled():
    with pytest.raises(ValidationError):
        load_bundled_scenario("does-not-exist")


def test_parse():
    scenario = scenario_from_dict(_doc())
    assert scenario.name == "spin"
    assert scenario.grid.steps == 64
    assert scenario.duration == 1.0
    assert scenario.tolerances == Tolerances()
    assert_allclose(scenario.frame0.columns, [[1.0], [0.0]])


def test_serialize_roundtrip():
    scenario = load_bundled_scenario("noncommuting_block")
    again = parse_scenario(serialize_scenario(scenario))
    assert scenario_to_dict(again) == scenario_to_dict(scenario)
    assert scenario_digest(again) == scenario_digest(scenario)


def test_digest_ignores_formatting():
    compact = json.dumps(BASE_DOC)
    spaced = json.dumps(BASE_DOC, indent=4)
    assert scenario_digest(parse_scenario(compact)) == scenario_digest(parse_scenario(spaced))
    changed = _doc(steps=128)
    assert scenario_digest(scenario_from_dict(changed)) != scenario_digest(
        parse_scenario(compact)
    )


def test_default_steps(monkeypatch):
    doc = _doc()
    del doc["steps"]
    monkeypatch.delenv("HOLONOMY_DEFAULT_STEPS", raising=False)
    assert scenario_from_dict(doc).grid.steps == conf.default_steps
    monkeypatch.setenv("HOLONOMY_DEFAULT_STEPS", "96")
    assert scenario_from_dict(doc).grid.steps == 96


def test_tolerances():
    scenario = scenario_from_dict(_doc(tolerances={"cyclic": 1e-3}))
    assert scenario.tolerances.cyclic == 1e-3
    assert scenario.tolerances.residual == conf.residual_tol
    tightened = scenario.with_tolerances(residual=1e-9)
    assert tightened.tolerances.residual == 1e-9
    assert tightened.tolerances.cyclic == 1e-3


@pytest.mark.parametrize(
    "changes, path",
    [
        ({"colour": "red"}, "colour"),
        ({"dim": 0}, "dim"),
        ({"dim": 2.0}, "dim"),
        ({"duration": -1.0}, "duration"),
        ({"steps": 8}, "steps"),
        ({"terms": []}, "terms"),
        ({"tolerances": {"cyclic": "small"}}, "tolerances.cyclic"),
        ({"tolerances": {"speed": 1.0}}, "tolerances.speed"),
        ({"tolerances": {"cyclic": -1.0}}, "tolerances"),
        ({"name": 3}, "name"),
        ({"design": []}, "design"),
    ],
)
def test_parse_errors(changes, path):
    with pytest.raises(ScenarioParseError) as exc:
        scenario_from_dict(_doc(**changes))
    assert exc.value.path == path


def test_missing_field():
    doc = _doc()
    del doc["initial_frame"]
    with pytest.raises(ScenarioParseError) as exc:
        scenario_from_dict(doc)
    assert exc.value.path == "initial_frame"
    assert exc.value.args[0] == "initial_frame: missing required field"


def test_matrix_errors():
    doc = _doc()
    doc["terms"][0]["matrix"]["re"][1] = [0.0]
    with pytest.raises(ScenarioParseError) as exc:
        scenario_from_dict(doc)
    assert exc.value.path == "terms[0].matrix.re[1]"
    assert exc.value.args[0] == (
        "terms[0].matrix.re[1]: row has 1 entries; give the full 2 x 2 matrix"
    )

    doc = _doc()
    del doc["terms"][0]["matrix"]["im"]
    with pytest.raises(ScenarioParseError) as exc:
        scenario_from_dict(doc)
    assert exc.value.path == "terms[0].matrix.im"

    doc = _doc()
    doc["terms"][0]["matrix"]["im"][0][1] = "x"
    with pytest.raises(ScenarioParseError) as exc:
        scenario_from_dict(doc)
    assert exc.value.path == "terms[0].matrix.im[0][1]"


def test_coefficient_error_path():
    doc = _doc()
    doc["terms"][0]["coefficient"] = {"kind": "constant", "amplitude": 1.0}
    with pytest.raises(ScenarioParseError) as exc:
        scenario_from_dict(doc)
    assert exc.value.path == "terms[0].coefficient.amplitude"


def test_non_hermitian_term():
    doc = _doc()
    doc["terms"][0]["matrix"]["im"] = [[0.0, 1.0], [1.0, 0.0]]
    with pytest.raises(ValidationError) as exc:
        scenario_from_dict(doc)
    assert not isinstance(exc.value, ScenarioParseError)
    assert exc.value.args[0] == "terms[0].matrix is not Hermitian"


def test_invalid_json():
    with pytest.raises(ScenarioParseError) as exc:
        parse_scenario("{not json")
    assert exc.value.path == ""


def test_frame_adjustment():
    tilt = 1e-8
    doc = _doc(initial_frame={"re": [[1.0 + tilt], [0.0]], "im": [[0.0], [0.0]]})
    scenario = scenario_from_dict(doc)
    assert_allclose(scenario.adjustment, tilt, rtol=1e-6)
    assert_allclose(scenario.frame0.columns, [[1.0], [0.0]], atol=1e-15)


def test_frame_not_orthonormal():
    doc = _doc(initial_frame={"re": [[0.9], [0.1]], "im": [[0.0], [0.0]]})
    with pytest.raises(ValidationError) as exc:
        scenario_from_dict(doc)
    assert exc.value.args[0].startswith("initial_frame: columns are not orthonormal")


def test_frame_too_many_columns():
    doc = _doc(initial_frame={"re": [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
                              "im": [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]})
    with pytest.raises(ScenarioParseError) as exc:
        scenario_from_dict(doc)
    assert exc.value.path == "initial_frame.re"


def test_load_scenario(tmp_path):
    path = tmp_path / "spin.json"
    path.write_text(json.dumps(BASE_DOC))
    assert scenario_digest(load_scenario(str(path))) == scenario_digest(
        scenario_from_dict(BASE_DOC)
    )
