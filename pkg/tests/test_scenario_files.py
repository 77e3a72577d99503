import pytest

from riskwarn.exceptions import ScenarioError
from riskwarn.scenario_files import (dump_scenario, load_scenario,
                                     parse_scenario, save_scenario,
                                     scenario_to_data)
from riskwarn.scenarios import (builtin_scenario, builtin_scenarios,
                                calibration_scenarios, validate)

MINIMAL = """
name: mini
duration: 5.0
dt: 0.1
paths:
- id: lane
  points:
  - [0.0, 0.0]
  - [100.0, 0.0]
ego: {id: ego, path: lane, arc: 10.0, speed: 5.0}
"""


def test_round_trip_every_stock_scenario():
    for spec in builtin_scenarios() + calibration_scenarios()[1:]:
        text = dump_scenario(spec)
        back = parse_scenario(text)
        assert dump_scenario(back) == text, spec.name
        assert validate(back) == [], spec.name


def test_round_trip_preserves_semantics():
    spec = builtin_scenario("lane_change_inference")
    back = parse_scenario(dump_scenario(spec))
    assert back.name == spec.name
    assert back.duration == spec.duration
    assert back.v_off == spec.v_off
    assert [a.agent_id for a in back.others] == ["car_lead", "car_rear"]
    assert dict(back.warning_overrides) == dict(spec.warning_overrides)
    assert dict(back.planner_overrides) == dict(spec.planner_overrides)
    (t0, errors), = back.schedule.entries
    assert t0 == 0.0
    assert errors["car_rear"].inference == 1.0
    assert errors["car_rear"].predicted_path.path_id == "rear_merge_right"


def test_minimal_file_parses_with_defaults():
    spec = parse_scenario(MINIMAL)
    assert spec.name == "mini"
    assert spec.others == ()
    assert spec.candidate_lanes == ()
    assert spec.schedule.entries == ()
    assert spec.v_off == 3.0
    assert spec.ego.extent == (2.3, 1.0)


def test_save_and_load(tmp_path):
    spec = builtin_scenario("intersection_occlusion")
    target = tmp_path / "occ.yaml"
    save_scenario(spec, target)
    back = load_scenario(target)
    assert dump_scenario(back) == dump_scenario(spec)


def test_load_missing_file_raises():
    with pytest.raises(ScenarioError, match="cannot read"):
        load_scenario("/nonexistent/path.yaml")


def test_parse_rejects_invalid_yaml():
    with pytest.raises(ScenarioError, match="not valid YAML"):
        parse_scenario("paths: [unclosed")


def test_parse_rejects_non_mapping():
    with pytest.raises(ScenarioError, match="mapping"):
        parse_scenario("- just\n- a list\n")


def test_parse_reports_missing_keys():
    with pytest.raises(ScenarioError, match="missing required key 'duration'"):
        parse_scenario("name: x\ndt: 0.1\npaths: []\nego: {id: e, path: p, arc: 0, speed: 1}\n")


def test_parse_rejects_unknown_predicted_path():
    text = MINIMAL + """
agents:
- {id: car, path: lane, arc: 50.0, speed: 5.0}
errors:
- at: 0.0
  car: {inference: 1.0, predicted_path: ghost}
"""
    with pytest.raises(ScenarioError, match="ghost"):
        parse_scenario(text)


def test_parse_rejects_unknown_error_keys():
    text = MINIMAL + """
agents:
- {id: car, path: lane, arc: 50.0, speed: 5.0}
errors:
- at: 0.0
  car: {typo: 1.0}
"""
    with pytest.raises(ScenarioError, match="typo"):
        parse_scenario(text)


def test_parse_rejects_duplicate_path_ids():
    text = MINIMAL.replace(
        "- id: lane",
        "- id: lane\n  points:\n  - [0.0, 0.0]\n  - [1.0, 0.0]\n- id: lane")
    with pytest.raises(ScenarioError, match="duplicate"):
        parse_scenario(text)


def test_unlisted_predicted_path_is_exported():
    # The inference scenario's hypothesized path is part of the path table
    # in the export, referenced by id from the error entry.
    data = scenario_to_data(builtin_scenario("lane_change_inference"))
    ids = [p["id"] for p in data["paths"]]
    assert "rear_merge_right" in ids
    assert data["errors"][0]["car_rear"]["predicted_path"] == "rear_merge_right"


def test_script_round_trip():
    spec = calibration_scenarios()[4]
    assert spec.name == "calib_cross_yield"
    back = parse_scenario(dump_scenario(spec))
    script = back.others[0].script
    assert script is not None
    assert script.commands == ((0.0, 2.0),)
    assert script.accel_limit == 2.5
