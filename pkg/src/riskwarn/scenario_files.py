"""Scenario files: a YAML mirror of ScenarioSpec for editing and sharing.

The layout is deliberately flat so a scenario can be tweaked in a text
editor: paths as point lists, agents referencing paths by id, the error
timeline as a list of entries. `dump_scenario` and `parse_scenario` are
inverses for any spec that `scenarios.validate` accepts.
"""

from __future__ import annotations

from typing import Any, Dict, List, Optional

import yaml

from .exceptions import ScenarioError
from .perception import AgentErrors, ErrorSchedule
from .scenarios import CAR_EXTENT, AgentSpec, ScenarioSpec, ScriptedBehavior
from .world import DEFAULT_LANE_WIDTH, PathSpec


def _path_to_data(p: PathSpec) -> Dict[str, Any]:
    data: Dict[str, Any] = {
        "id": p.path_id,
        "points": [[float(x), float(y)] for x, y in p.points],
    }
    if p.lane_width != DEFAULT_LANE_WIDTH:
        data["lane_width"] = p.lane_width
    if p.terminal_lane != p.path_id:
        data["terminal_lane"] = p.terminal_lane
    return data


def _agent_to_data(a: AgentSpec) -> Dict[str, Any]:
    data: Dict[str, Any] = {
        "id": a.agent_id,
        "path": a.path_id,
        "arc": float(a.arc),
        "speed": float(a.speed),
    }
    if tuple(a.extent) != CAR_EXTENT:
        data["extent"] = [float(a.extent[0]), float(a.extent[1])]
    if a.script is not None:
        script: Dict[str, Any] = {
            "commands": [[float(t), float(v)] for t, v in a.script.commands],
        }
        if a.script.accel_limit != ScriptedBehavior.__dataclass_fields__["accel_limit"].default:
            script["accel_limit"] = float(a.script.accel_limit)
        data["script"] = script
    return data


def _errors_to_data(err: AgentErrors) -> Dict[str, Any]:
    data: Dict[str, Any] = {}
    if err.notice:
        data["notice"] = float(err.notice)
    if err.forecast:
        data["forecast"] = float(err.forecast)
    if err.inference:
        data["inference"] = float(err.inference)
    if err.predicted_path is not None:
        data["predicted_path"] = err.predicted_path.path_id
    return data


def scenario_to_data(spec: ScenarioSpec) -> Dict[str, Any]:
    """Plain nested dicts/lists mirroring the spec, defaults omitted."""
    paths = list(spec.paths)
    known = {p.path_id for p in paths}
    # Predicted paths live inside the schedule as objects; files reference
    # them by id, so any that were not listed get appended to the path table.
    for _, errors in spec.schedule.entries:
        for err in errors.values():
            if err.predicted_path is not None and err.predicted_path.path_id not in known:
                paths.append(err.predicted_path)
                known.add(err.predicted_path.path_id)

    data: Dict[str, Any] = {
        "name": spec.name,
        "description": spec.description,
        "duration": float(spec.duration),
        "dt": float(spec.dt),
        "paths": [_path_to_data(p) for p in paths],
        "ego": _agent_to_data(spec.ego),
        "agents": [_agent_to_data(a) for a in spec.others],
    }
    if spec.candidate_lanes:
        data["candidate_lanes"] = list(spec.candidate_lanes)
    if spec.schedule.entries:
        data["errors"] = [
            {"at": float(t), **{aid: _errors_to_data(err) for aid, err in errors.items()}}
            for t, errors in spec.schedule.entries
        ]
    data["v_off"] = float(spec.v_off)
    data["v_desired"] = float(spec.v_desired)
    for key in ("risk_overrides", "warning_overrides", "planner_overrides"):
        overrides = getattr(spec, key)
        if overrides:
            data[key] = {k: float(v) for k, v in overrides.items()}
    return data


def dump_scenario(spec: ScenarioSpec) -> str:
    return yaml.safe_dump(scenario_to_data(spec), sort_keys=False,
                          default_flow_style=None)


def save_scenario(spec: ScenarioSpec, file_path) -> None:
    with open(file_path, "w") as fh:
        fh.write(dump_scenario(spec))


def _require(data: Dict[str, Any], key: str, where: str):
    if key not in data:
        raise ScenarioError(f"{where}: missing required key {key!r}")
    return data[key]


def _data_to_path(data: Dict[str, Any]) -> PathSpec:
    if not isinstance(data, dict):
        raise ScenarioError(f"path entry must be a mapping, got {type(data).__name__}")
    pid = _require(data, "id", "path")
    try:
        return PathSpec(
            str(pid),
            _require(data, "points", f"path {pid!r}"),
            lane_width=float(data.get("lane_width", DEFAULT_LANE_WIDTH)),
            terminal_lane=data.get("terminal_lane"),
        )
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"path {pid!r}: {exc}") from exc


def _data_to_agent(data: Dict[str, Any], where: str) -> AgentSpec:
    if not isinstance(data, dict):
        raise ScenarioError(f"{where} must be a mapping, got {type(data).__name__}")
    aid = str(_require(data, "id", where))
    script = None
    if "script" in data:
        sdata = data["script"]
        commands = _require(sdata, "commands", f"agent {aid!r} script")
        try:
            script = ScriptedBehavior(
                commands=tuple((float(t), float(v)) for t, v in commands),
                accel_limit=float(sdata.get(
                    "accel_limit",
                    ScriptedBehavior.__dataclass_fields__["accel_limit"].default)),
            )
        except (TypeError, ValueError) as exc:
            raise ScenarioError(f"agent {aid!r} script: {exc}") from exc
    extent = data.get("extent", CAR_EXTENT)
    try:
        return AgentSpec(
            agent_id=aid,
            path_id=str(_require(data, "path", f"agent {aid!r}")),
            arc=float(_require(data, "arc", f"agent {aid!r}")),
            speed=float(_require(data, "speed", f"agent {aid!r}")),
            extent=(float(extent[0]), float(extent[1])),
            script=script,
        )
    except (TypeError, ValueError, IndexError) as exc:
        raise ScenarioError(f"agent {aid!r}: {exc}") from exc


def _data_to_schedule(entries: List[Dict[str, Any]],
                      paths: Dict[str, PathSpec]) -> ErrorSchedule:
    parsed = []
    for entry in entries:
        if not isinstance(entry, dict) or "at" not in entry:
            raise ScenarioError("each errors entry must be a mapping with an 'at' time")
        t = float(entry["at"])
        agent_errors: Dict[str, AgentErrors] = {}
        for aid, err in entry.items():
            if aid == "at":
                continue
            if not isinstance(err, dict):
                raise ScenarioError(
                    f"errors at t={t:g}: agent {aid!r} entry must be a mapping")
            predicted: Optional[PathSpec] = None
            if "predicted_path" in err:
                ppid = err["predicted_path"]
                if ppid not in paths:
                    raise ScenarioError(
                        f"errors at t={t:g}: agent {aid!r} predicts unknown "
                        f"path {ppid!r}")
                predicted = paths[ppid]
            unknown = set(err) - {"notice", "forecast", "inference", "predicted_path"}
            if unknown:
                raise ScenarioError(
                    f"errors at t={t:g}: agent {aid!r} has unknown keys "
                    f"{sorted(unknown)}")
            agent_errors[str(aid)] = AgentErrors(
                notice=float(err.get("notice", 0.0)),
                forecast=float(err.get("forecast", 0.0)),
                inference=float(err.get("inference", 0.0)),
                predicted_path=predicted,
            )
        parsed.append((t, agent_errors))
    return ErrorSchedule(entries=tuple(parsed))


def data_to_scenario(data: Dict[str, Any]) -> ScenarioSpec:
    if not isinstance(data, dict):
        raise ScenarioError(f"scenario file must hold a mapping, got {type(data).__name__}")
    name = str(_require(data, "name", "scenario"))
    where = f"scenario {name!r}"
    paths = [_data_to_path(p) for p in _require(data, "paths", where)]
    by_id = {p.path_id: p for p in paths}
    if len(by_id) != len(paths):
        raise ScenarioError(f"{where}: duplicate path ids")
    schedule = _data_to_schedule(data.get("errors", []), by_id)
    kwargs = {}
    for key in ("risk_overrides", "warning_overrides", "planner_overrides"):
        if key in data:
            kwargs[key] = {str(k): float(v) for k, v in data[key].items()}
    return ScenarioSpec(
        name=name,
        description=str(data.get("description", "")),
        duration=float(_require(data, "duration", where)),
        dt=float(_require(data, "dt", where)),
        paths=tuple(paths),
        ego=_data_to_agent(_require(data, "ego", where), "ego"),
        others=tuple(_data_to_agent(a, "agent") for a in data.get("agents", [])),
        candidate_lanes=tuple(str(c) for c in data.get("candidate_lanes", [])),
        schedule=schedule,
        v_off=float(data.get("v_off", ScenarioSpec.__dataclass_fields__["v_off"].default)),
        v_desired=float(data.get("v_desired",
                                 ScenarioSpec.__dataclass_fields__["v_desired"].default)),
        **kwargs,
    )


def parse_scenario(text: str) -> ScenarioSpec:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ScenarioError(f"not valid YAML: {exc}") from exc
    return data_to_scenario(data)


def load_scenario(file_path) -> ScenarioSpec:
    try:
        with open(file_path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ScenarioError(f"cannot read {file_path}: {exc}") from exc
    return parse_scenario(text)
