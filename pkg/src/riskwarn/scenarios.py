"""Scenario library: road layouts, scripted traffic, and driver-error timelines.

A scenario is pure data. It names the paths, the agents with their initial
states and (for non-ego agents) scripted speed commands, the lanes the ego
driver may change into, and the driver-error schedule. Everything the
simulation loop needs is derived from here deterministically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Tuple

from .perception import AgentErrors, ErrorSchedule
from .planner import PlannerParams
from .risk import RiskParams
from .warning import WarningConfig
from .world import (AgentState, PathSpec, WorldState, agent_on_path,
                    build_lane_change_path, straight_path)

CAR_EXTENT = (2.3, 1.0)         # (half_length, half_width), m
MOTORCYCLE_EXTENT = (2.0, 0.9)

DEFAULT_SCRIPT_ACCEL = 3.0      # m/s^2, how hard scripted agents chase a command


@dataclass(frozen=True)
class ScriptedBehavior:
    """Piecewise-constant speed commands for a non-ego agent.

    commands is a sequence of (t_start, target_speed); the latest command
    at or before the current time is active. The agent accelerates toward
    the active target at most accel_limit. An agent without a script keeps
    its initial speed.
    """

    commands: Tuple[Tuple[float, float], ...]
    accel_limit: float = DEFAULT_SCRIPT_ACCEL

    def target_speed(self, t: float) -> Optional[float]:
        active = None
        for t_start, v in self.commands:
            if t_start <= t:
                active = v
            else:
                break
        return active

    def command_accel(self, speed: float, t: float, dt: float) -> float:
        """Acceleration that tracks the active command over one step."""
        target = self.target_speed(t)
        if target is None or dt <= 0.0:
            return 0.0
        raw = (target - speed) / dt
        return max(-self.accel_limit, min(self.accel_limit, raw))


@dataclass(frozen=True)
class AgentSpec:
    """Initial state of one agent, referencing a path by id."""

    agent_id: str
    path_id: str
    arc: float
    speed: float
    extent: Tuple[float, float] = CAR_EXTENT
    script: Optional[ScriptedBehavior] = None


@dataclass(frozen=True)
class ScenarioSpec:
    """Complete declarative description of one simulation run."""

    name: str
    description: str
    duration: float
    dt: float
    paths: Tuple[PathSpec, ...]
    ego: AgentSpec
    others: Tuple[AgentSpec, ...]
    candidate_lanes: Tuple[str, ...] = ()
    schedule: ErrorSchedule = field(default_factory=ErrorSchedule)
    v_off: float = 3.0          # m/s, forecast-error speed offset scale
    v_desired: float = 14.0     # m/s, speed the ego driver is content with
    risk_overrides: Mapping[str, float] = field(default_factory=dict)
    warning_overrides: Mapping[str, float] = field(default_factory=dict)
    planner_overrides: Mapping[str, float] = field(default_factory=dict)

    def path_by_id(self, path_id: str) -> PathSpec:
        for p in self.paths:
            if p.path_id == path_id:
                return p
        raise KeyError(f"unknown path {path_id!r}")


def risk_params(spec: ScenarioSpec) -> RiskParams:
    return RiskParams(**dict(spec.risk_overrides))


def planner_params(spec: ScenarioSpec) -> PlannerParams:
    return PlannerParams(v_desired=spec.v_desired, **dict(spec.planner_overrides))


def warning_config(spec: ScenarioSpec,
                   novel_threshold: Optional[float] = None,
                   baseline_threshold: Optional[float] = None) -> WarningConfig:
    """Scenario warning config, with optional command-line overrides on top."""
    kwargs = dict(spec.warning_overrides)
    if novel_threshold is not None:
        kwargs["novel_threshold"] = novel_threshold
    if baseline_threshold is not None:
        kwargs["baseline_threshold"] = baseline_threshold
    return WarningConfig(**kwargs)


def _build_agent(spec: ScenarioSpec, aspec: AgentSpec) -> AgentState:
    return agent_on_path(aspec.agent_id, spec.path_by_id(aspec.path_id),
                         aspec.arc, aspec.speed, extent=aspec.extent)


def initial_world(spec: ScenarioSpec) -> WorldState:
    """Objective world at t = 0."""
    ego = _build_agent(spec, spec.ego)
    others = tuple(_build_agent(spec, a) for a in spec.others)
    return WorldState(time=0.0, ego=ego, others=others, paths=tuple(spec.paths))


def validate(spec: ScenarioSpec) -> List[str]:
    """Collect every violation of the scenario invariants.

    Returns an empty list when the spec is consistent. Violations are
    plain strings naming the offending agent or field; nothing raises.
    """
    problems: List[str] = []
    if spec.duration <= 0.0:
        problems.append(f"duration {spec.duration} must be positive")
    if spec.dt <= 0.0:
        problems.append(f"dt {spec.dt} must be positive")
    elif spec.duration > 0.0 and spec.dt > spec.duration:
        problems.append(f"dt {spec.dt} exceeds duration {spec.duration}")
    if spec.v_off < 0.0:
        problems.append(f"v_off {spec.v_off} must be non-negative")
    if spec.v_desired <= 0.0:
        problems.append(f"v_desired {spec.v_desired} must be positive")

    path_ids = [p.path_id for p in spec.paths]
    if not path_ids:
        problems.append("scenario has no paths")
    for pid in sorted({p for p in path_ids if path_ids.count(p) > 1}):
        problems.append(f"duplicate path id {pid!r}")
    known_paths = {p.path_id: p for p in spec.paths}

    agents = (spec.ego,) + spec.others
    agent_ids = [a.agent_id for a in agents]
    for aid in sorted({a for a in agent_ids if agent_ids.count(a) > 1}):
        problems.append(f"duplicate agent id {aid!r}")
    for a in agents:
        path = known_paths.get(a.path_id)
        if path is None:
            problems.append(f"agent {a.agent_id!r}: unknown path {a.path_id!r}")
        elif not 0.0 <= a.arc <= path.length:
            problems.append(
                f"agent {a.agent_id!r}: arc {a.arc} outside path "
                f"{a.path_id!r} [0, {path.length:g}]")
        if a.speed < 0.0:
            problems.append(f"agent {a.agent_id!r}: speed {a.speed} is negative")
        if a.extent[0] <= 0.0 or a.extent[1] <= 0.0:
            problems.append(f"agent {a.agent_id!r}: extent must be positive")
        if a.script is not None:
            problems.extend(_script_problems(a, spec.duration))
    if spec.ego.script is not None:
        problems.append("ego must not carry a script; its motion is planned")

    for lane_id in spec.candidate_lanes:
        if lane_id not in known_paths:
            problems.append(f"candidate lane {lane_id!r} is not a scenario path")

    other_ids = {a.agent_id for a in spec.others}
    problems.extend(_schedule_problems(spec.schedule, other_ids, spec.duration))

    for name, valid in (("risk_overrides", RiskParams.__dataclass_fields__),
                        ("warning_overrides", WarningConfig.__dataclass_fields__)):
        overrides = getattr(spec, name)
        for key in overrides:
            if key not in valid:
                problems.append(f"{name}: unknown field {key!r}")
    try:
        risk_params(spec)
    except (TypeError, ValueError) as exc:
        problems.append(f"risk_overrides: {exc}")
    try:
        WarningConfig(**dict(spec.warning_overrides))
    except (TypeError, ValueError) as exc:
        problems.append(f"warning_overrides: {exc}")
    return problems


def _script_problems(a: AgentSpec, duration: float) -> List[str]:
    problems = []
    script = a.script
    if script.accel_limit <= 0.0:
        problems.append(f"agent {a.agent_id!r}: script accel_limit must be positive")
    times = [t for t, _ in script.commands]
    if not times:
        problems.append(f"agent {a.agent_id!r}: script has no commands")
        return problems
    if times[0] > 0.0:
        problems.append(
            f"agent {a.agent_id!r}: script leaves [0, {times[0]:g}) uncovered; "
            "first command must start at t=0")
    if any(b <= a_ for a_, b in zip(times, times[1:])):
        problems.append(f"agent {a.agent_id!r}: script times must be strictly increasing")
    for t, v in script.commands:
        if t >= duration > 0.0:
            problems.append(f"agent {a.agent_id!r}: script command at t={t:g} "
                            f"is at or beyond duration {duration:g}")
        if v < 0.0:
            problems.append(f"agent {a.agent_id!r}: script target speed {v} is negative")
    return problems


def _schedule_problems(schedule: ErrorSchedule, other_ids,
                       duration: float) -> List[str]:
    problems = []
    entries = schedule.entries
    starts = [t for t, _ in entries]
    if entries and starts[0] > 0.0:
        problems.append(
            f"schedule leaves [0, {starts[0]:g}) uncovered; start the first "
            "entry at t=0 (use zero errors for an error-free prefix)")
    for t, errors in entries:
        if t >= duration > 0.0:
            problems.append(f"schedule entry at t={t:g} is at or beyond "
                            f"duration {duration:g}")
        for agent_id, err in errors.items():
            if agent_id not in other_ids:
                problems.append(f"schedule names unknown agent {agent_id!r} at t={t:g}")
            if err.inference >= 0.5 and err.predicted_path is None:
                problems.append(
                    f"schedule: agent {agent_id!r} at t={t:g} has inference error "
                    f"{err.inference:g} but no predicted path")
    return problems


# ---------------------------------------------------------------------------
# Built-in scenarios.
#
# The lane-change family shares one road and one set of vehicles; the four
# variants differ only in the driver-error schedule. Numbers were chosen so
# each variant plays out its intended story inside the run duration; they
# are ordinary configuration, not constants of the model.

# Thresholds the stock scenarios run with. Derived by the `calibrate`
# command: three times the largest signal either channel reaches anywhere
# in the error-free corpus. Re-run `riskwarn calibrate` after touching any
# scenario geometry and paste the new pair here.
CALIBRATED_NOVEL_THRESHOLD = 0.0007871048690326267
CALIBRATED_BASELINE_THRESHOLD = 0.0023751678288919196

_CALIBRATED_OVERRIDES = {
    "novel_threshold": CALIBRATED_NOVEL_THRESHOLD,
    "baseline_threshold": CALIBRATED_BASELINE_THRESHOLD,
}

_LC_DURATION = 25.0
_LC_DT = 0.1
_LC_V_DESIRED = 10.0
_LC_V_OFF = 7.0


def _lane_change_paths() -> Tuple[PathSpec, PathSpec]:
    right = straight_path("lane_right", (-80.0, 0.0), (420.0, 0.0))
    left = straight_path("lane_left", (-80.0, 3.5), (420.0, 3.5))
    return right, left


def _lane_change_spec(name: str, description: str,
                      schedule: ErrorSchedule,
                      extra_paths: Tuple[PathSpec, ...] = ()) -> ScenarioSpec:
    right, left = _lane_change_paths()
    ego = AgentSpec("ego", "lane_right", arc=80.0, speed=10.0,
                    extent=MOTORCYCLE_EXTENT)
    others = (
        AgentSpec("car_lead", "lane_right", arc=100.0, speed=8.5),
        AgentSpec("car_rear", "lane_left", arc=35.0, speed=11.2),
    )
    return ScenarioSpec(
        name=name, description=description,
        duration=_LC_DURATION, dt=_LC_DT,
        paths=(right, left) + extra_paths,
        ego=ego, others=others,
        candidate_lanes=("lane_right", "lane_left"),
        schedule=schedule,
        v_off=_LC_V_OFF, v_desired=_LC_V_DESIRED,
        warning_overrides=dict(_CALIBRATED_OVERRIDES),
        planner_overrides={"u_scale": 1.5e-3, "o_scale": 4e-4},
    )


def _lane_change_no_error() -> ScenarioSpec:
    return _lane_change_spec(
        "lane_change_no_error",
        "Two-lane road. The rider closes on a slower lead car, merges into "
        "a safe gap on the left lane, and continues; nobody gets close.",
        ErrorSchedule(),
    )


def _lane_change_notice() -> ScenarioSpec:
    schedule = ErrorSchedule(entries=(
        (0.0, {"car_rear": AgentErrors(notice=1.0)}),
    ))
    return _lane_change_spec(
        "lane_change_notice",
        "The rider never notices the car approaching on the left lane, "
        "merges in front of it, and is run down late in the run.",
        schedule,
    )


def _lane_change_forecast() -> ScenarioSpec:
    schedule = ErrorSchedule(entries=(
        (0.0, {"car_rear": AgentErrors(forecast=1.0)}),
    ))
    return _lane_change_spec(
        "lane_change_forecast",
        "The rider overestimates the left-lane car's speed, aborts the "
        "overtake as the phantom bears down, and tucks back in behind the "
        "slow lead far closer than a correct read would ever sit.",
        schedule,
    )


def _lane_change_inference() -> ScenarioSpec:
    right, left = _lane_change_paths()
    # The hypothesized maneuver stops at the end of the blend: the rider
    # takes the car's drift for a pull-off and writes it off from there on.
    blend = build_lane_change_path(left, 25.0, right, tail=False)
    predicted = PathSpec("rear_merge_right", blend.points,
                         lane_width=blend.lane_width, terminal_lane="lane_right")
    schedule = ErrorSchedule(entries=(
        (0.0, {"car_rear": AgentErrors(inference=1.0, predicted_path=predicted)}),
    ))
    return _lane_change_spec(
        "lane_change_inference",
        "The rider wrongly concludes the left-lane car is merging right and "
        "out of play, treats the left lane as clearing, and settles into "
        "its path.",
        schedule,
        extra_paths=(predicted,),
    )


def _intersection_priority() -> ScenarioSpec:
    road_ego = straight_path("road_ego", (-160.0, 0.0), (160.0, 0.0))
    road_cross = straight_path("road_cross", (0.0, -120.0), (0.0, 160.0))
    ego = AgentSpec("ego", "road_ego", arc=63.0, speed=5.0)
    cross = AgentSpec("car_cross", "road_cross", arc=75.0, speed=6.5)
    schedule = ErrorSchedule(entries=(
        (0.0, {"car_cross": AgentErrors(forecast=1.0)}),
    ))
    return ScenarioSpec(
        name="intersection_priority",
        description=(
            "The ego car accelerates toward a crossing where a side-road car "
            "is creeping in against priority. The driver reads the car as "
            "fast and long gone by their own arrival; really it is slow and "
            "arrives exactly then."),
        duration=10.0, dt=0.1,
        paths=(road_ego, road_cross),
        ego=ego, others=(cross,),
        schedule=schedule,
        v_off=8.0, v_desired=17.0,
        warning_overrides=dict(_CALIBRATED_OVERRIDES),
    )


def _intersection_occlusion() -> ScenarioSpec:
    road_ego = straight_path("road_ego", (-160.0, 0.0), (160.0, 0.0))
    road_cross = straight_path("road_cross", (0.0, -120.0), (0.0, 160.0))
    ego = AgentSpec("ego", "road_ego", arc=70.0, speed=5.5,
                    extent=MOTORCYCLE_EXTENT)
    cross = AgentSpec("car_cross", "road_cross", arc=68.1, speed=8.0)
    schedule = ErrorSchedule(entries=(
        (0.0, {"car_cross": AgentErrors(notice=1.0)}),
    ))
    return ScenarioSpec(
        name="intersection_occlusion",
        description=(
            "A motorcycle accelerates toward a blind crossing and never "
            "notices the car approaching from the side road until contact."),
        duration=10.0, dt=0.1,
        paths=(road_ego, road_cross),
        ego=ego, others=(cross,),
        schedule=schedule,
        v_off=3.0, v_desired=16.0,
        warning_overrides=dict(_CALIBRATED_OVERRIDES),
    )


def builtin_scenarios() -> Tuple[ScenarioSpec, ...]:
    """The six stock scenarios, in their canonical order."""
    return (
        _lane_change_no_error(),
        _lane_change_notice(),
        _lane_change_forecast(),
        _lane_change_inference(),
        _intersection_priority(),
        _intersection_occlusion(),
    )


def builtin_scenario(name: str) -> ScenarioSpec:
    for spec in builtin_scenarios():
        if spec.name == name:
            return spec
    known = ", ".join(s.name for s in builtin_scenarios())
    raise KeyError(f"unknown builtin scenario {name!r}; known: {known}")


# ---------------------------------------------------------------------------
# Threshold-calibration corpus: error-free runs that must stay warning-free.

def _calib_follow_steady() -> ScenarioSpec:
    lane = straight_path("lane", (-50.0, 0.0), (400.0, 0.0))
    return ScenarioSpec(
        name="calib_follow_steady",
        description="Following a faster lead car; the gap only opens.",
        duration=12.0, dt=0.1,
        paths=(lane,),
        ego=AgentSpec("ego", "lane", arc=50.0, speed=10.0),
        others=(AgentSpec("car_lead", "lane", arc=80.0, speed=12.0),),
        v_desired=10.5,
        warning_overrides=dict(_CALIBRATED_OVERRIDES),
    )


def _calib_follow_close() -> ScenarioSpec:
    lane = straight_path("lane", (-50.0, 0.0), (400.0, 0.0))
    return ScenarioSpec(
        name="calib_follow_close",
        description=(
            "Closing on a slightly slower lead from a modest gap; the driver "
            "eases off and settles behind it. The steepest error-free "
            "approach in the corpus."),
        duration=12.0, dt=0.1,
        paths=(lane,),
        ego=AgentSpec("ego", "lane", arc=50.0, speed=12.0),
        others=(AgentSpec("car_lead", "lane", arc=72.0, speed=10.5),),
        v_desired=12.0,
        warning_overrides=dict(_CALIBRATED_OVERRIDES),
    )


def _calib_cross_clear() -> ScenarioSpec:
    road_ego = straight_path("road_ego", (-100.0, 0.0), (260.0, 0.0))
    road_cross = straight_path("road_cross", (0.0, -140.0), (0.0, 140.0))
    return ScenarioSpec(
        name="calib_cross_clear",
        description="Crossing traffic far enough away that arrivals never align.",
        duration=12.0, dt=0.1,
        paths=(road_ego, road_cross),
        ego=AgentSpec("ego", "road_ego", arc=40.0, speed=12.0),
        others=(AgentSpec("car_cross", "road_cross", arc=40.0, speed=10.0),),
        v_desired=12.0,
        warning_overrides=dict(_CALIBRATED_OVERRIDES),
    )


def _calib_cross_yield() -> ScenarioSpec:
    road_ego = straight_path("road_ego", (-100.0, 0.0), (260.0, 0.0))
    road_cross = straight_path("road_cross", (0.0, -140.0), (0.0, 140.0))
    yielding = AgentSpec(
        "car_cross", "road_cross", arc=88.0, speed=8.0,
        script=ScriptedBehavior(commands=((0.0, 2.0),), accel_limit=2.5))
    return ScenarioSpec(
        name="calib_cross_yield",
        description=(
            "A crossing car on a colliding course brakes to yield from the "
            "first moment; only stale extrapolation keeps it threatening."),
        duration=12.0, dt=0.1,
        paths=(road_ego, road_cross),
        ego=AgentSpec("ego", "road_ego", arc=40.0, speed=12.0),
        others=(yielding,),
        v_desired=12.0,
        warning_overrides=dict(_CALIBRATED_OVERRIDES),
    )


def calibration_scenarios() -> Tuple[ScenarioSpec, ...]:
    """Error-free corpus for threshold calibration: the stock no-error lane
    change plus four small scenarios (two following, two crossing)."""
    return (
        _lane_change_no_error(),
        _calib_follow_steady(),
        _calib_follow_close(),
        _calib_cross_clear(),
        _calib_cross_yield(),
    )
