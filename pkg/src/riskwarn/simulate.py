"""Closed-loop simulation of one scenario.

Each step: perceive, plan, score both warning signals, log, then advance
the world with the ego tracking its plan and every scripted agent tracking
its commands. Warnings are recorded but never alter behavior. The run ends
early when the ego's footprint overlaps another agent's.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .perception import PerceivedWorld, perceive
from .planner import first_step_accel
from .risk import RiskMap, build_risk_map
from .scenarios import ScenarioSpec, initial_world, planner_params, risk_params
from .warning import (WarningConfig, WarningSample, WarningTimes, WarningTrace,
                      detect_warning_times, evaluate_step)
from .world import (PathSpec, WorldState, agents_collide, build_lane_change_path,
                    with_path, world_step)


@dataclass(frozen=True)
class StepRecord:
    """Everything logged about one simulation step."""

    t: float
    world: WorldState          # objective world the step started from
    perceived: PerceivedWorld  # the driver's view of it
    sample: WarningSample
    chosen_path_id: str
    chosen_target: float       # m/s, the plan's target speed
    ego_accel: float           # m/s^2, command actually executed


@dataclass(frozen=True)
class RiskMapPair:
    """Perceived and objective risk maps captured at one time."""

    t: float
    perceived: RiskMap
    objective: RiskMap


@dataclass(frozen=True)
class SimulationResult:
    spec: ScenarioSpec
    records: Tuple[StepRecord, ...]
    trace: WarningTrace
    collision_time: Optional[float]
    collision_with: Optional[str]
    riskmaps: Tuple[RiskMapPair, ...]

    def warning_times(self) -> WarningTimes:
        return detect_warning_times(self.trace)


def path_candidates(world: WorldState, lane_ids) -> List[PathSpec]:
    """Current path first, then a fresh blend into each other candidate lane.

    Blends start at the ego's present position, so a pending lane change is
    re-derived every step and the ego can also plan its way back. Lanes the
    current path already leads into are skipped.
    """
    current = world.ego.path
    cands = [current]
    for lane_id in lane_ids:
        lane = world.path_by_id(lane_id)
        if lane.terminal_lane == current.terminal_lane:
            continue
        try:
            cands.append(build_lane_change_path(current, world.ego.arc, lane))
        except ValueError:
            continue  # too close to the path end to blend
    return cands


def _collision_partner(world: WorldState) -> Optional[str]:
    for other in world.others:
        if agents_collide(world.ego, other):
            return other.agent_id
    return None


def run_scenario(spec: ScenarioSpec, config: Optional[WarningConfig] = None,
                 collect_riskmaps: bool = False,
                 riskmap_interval: float = 1.0) -> SimulationResult:
    """Simulate one scenario start to finish.

    The ego follows the freshly planned behavior each step (switching paths
    when the plan says so); other agents follow their scripts. Risk-map
    pairs are captured every riskmap_interval seconds when requested,
    built over the ego's current path.
    """
    if config is None:
        from .scenarios import warning_config
        config = warning_config(spec)
    rp = risk_params(spec)
    pp = planner_params(spec)
    world = initial_world(spec)
    steps = int(round(spec.duration / spec.dt))
    map_every = max(1, int(round(riskmap_interval / spec.dt)))

    records: List[StepRecord] = []
    maps: List[RiskMapPair] = []
    collision_time: Optional[float] = None
    collision_with: Optional[str] = None

    for i in range(steps):
        t = i * spec.dt
        cands = path_candidates(world, spec.candidate_lanes)
        sample, behavior = evaluate_step(world, spec.schedule, t, cands,
                                         config, rp, pp, spec.v_off)
        perceived = perceive(world, spec.schedule, t, spec.v_off)
        accel = first_step_accel(behavior.chosen.profile, spec.dt)
        records.append(StepRecord(
            t=t, world=world, perceived=perceived, sample=sample,
            chosen_path_id=behavior.chosen.path.path_id,
            chosen_target=behavior.chosen.profile.v_target,
            ego_accel=accel,
        ))
        if collect_riskmaps and i % map_every == 0:
            maps.append(RiskMapPair(
                t=t,
                perceived=build_risk_map(world.ego, world.ego.path, perceived, rp),
                objective=build_risk_map(world.ego, world.ego.path, world, rp),
            ))
        partner = _collision_partner(world)
        if partner is not None:
            collision_time = t
            collision_with = partner
            break
        if behavior.chosen.path is not world.ego.path:
            world = with_path(world, behavior.chosen.path)
        scripted = _scripted_accels(spec, world, t, spec.dt)
        world = world_step(world, accel, scripted, spec.dt)

    trace = WarningTrace(samples=tuple(r.sample for r in records), config=config)
    return SimulationResult(
        spec=spec, records=tuple(records), trace=trace,
        collision_time=collision_time, collision_with=collision_with,
        riskmaps=tuple(maps),
    )


def _scripted_accels(spec: ScenarioSpec, world: WorldState, t: float,
                     dt: float) -> Dict[str, float]:
    out: Dict[str, float] = {}
    for aspec in spec.others:
        if aspec.script is None:
            continue
        for agent in world.others:
            if agent.agent_id == aspec.agent_id:
                out[aspec.agent_id] = aspec.script.command_accel(agent.speed, t, dt)
                break
    return out
