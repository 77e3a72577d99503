"""Driver perception model: distort the objective world through error terms.

Three error channels per observed agent, each in the driver's head only:

* notice: the driver is aware of the agent iff the error is below 0.5.
* forecast: the perceived speed is shifted by the error times a speed
  offset, clamped at zero.
* inference: at 0.5 and above the driver expects the agent to follow a
  supplied predicted path instead of its objective one.

The objective world is never modified; perception returns a parallel view.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping, Optional, Sequence, Tuple

from .exceptions import PerceptionError, ScenarioError
from .world import AgentState, PathSpec, WorldState, reseat_agent

AWARENESS_CUTOFF = 0.5   # notice error at/above this means the agent is missed
INFERENCE_CUTOFF = 0.5   # inference error at/above this swaps in the predicted path
DEFAULT_SPEED_OFFSET = 3.0  # m/s, scales the forecast error


@dataclass(frozen=True)
class AgentErrors:
    """Driver error terms about one other agent at one instant."""

    notice: float = 0.0      # in [0, 1]
    forecast: float = 0.0    # in [-1, 1]
    inference: float = 0.0   # in [0, 1]
    predicted_path: Optional[PathSpec] = None

    def validate(self, agent_id: str, t: float) -> None:
        if not 0.0 <= self.notice <= 1.0:
            raise ScenarioError(
                f"notice error {self.notice} for agent {agent_id!r} at t={t} "
                "outside [0, 1]")
        if not -1.0 <= self.forecast <= 1.0:
            raise ScenarioError(
                f"forecast error {self.forecast} for agent {agent_id!r} at t={t} "
                "outside [-1, 1]")
        if not 0.0 <= self.inference <= 1.0:
            raise ScenarioError(
                f"inference error {self.inference} for agent {agent_id!r} at t={t} "
                "outside [0, 1]")


ZERO_ERRORS = AgentErrors()


@dataclass(frozen=True)
class ErrorSchedule:
    """Piecewise-constant driver errors over time.

    entries is a sequence of (t_start, {agent_id: AgentErrors}); the entry
    with the largest t_start at or below the query time is active. Before
    the first entry, and for agents absent from the active entry, all
    errors are zero.
    """

    entries: Tuple = ()

    def __post_init__(self):
        starts = [t for t, _ in self.entries]
        if any(b <= a for a, b in zip(starts, starts[1:])):
            raise ScenarioError("schedule entry times must be strictly increasing")
        for t, errors in self.entries:
            if t < 0.0:
                raise ScenarioError(f"schedule entry time {t} is negative")
            for agent_id, err in errors.items():
                err.validate(agent_id, t)

    def at(self, t: float) -> Mapping[str, AgentErrors]:
        if t < 0.0:
            raise ScenarioError(f"schedule lookup at negative time {t}")
        active: Mapping[str, AgentErrors] = {}
        for t_start, errors in self.entries:
            if t_start <= t:
                active = errors
            else:
                break
        return active

    def errors_for(self, agent_id: str, t: float) -> AgentErrors:
        return self.at(t).get(agent_id, ZERO_ERRORS)


@dataclass(frozen=True)
class PerceivedAgent:
    """One other agent as the driver believes it to be."""

    state: AgentState
    aware: bool


@dataclass(frozen=True)
class PerceivedWorld:
    """The driver's view of the world: same shape as the objective one.

    Agents the driver missed stay in the list flagged not-aware so traces
    keep a stable agent set; risk evaluation skips them.
    """

    time: float
    ego: AgentState
    others: Tuple[PerceivedAgent, ...]


def apply_notice_error(notice: float) -> bool:
    """Whether the driver is aware of an agent given its notice error."""
    return notice < AWARENESS_CUTOFF


def apply_forecast_error(speed: float, forecast: float,
                         v_off: float = DEFAULT_SPEED_OFFSET) -> float:
    """Perceived speed under a forecast error, clamped at zero."""
    return max(0.0, speed + forecast * v_off)


def apply_inference_error(path: PathSpec, inference: float,
                          predicted: Optional[PathSpec], agent_id: str = "?",
                          t: float = 0.0) -> PathSpec:
    """Path the driver expects the agent to follow."""
    if inference < INFERENCE_CUTOFF:
        return path
    if predicted is None:
        raise PerceptionError(
            f"inference error {inference} for agent {agent_id!r} at t={t} "
            "requires a predicted path")
    return predicted


def perceive_agent(state: AgentState, errors: AgentErrors, t: float,
                   v_off: float = DEFAULT_SPEED_OFFSET) -> PerceivedAgent:
    """Apply one agent's error terms, reusing the objective state when unchanged."""
    aware = apply_notice_error(errors.notice)
    perceived = state
    path = apply_inference_error(state.path, errors.inference,
                                 errors.predicted_path, state.agent_id, t)
    if path is not state.path:
        perceived = reseat_agent(perceived, path)
    v_per = apply_forecast_error(state.speed, errors.forecast, v_off)
    if v_per != perceived.speed:
        perceived = replace(perceived, speed=v_per)
    return PerceivedAgent(state=perceived, aware=aware)


def perceive(world: WorldState, schedule: ErrorSchedule, t: float,
             v_off: float = DEFAULT_SPEED_OFFSET) -> PerceivedWorld:
    """Build the driver's view of the world at time t.

    The ego driver observes itself exactly; every other agent is passed
    through its scheduled error terms. With an all-zero schedule the
    perceived states are the objective ones, bit for bit.
    """
    active = schedule.at(t)
    others = tuple(
        perceive_agent(a, active.get(a.agent_id, ZERO_ERRORS), t, v_off)
        for a in world.others
    )
    return PerceivedWorld(time=world.time, ego=world.ego, others=others)
