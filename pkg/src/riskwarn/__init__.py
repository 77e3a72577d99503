"""Driver warning simulator.

Simulates a driver whose view of the traffic around them carries modeled
errors (missed vehicles, misjudged speeds, wrong maneuver guesses), plans
the behavior that view suggests, and scores that behavior against the
objective world to raise a warning before the driver's mistake matures
into a collision. A constant-velocity baseline warning system runs
alongside for comparison.
"""

from .exceptions import PerceptionError, ScenarioError
from .perception import AgentErrors, ErrorSchedule, PerceivedWorld, perceive
from .planner import PlannerParams, plan
from .risk import RiskMap, RiskParams, collision_event_rate, trajectory_risk
from .scenarios import (ScenarioSpec, builtin_scenario, builtin_scenarios,
                        calibration_scenarios, validate)
from .simulate import SimulationResult, run_scenario
from .warning import WarningConfig, WarningSample, WarningTrace, detect_warning_times
from .world import AgentState, PathSpec, WorldState, straight_path

__version__ = "0.1.0"

__all__ = [
    "AgentErrors",
    "AgentState",
    "ErrorSchedule",
    "PathSpec",
    "PerceivedWorld",
    "PerceptionError",
    "PlannerParams",
    "RiskMap",
    "RiskParams",
    "ScenarioError",
    "ScenarioSpec",
    "SimulationResult",
    "WarningConfig",
    "WarningSample",
    "WarningTrace",
    "WorldState",
    "builtin_scenario",
    "builtin_scenarios",
    "calibration_scenarios",
    "collision_event_rate",
    "detect_warning_times",
    "perceive",
    "plan",
    "run_scenario",
    "straight_path",
    "trajectory_risk",
    "validate",
    "__version__",
]
