"""Warning signals over a driver's planned behavior.

The novel signal answers: how risky is the behavior the driver is about to
execute, measured against the objective world? The driver plans inside
their own (possibly distorted) perception; scoring that plan objectively
exposes perception errors early. The reference signal is the classic one:
risk of everyone, ego included, simply continuing at constant speed.

Both signals are plain trajectory risks compared against thresholds; no
hysteresis is applied, and warnings do not alter the driver's behavior.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from .perception import ErrorSchedule, perceive
from .planner import PlannedBehavior, PlannerParams, plan
from .risk import RiskParams, predict_constant, predict_others, trajectory_risk
from .world import PathSpec, WorldState

DEFAULT_NOVEL_THRESHOLD = 1e-4
DEFAULT_BASELINE_THRESHOLD = 1e-3


@dataclass(frozen=True)
class WarningConfig:
    """Warning thresholds; the novel one can sit an order of magnitude lower."""

    novel_threshold: float = DEFAULT_NOVEL_THRESHOLD
    baseline_threshold: float = DEFAULT_BASELINE_THRESHOLD

    def __post_init__(self):
        if self.novel_threshold <= 0.0 or self.baseline_threshold <= 0.0:
            raise ValueError("warning thresholds must be positive")


@dataclass(frozen=True)
class WarningSample:
    """Both warning signals evaluated at one simulation step."""

    t: float
    w_novel: float       # objective risk of the perceived plan
    r_per: float         # risk of the plan inside the driver's perception
    w_baseline: float    # constant-velocity risk of the objective world
    novel_active: bool
    baseline_active: bool


@dataclass(frozen=True)
class WarningTrace:
    """Complete warning history of one run."""

    samples: Tuple[WarningSample, ...]
    config: WarningConfig


@dataclass(frozen=True)
class WarningTimes:
    """First threshold crossings of each system, and the novel lead."""

    novel_time: Optional[float]
    baseline_time: Optional[float]
    lead: Optional[float]  # s, baseline_time - novel_time; None unless both fired


def baseline_signal(world: WorldState, params: RiskParams) -> float:
    """Constant-velocity risk: every agent keeps its current speed and path."""
    times = params.time_grid()
    ego = predict_constant(world.ego, times)
    others = predict_others(world, times)
    return trajectory_risk(ego, others, params).total


def evaluate_step(world: WorldState, schedule: ErrorSchedule, t: float,
                  path_candidates: Sequence[PathSpec], config: WarningConfig,
                  risk_params: RiskParams, planner_params: PlannerParams,
                  v_off: float = 3.0) -> Tuple[WarningSample, PlannedBehavior]:
    """Plan inside the driver's perception, then score that plan objectively.

    Returns the warning sample for time t and the planned behavior so the
    caller can execute its first control step. The plan's own risk (r_per)
    is logged next to its objective re-evaluation (w_novel); with a zero
    error schedule the two are identical.
    """
    perceived = perceive(world, schedule, t, v_off)
    behavior = plan(world.ego, perceived, path_candidates, risk_params, planner_params)
    r_per = behavior.chosen.risk.total
    times = risk_params.time_grid()
    objective_others = predict_others(world, times)
    w_novel = trajectory_risk(behavior.chosen.trajectory, objective_others,
                              risk_params).total
    w_base = baseline_signal(world, params=risk_params)
    sample = WarningSample(
        t=t, w_novel=w_novel, r_per=r_per, w_baseline=w_base,
        novel_active=w_novel > config.novel_threshold,
        baseline_active=w_base > config.baseline_threshold,
    )
    return sample, behavior


def detect_warning_times(trace: WarningTrace) -> WarningTimes:
    """First activation time of each signal in a run."""
    novel_time = next((s.t for s in trace.samples if s.novel_active), None)
    baseline_time = next((s.t for s in trace.samples if s.baseline_active), None)
    lead = None
    if novel_time is not None and baseline_time is not None:
        lead = baseline_time - novel_time
    return WarningTimes(novel_time=novel_time, baseline_time=baseline_time, lead=lead)
