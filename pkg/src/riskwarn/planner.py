"""Velocity and path selection by cost minimization.

Candidate behaviors combine a path choice with a trapezoidal velocity
profile: ramp at the acceleration limit from the current speed toward a
target, then hold. Each candidate is scored as

    cost = risk - utility + comfort_penalty

and the planner picks the exact minimizer over the candidate grid, with a
deterministic tie-break preferring small speed changes, earlier-listed
paths (the current path is listed first), and lower targets.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .risk import (RiskParams, Trajectory, TrajectoryRisk, View,
                   effective_radius, predict_others, trajectory_risk)
from .world import AgentState, PathSpec


def default_targets(v_max: float = 20.0, step: float = 0.5) -> Tuple[float, ...]:
    return tuple(np.arange(0.0, v_max + step / 2.0, step))


@dataclass(frozen=True)
class PlannerParams:
    """Cost weights and the candidate target-speed grid."""

    v_targets: Tuple[float, ...] = default_targets()
    accel_limit: float = 4.0   # m/s^2, ramp rate of the profiles
    u_scale: float = 1e-3      # utility weight
    o_scale: float = 1e-6      # comfort (squared acceleration) weight
    v_desired: float = 14.0    # m/s, speed the driver is content with

    def __post_init__(self):
        if self.accel_limit <= 0.0 or self.v_desired <= 0.0:
            raise ValueError("accel_limit and v_desired must be positive")
        if len(self.v_targets) == 0 or min(self.v_targets) < 0.0:
            raise ValueError("v_targets must be non-empty and non-negative")


@dataclass(frozen=True)
class VelocityProfile:
    """Trapezoidal speed profile sampled on the planning time grid."""

    v_start: float
    v_target: float
    accel_limit: float
    times: np.ndarray
    speeds: np.ndarray

    @property
    def ramp_time(self) -> float:
        return abs(self.v_target - self.v_start) / self.accel_limit

    def speed_at(self, t: float) -> float:
        """Exact profile speed at an arbitrary time."""
        if self.v_target >= self.v_start:
            return min(self.v_start + self.accel_limit * t, self.v_target)
        return max(self.v_start - self.accel_limit * t, self.v_target)

    def displacement(self) -> np.ndarray:
        """Exact distance traveled by each sample time."""
        t = self.times
        t_r = self.ramp_time
        sgn = 1.0 if self.v_target >= self.v_start else -1.0
        a = sgn * self.accel_limit
        ramp = self.v_start * t + 0.5 * a * t * t
        s_ramp_end = self.v_start * t_r + 0.5 * a * t_r * t_r
        after = s_ramp_end + self.v_target * (t - t_r)
        return np.where(t < t_r, ramp, after)


def make_profile(v_start: float, v_target: float, accel_limit: float,
                 times: np.ndarray) -> VelocityProfile:
    if v_start < 0.0 or v_target < 0.0:
        raise ValueError("profile speeds must be non-negative")
    t = np.asarray(times, dtype=float)
    if v_target >= v_start:
        speeds = np.minimum(v_start + accel_limit * t, v_target)
    else:
        speeds = np.maximum(v_start - accel_limit * t, v_target)
    return VelocityProfile(v_start=float(v_start), v_target=float(v_target),
                           accel_limit=float(accel_limit), times=t, speeds=speeds)


def utility(profile: VelocityProfile, params: PlannerParams) -> float:
    """Progress utility: mean speed relative to the desired speed, capped at 1."""
    frac = np.minimum(profile.speeds / params.v_desired, 1.0)
    return params.u_scale * float(np.mean(frac))


def comfort_penalty(profile: VelocityProfile, params: PlannerParams) -> float:
    """Mean squared acceleration over the horizon, from the ramp closed form."""
    horizon = float(profile.times[-1]) if len(profile.times) else 0.0
    if horizon <= 0.0:
        return 0.0
    t_r = min(profile.ramp_time, horizon)
    return params.o_scale * profile.accel_limit ** 2 * t_r / horizon


def ego_trajectory(path: PathSpec, arc0: float, profile: VelocityProfile,
                   radius: float) -> Trajectory:
    """Sample the ego's motion along a path under a velocity profile."""
    arcs = arc0 + profile.displacement()
    positions = path.position(arcs)
    tangents = path.tangent(arcs)
    velocities = profile.speeds[:, None] * tangents
    return Trajectory(times=profile.times, positions=positions,
                      velocities=velocities, radius=radius)


@dataclass(frozen=True)
class BehaviorCandidate:
    """One scored (path, velocity profile) combination."""

    path: PathSpec
    path_index: int
    profile: VelocityProfile
    trajectory: Trajectory
    risk: TrajectoryRisk
    utility: float
    comfort: float
    cost: float


@dataclass(frozen=True)
class PlannedBehavior:
    """Planner output: the chosen candidate plus the full scored set."""

    chosen: BehaviorCandidate
    candidates: Tuple[BehaviorCandidate, ...]


def plan(ego: AgentState, view: View, path_candidates: Sequence[PathSpec],
         risk_params: RiskParams, params: PlannerParams) -> PlannedBehavior:
    """Pick the lowest-cost behavior for the ego against a (perceived) view.

    The search is exhaustive over every path candidate and target speed.
    Ties on cost fall back to the smallest speed change, then the earliest
    path in the candidate list, then the lower target speed.
    """
    if not path_candidates:
        raise ValueError("need at least one path candidate")
    times = risk_params.time_grid()
    others = predict_others(view, times)
    radius = effective_radius(ego.extent)
    # The hold-current-speed profile must always be representable, otherwise
    # a grid mismatch can force the plan into a needlessly worse profile
    # than plain coasting.
    v_targets = params.v_targets
    if ego.speed not in v_targets:
        v_targets = v_targets + (ego.speed,)
    candidates = []
    best = None
    best_key = None
    for idx, path in enumerate(path_candidates):
        arc0 = ego.arc if path is ego.path else path.project(ego.position)
        for v_t in v_targets:
            profile = make_profile(ego.speed, v_t, params.accel_limit, times)
            traj = ego_trajectory(path, arc0, profile, radius)
            risk = trajectory_risk(traj, others, risk_params)
            u = utility(profile, params)
            o = comfort_penalty(profile, params)
            cost = risk.total - u + o
            cand = BehaviorCandidate(path=path, path_index=idx, profile=profile,
                                     trajectory=traj, risk=risk, utility=u,
                                     comfort=o, cost=cost)
            candidates.append(cand)
            key = (cost, abs(v_t - ego.speed), idx, v_t)
            if best_key is None or key < best_key:
                best, best_key = cand, key
    return PlannedBehavior(chosen=best, candidates=tuple(candidates))


def first_step_accel(profile: VelocityProfile, dt: float) -> float:
    """Acceleration command that tracks the profile over one control step."""
    if dt <= 0.0:
        return 0.0
    return (profile.speed_at(dt) - profile.v_start) / dt
