"""Collision risk from overlapping position uncertainty.

Each agent's future position is an isotropic 2D Gaussian whose standard
deviation grows linearly with prediction time; vehicle footprints fold
into the variance in quadrature. The product of two such densities has a
closed-form integral, which serves as the instantaneous collision event
rate after weighting by closing speed. Accumulating rate times severity
along a pair of trajectories, discounted by the survival probability of
having had no event yet, yields a scalar trajectory risk.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np

from .perception import PerceivedWorld
from .world import AgentState, PathSpec, WorldState


@dataclass(frozen=True)
class RiskParams:
    """Tuning knobs for the risk model and its evaluation grids."""

    sigma_base: float = 0.5        # m, position uncertainty at tau = 0
    sigma_growth: float = 0.3      # m/s, uncertainty growth per second of prediction
    event_rate_scale: float = 1.0  # 1/s per (m/s * overlap), rate calibration
    severity_scale: float = 0.01   # scales the squared-speed severity proxy
    horizon: float = 8.0           # s, prediction horizon
    map_time_steps: int = 40
    map_velocity_steps: int = 40
    v_max: float = 20.0            # m/s, top of the velocity axis

    def __post_init__(self):
        if self.sigma_base <= 0.0 or self.sigma_growth < 0.0:
            raise ValueError("sigma_base must be positive, sigma_growth non-negative")
        if self.horizon <= 0.0 or self.map_time_steps < 2 or self.map_velocity_steps < 2:
            raise ValueError("horizon must be positive and grids need >= 2 steps")

    def time_grid(self) -> np.ndarray:
        return np.linspace(0.0, self.horizon, self.map_time_steps)

    def velocity_grid(self) -> np.ndarray:
        return np.linspace(0.0, self.v_max, self.map_velocity_steps)


def effective_radius(extent: Tuple[float, float]) -> float:
    """Scalar footprint margin folded into the isotropic uncertainty.

    A quarter of the vehicle width (half of the half-width). Deliberately
    small: the risk field is a likelihood shaper, not a contact model, and
    the scalar must stay well under the lane width or routine adjacent-lane
    passes drown out genuine conflicts. Actual contact is detected
    separately with the full footprint ellipses.
    """
    return 0.5 * extent[1]


def position_sigma(tau, params: RiskParams):
    """Position standard deviation at prediction time tau."""
    return params.sigma_base + params.sigma_growth * np.asarray(tau, dtype=float)


def gaussian_overlap(dist, var_sum):
    """Integral of the product of two isotropic 2D Gaussians.

    dist is the distance between the means and var_sum the sum of the two
    (per-axis) variances. Closed form: exp(-d^2 / (2 S)) / (2 pi S).
    """
    d = np.asarray(dist, dtype=float)
    s = np.asarray(var_sum, dtype=float)
    return np.exp(-(d * d) / (2.0 * s)) / (2.0 * math.pi * s)


def collision_event_rate(dist, rel_speed, tau, radius_a: float, radius_b: float,
                         params: RiskParams):
    """Instantaneous collision event rate between two predicted agents.

    The overlap of the two position densities is weighted by the closing
    speed, so two agents at rest on the same spot produce no events while
    fast-closing agents produce many.
    """
    sig2 = position_sigma(tau, params) ** 2
    var_sum = (sig2 + radius_a * radius_a) + (sig2 + radius_b * radius_b)
    return params.event_rate_scale * np.asarray(rel_speed, dtype=float) * \
        gaussian_overlap(dist, var_sum)


def severity(rel_speed, params: RiskParams):
    """Collision severity proxy, quadratic in the closing speed."""
    v = np.asarray(rel_speed, dtype=float)
    return params.severity_scale * 0.5 * v * v


@dataclass(frozen=True)
class Trajectory:
    """Sampled future motion of one agent on a common time grid."""

    times: np.ndarray       # (T,) s
    positions: np.ndarray   # (T, 2) m
    velocities: np.ndarray  # (T, 2) m/s
    radius: float           # m, effective footprint radius


@dataclass(frozen=True)
class PredictedAgent:
    """Another agent's predicted trajectory plus the driver's awareness."""

    agent_id: str
    aware: bool
    trajectory: Trajectory


def predict_constant(agent: AgentState, times: np.ndarray) -> Trajectory:
    """Constant-speed prediction along the agent's path.

    The arc position is clamped at the path end; scenario paths are built
    long enough that the clamp stays out of reach within the horizon.
    """
    arcs = agent.arc + agent.speed * np.asarray(times, dtype=float)
    positions = agent.path.position(arcs)
    tangents = agent.path.tangent(arcs)
    velocities = agent.speed * tangents
    return Trajectory(times=np.asarray(times, dtype=float), positions=positions,
                      velocities=velocities, radius=effective_radius(agent.extent))


View = Union[WorldState, PerceivedWorld]


def predict_others(view: View, times: np.ndarray) -> Tuple[PredictedAgent, ...]:
    """Constant-speed predictions for every non-ego agent in a view.

    Objective worlds treat every agent as seen; perceived worlds carry the
    driver's awareness flags and distorted states.
    """
    out = []
    if isinstance(view, WorldState):
        for a in view.others:
            out.append(PredictedAgent(a.agent_id, True, predict_constant(a, times)))
    else:
        for p in view.others:
            out.append(PredictedAgent(p.state.agent_id, p.aware,
                                      predict_constant(p.state, times)))
    return tuple(out)


@dataclass(frozen=True)
class TrajectoryRisk:
    """Accumulated risk of one ego trajectory against predicted agents."""

    total: float
    per_agent: Dict[str, float]
    peak_time: Optional[float]  # s, time of the largest instantaneous term


def trajectory_risk(ego: Trajectory, others: Sequence[PredictedAgent],
                    params: RiskParams) -> TrajectoryRisk:
    """Integrate survival-weighted rate times severity along the horizon.

    survival(tau) discounts events that can only happen if no earlier event
    occurred: exp(-integral of the total rate up to tau). Agents flagged
    not-aware contribute exactly zero, matching their removal.
    """
    times = ego.times
    n = len(times)
    dtau = float(times[1] - times[0]) if n > 1 else 0.0
    zero = np.zeros(n)
    rate_total = np.zeros(n)
    dens: list = []
    for other in others:
        if not other.aware:
            dens.append(zero)
            continue
        tr = other.trajectory
        delta = tr.positions - ego.positions
        dist = np.hypot(delta[:, 0], delta[:, 1])
        dvel = tr.velocities - ego.velocities
        rel = np.hypot(dvel[:, 0], dvel[:, 1])
        rate = collision_event_rate(dist, rel, times, ego.radius, tr.radius, params)
        rate_total = rate_total + rate
        dens.append(rate * severity(rel, params))
    hazard = np.concatenate(([0.0], np.cumsum(rate_total)[:-1])) * dtau
    surv = np.exp(-hazard)
    per_agent: Dict[str, float] = {}
    total = 0.0
    inst = np.zeros(n)
    for other, d in zip(others, dens):
        contribution = float(np.sum(surv * d) * dtau)
        per_agent[other.agent_id] = contribution
        total += contribution
        inst = inst + surv * d
    peak_time = float(times[int(np.argmax(inst))]) if total > 0.0 else None
    return TrajectoryRisk(total=total, per_agent=per_agent, peak_time=peak_time)


@dataclass(frozen=True)
class RiskMap:
    """Instantaneous risk density over future time and held ego velocity."""

    times: np.ndarray       # (T,) s
    velocities: np.ndarray  # (V,) m/s
    grid: np.ndarray        # (T, V), rate * severity
    path_id: str


def build_risk_map(ego: AgentState, path: PathSpec, view: View,
                   params: RiskParams) -> RiskMap:
    """Risk density grid for the ego holding each candidate velocity.

    Cell (i, j) is the instantaneous rate times severity at future time
    times[i] if the ego held velocities[j] along the candidate path from
    now, against constant-speed predictions of all seen agents.
    """
    times = params.time_grid()
    vels = params.velocity_grid()
    arc0 = ego.arc if path is ego.path else path.project(ego.position)
    arcs = arc0 + np.outer(times, vels)              # (T, V)
    shape = arcs.shape
    flat = arcs.reshape(-1)
    pos = path.position(flat).reshape(shape + (2,))   # (T, V, 2)
    tan = path.tangent(flat).reshape(shape + (2,))
    ego_vel = vels[None, :, None] * tan               # (T, V, 2)
    radius = effective_radius(ego.extent)
    grid = np.zeros(shape)
    for other in predict_others(view, times):
        if not other.aware:
            continue
        tr = other.trajectory
        delta = tr.positions[:, None, :] - pos
        dist = np.hypot(delta[..., 0], delta[..., 1])
        dvel = tr.velocities[:, None, :] - ego_vel
        rel = np.hypot(dvel[..., 0], dvel[..., 1])
        rate = collision_event_rate(dist, rel, times[:, None], radius, tr.radius, params)
        grid = grid + rate * severity(rel, params)
    return RiskMap(times=times, velocities=vels, grid=grid, path_id=path.path_id)
