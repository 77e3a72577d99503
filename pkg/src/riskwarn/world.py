"""Road geometry, path-bound agents, and forward simulation of agent motion.

Agents move in one dimension (arc length) along 2D polyline paths. Their
planar pose is always derived from the path, so position and heading stay
consistent with the geometry by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

DEFAULT_LANE_WIDTH = 3.5     # m
DEFAULT_BLEND_LENGTH = 30.0  # m, longitudinal distance of a lane-change blend
_MIN_SEGMENT = 1e-9          # m, consecutive polyline points must be farther apart


class PathSpec:
    """A 2D polyline path parameterized by arc length.

    Positions between vertices are linearly interpolated. Instances are
    treated as immutable values; compare and hash by identity, match by id
    string when serializing.
    """

    def __init__(self, path_id: str, points: Sequence, lane_width: float = DEFAULT_LANE_WIDTH,
                 terminal_lane: Optional[str] = None):
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] < 2 or pts.shape[1] != 2:
            raise ValueError(f"path {path_id!r}: need at least two 2D points")
        seg = np.diff(pts, axis=0)
        seg_len = np.hypot(seg[:, 0], seg[:, 1])
        if np.any(seg_len < _MIN_SEGMENT):
            raise ValueError(f"path {path_id!r}: consecutive points must be distinct")
        if lane_width <= 0.0:
            raise ValueError(f"path {path_id!r}: lane_width must be positive")
        self.path_id = path_id
        self.points = pts
        self.lane_width = float(lane_width)
        # lane this path ends up following; used to avoid building a blend
        # toward a lane the path already merges into
        self.terminal_lane = terminal_lane if terminal_lane is not None else path_id
        self._seg = seg
        self._seg_len = seg_len
        self._cum = np.concatenate(([0.0], np.cumsum(seg_len)))
        self.length = float(self._cum[-1])

    def __repr__(self) -> str:
        return f"PathSpec({self.path_id!r}, length={self.length:.1f})"

    def position(self, arc):
        """Interpolated (x, y) at arc length(s), clamped to [0, length]."""
        s = np.clip(np.asarray(arc, dtype=float), 0.0, self.length)
        x = np.interp(s, self._cum, self.points[:, 0])
        y = np.interp(s, self._cum, self.points[:, 1])
        return np.stack((x, y), axis=-1)

    def _segment_index(self, arc):
        s = np.clip(np.asarray(arc, dtype=float), 0.0, self.length)
        idx = np.searchsorted(self._cum, s, side="right") - 1
        return np.clip(idx, 0, len(self._seg_len) - 1)

    def tangent(self, arc):
        """Unit tangent vector(s) of the segment containing each arc length."""
        idx = self._segment_index(arc)
        t = self._seg[idx] / self._seg_len[idx][..., None]
        return t

    def heading(self, arc) -> float:
        """Tangent direction in radians at a single arc length."""
        t = self.tangent(float(arc))
        return float(math.atan2(t[1], t[0]))

    def project(self, point) -> float:
        """Arc length of the closest point on the path to a 2D point."""
        q = np.asarray(point, dtype=float)
        p0 = self.points[:-1]
        rel = q[None, :] - p0
        t = np.einsum("ij,ij->i", rel, self._seg) / (self._seg_len ** 2)
        t = np.clip(t, 0.0, 1.0)
        closest = p0 + t[:, None] * self._seg
        d2 = np.sum((closest - q[None, :]) ** 2, axis=1)
        i = int(np.argmin(d2))
        return float(self._cum[i] + t[i] * self._seg_len[i])

    def distance_to(self, point) -> float:
        """Euclidean distance from a 2D point to the path."""
        q = np.asarray(point, dtype=float)
        c = self.position(self.project(q))
        return float(np.hypot(*(c - q)))


@dataclass(frozen=True)
class AgentState:
    """Immutable snapshot of one agent bound to a path.

    extent is the (half_length, half_width) of the vehicle footprint in
    meters. position and heading are derived from path and arc.
    """

    agent_id: str
    path: PathSpec
    arc: float
    speed: float           # m/s, along the path, never negative
    accel: float = 0.0     # m/s^2, last applied command
    extent: tuple = (2.3, 1.0)
    position: tuple = (0.0, 0.0)
    heading: float = 0.0
    finished: bool = False


def agent_on_path(agent_id: str, path: PathSpec, arc: float, speed: float,
                  extent: tuple = (2.3, 1.0), accel: float = 0.0) -> AgentState:
    """Create an AgentState with pose derived from the path."""
    if speed < 0.0:
        raise ValueError(f"agent {agent_id!r}: speed must be non-negative")
    if extent[0] <= 0.0 or extent[1] <= 0.0:
        raise ValueError(f"agent {agent_id!r}: extent must be positive")
    arc = float(np.clip(arc, 0.0, path.length))
    pos = path.position(arc)
    return AgentState(
        agent_id=agent_id, path=path, arc=arc, speed=float(speed), accel=float(accel),
        extent=(float(extent[0]), float(extent[1])),
        position=(float(pos[0]), float(pos[1])), heading=path.heading(arc),
        finished=arc >= path.length,
    )


def advance_agent(state: AgentState, accel: float, dt: float) -> AgentState:
    """Advance one agent by dt under a constant acceleration command.

    Integration is piecewise exact: if the commanded deceleration would drive
    the speed through zero inside the step, the agent travels v^2/(2|a|) and
    stops; it never reverses. An agent that reaches the end of its path is
    held there with its speed frozen and marked finished.
    """
    if dt < 0.0:
        raise ValueError("dt must be non-negative")
    if state.finished or dt == 0.0:
        return state
    v0 = state.speed
    if accel < 0.0 and v0 + accel * dt <= 0.0:
        ds = v0 * v0 / (2.0 * -accel)
        v1 = 0.0
    else:
        ds = v0 * dt + 0.5 * accel * dt * dt
        v1 = v0 + accel * dt
    arc = state.arc + ds
    finished = arc >= state.path.length
    if finished:
        arc = state.path.length
        v1 = v0
    pos = state.path.position(arc)
    return replace(
        state, arc=float(arc), speed=float(v1), accel=float(accel),
        position=(float(pos[0]), float(pos[1])), heading=state.path.heading(arc),
        finished=finished,
    )


def reseat_agent(state: AgentState, new_path: PathSpec) -> AgentState:
    """Move an agent onto another path at the closest arc position."""
    arc = new_path.project(state.position)
    pos = new_path.position(arc)
    return replace(
        state, path=new_path, arc=float(arc),
        position=(float(pos[0]), float(pos[1])), heading=new_path.heading(arc),
        finished=arc >= new_path.length,
    )


@dataclass(frozen=True)
class WorldState:
    """Objective world at one instant: ego, other agents, available paths."""

    time: float
    ego: AgentState
    others: tuple
    paths: tuple

    def agents(self) -> Iterable[AgentState]:
        yield self.ego
        yield from self.others

    def path_by_id(self, path_id: str) -> PathSpec:
        for p in self.paths:
            if p.path_id == path_id:
                return p
        raise KeyError(f"unknown path {path_id!r}")


def world_step(world: WorldState, ego_accel: float,
               scripted_accels: Mapping[str, float], dt: float) -> WorldState:
    """Advance every agent by dt; others use their scripted accelerations."""
    ego = advance_agent(world.ego, ego_accel, dt)
    others = tuple(
        advance_agent(a, scripted_accels.get(a.agent_id, 0.0), dt)
        for a in world.others
    )
    return WorldState(time=world.time + dt, ego=ego, others=others, paths=world.paths)


def with_path(world: WorldState, path: PathSpec) -> WorldState:
    """Return a world whose ego follows the given path, registering it."""
    if path is world.ego.path:
        return world
    ego = reseat_agent(world.ego, path)
    paths = world.paths if any(p is path for p in world.paths) else world.paths + (path,)
    return WorldState(time=world.time, ego=ego, others=world.others, paths=paths)


def _support_radius(extent: tuple, heading: float, direction: float) -> float:
    """Radius of the footprint ellipse toward a world-frame direction."""
    hl, hw = extent
    phi = direction - heading
    c, s = math.cos(phi), math.sin(phi)
    return hl * hw / math.sqrt((hw * c) ** 2 + (hl * s) ** 2)


def agents_collide(a: AgentState, b: AgentState) -> bool:
    """Footprint overlap test between two agents.

    Each footprint is the ellipse with semi-axes (half_length, half_width)
    aligned to the agent heading; overlap is tested along the line of
    centers, which is exact for circles and a close approximation for the
    mildly eccentric ellipses used here.
    """
    dx = b.position[0] - a.position[0]
    dy = b.position[1] - a.position[1]
    dist = math.hypot(dx, dy)
    if dist < 1e-12:
        return True
    direction = math.atan2(dy, dx)
    ra = _support_radius(a.extent, a.heading, direction)
    rb = _support_radius(b.extent, b.heading, direction + math.pi)
    return dist <= ra + rb


def build_lane_change_path(current: PathSpec, start_arc: float, target: PathSpec,
                           blend_length: float = DEFAULT_BLEND_LENGTH,
                           sample_step: float = 0.5, tail: bool = True) -> PathSpec:
    """Build a path that eases from the current path into a target lane.

    The lateral motion follows a cubic ease (zero lateral slope at both
    ends) over blend_length of longitudinal travel, after which the path
    continues along the target lane to its end. With tail=False the path
    stops at the end of the blend, which suits hypothesized maneuvers that
    leave the road there.
    """
    start = current.position(start_arc)
    s_t0 = target.project(start)
    blend_end = min(s_t0 + blend_length, target.length)
    span = blend_end - s_t0
    if span <= _MIN_SEGMENT:
        raise ValueError(f"no room to blend into {target.path_id!r}")
    n = max(2, int(math.ceil(span / sample_step)) + 1)
    u = np.linspace(0.0, 1.0, n)
    w = u * u * (3.0 - 2.0 * u)
    src = current.position(start_arc + u * span)
    dst = target.position(s_t0 + u * span)
    pts = (1.0 - w)[:, None] * src + w[:, None] * dst
    if tail:
        tail_mask = target._cum > blend_end + _MIN_SEGMENT
        if np.any(tail_mask):
            pts = np.vstack((pts, target.points[tail_mask]))
    keep = [0]
    for i in range(1, len(pts)):
        if np.hypot(*(pts[i] - pts[keep[-1]])) > _MIN_SEGMENT:
            keep.append(i)
    # Name the blend after the lane it leaves, not the full path id, so a
    # change-of-mind mid-blend does not produce ever-longer chained ids.
    return PathSpec(
        f"{current.terminal_lane}_to_{target.path_id}", pts[keep],
        lane_width=target.lane_width, terminal_lane=target.terminal_lane,
    )


def straight_path(path_id: str, start, end, lane_width: float = DEFAULT_LANE_WIDTH) -> PathSpec:
    """Two-point straight path from start to end."""
    return PathSpec(path_id, [start, end], lane_width=lane_width)
