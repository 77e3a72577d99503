import numpy as np
import pytest

from riskwarn.planner import (PlannerParams, comfort_penalty, default_targets,
                              ego_trajectory, first_step_accel, make_profile,
                              plan, utility)
from riskwarn.risk import RiskParams, effective_radius
from riskwarn.world import WorldState, agent_on_path, straight_path

RISK = RiskParams()
TIMES = RISK.time_grid()

LANE = straight_path("lane", (0.0, 0.0), (2000.0, 0.0))
LEFT = straight_path("left", (0.0, 3.5), (2000.0, 3.5))


def test_default_targets_cover_zero_to_v_max():
    targets = default_targets(v_max=20.0, step=0.5)
    assert targets[0] == 0.0
    assert targets[-1] == 20.0
    assert len(targets) == 41


def test_profile_ramps_then_holds():
    p = make_profile(4.0, 10.0, accel_limit=4.0, times=TIMES)
    assert p.ramp_time == pytest.approx(1.5)
    assert p.speed_at(0.0) == 4.0
    assert p.speed_at(1.0) == pytest.approx(8.0)
    assert p.speed_at(2.0) == 10.0
    assert np.all(p.speeds <= 10.0)
    assert np.all(np.diff(p.speeds) >= -1e-12)


def test_profile_decelerates_symmetrically():
    p = make_profile(10.0, 2.0, accel_limit=4.0, times=TIMES)
    assert p.speed_at(1.0) == pytest.approx(6.0)
    assert p.speed_at(3.0) == 2.0


def test_displacement_matches_numeric_integration():
    p = make_profile(3.0, 12.0, accel_limit=4.0, times=TIMES)
    fine = np.linspace(0.0, float(TIMES[-1]), 20001)
    speeds = np.array([p.speed_at(t) for t in fine])
    numeric = np.concatenate(([0.0], np.cumsum((speeds[1:] + speeds[:-1]) / 2.0
                                               * np.diff(fine))))
    exact = p.displacement()
    sampled = np.interp(TIMES, fine, numeric)
    np.testing.assert_allclose(exact, sampled, atol=1e-4)


def test_utility_caps_at_desired_speed():
    params = PlannerParams(v_desired=10.0, u_scale=1e-3)
    at_desired = make_profile(10.0, 10.0, 4.0, TIMES)
    above = make_profile(20.0, 20.0, 4.0, TIMES)
    assert utility(at_desired, params) == pytest.approx(1e-3)
    assert utility(above, params) == pytest.approx(1e-3)
    half = make_profile(5.0, 5.0, 4.0, TIMES)
    assert utility(half, params) == pytest.approx(0.5e-3)


def test_comfort_penalty_ramp_fraction():
    # Ramp at 4 m/s^2 for a quarter of the horizon: penalty is
    # o_scale * 16 * 0.25, exactly.
    params = PlannerParams(o_scale=1e-6, accel_limit=4.0)
    horizon = float(TIMES[-1])
    profile = make_profile(0.0, 4.0 * horizon / 4.0, 4.0, TIMES)
    assert profile.ramp_time == pytest.approx(horizon / 4.0)
    assert comfort_penalty(profile, params) == 1e-6 * 16.0 * 0.25


def test_comfort_penalty_caps_ramp_at_horizon():
    params = PlannerParams(o_scale=1e-6, accel_limit=4.0)
    profile = make_profile(0.0, 100.0, 4.0, TIMES)
    assert comfort_penalty(profile, params) == pytest.approx(1e-6 * 16.0)


def test_ego_trajectory_follows_profile():
    profile = make_profile(10.0, 10.0, 4.0, TIMES)
    traj = ego_trajectory(LANE, 100.0, profile, effective_radius((2.0, 0.9)))
    np.testing.assert_allclose(traj.positions[:, 0], 100.0 + 10.0 * TIMES)
    np.testing.assert_allclose(traj.velocities[:, 0], 10.0)


def _world_with_lead(ego_speed=10.0, lead_arc=130.0, lead_speed=6.0):
    ego = agent_on_path("ego", LANE, arc=100.0, speed=ego_speed)
    lead = agent_on_path("lead", LANE, arc=lead_arc, speed=lead_speed)
    return WorldState(0.0, ego=ego, others=(lead,), paths=(LANE, LEFT))


def test_plan_cost_is_exact_breakdown():
    world = _world_with_lead()
    params = PlannerParams(v_desired=12.0)
    behavior = plan(world.ego, world, [LANE, LEFT], RISK, params)
    for cand in behavior.candidates:
        assert cand.cost == cand.risk.total - cand.utility + cand.comfort
        assert cand.utility == utility(cand.profile, params)
        assert cand.comfort == comfort_penalty(cand.profile, params)


def test_plan_picks_global_minimum():
    world = _world_with_lead()
    params = PlannerParams(v_desired=12.0)
    behavior = plan(world.ego, world, [LANE, LEFT], RISK, params)
    assert behavior.chosen.cost == min(c.cost for c in behavior.candidates)


def test_plan_keeps_hold_speed_candidate():
    world = _world_with_lead(ego_speed=10.3)
    behavior = plan(world.ego, world, [LANE], RISK, PlannerParams(v_desired=12.0))
    holds = [c for c in behavior.candidates if c.profile.v_target == 10.3]
    assert len(holds) == 1


def test_plan_is_deterministic():
    world = _world_with_lead()
    params = PlannerParams(v_desired=12.0)
    first = plan(world.ego, world, [LANE, LEFT], RISK, params)
    second = plan(world.ego, world, [LANE, LEFT], RISK, params)
    assert first.chosen.cost == second.chosen.cost
    assert first.chosen.profile.v_target == second.chosen.profile.v_target
    assert first.chosen.path.path_id == second.chosen.path.path_id


def test_plan_avoids_slow_lead_by_lane_or_speed():
    # A much slower car dead ahead: holding course and speed must lose.
    world = _world_with_lead(ego_speed=14.0, lead_arc=125.0, lead_speed=2.0)
    params = PlannerParams(v_desired=14.0)
    behavior = plan(world.ego, world, [LANE, LEFT], RISK, params)
    chosen = behavior.chosen
    assert chosen.path.path_id == "left" or chosen.profile.v_target < 14.0
    hold = next(c for c in behavior.candidates
                if c.path.path_id == "lane" and c.profile.v_target == 14.0)
    assert chosen.cost < hold.cost


def test_plan_requires_candidates():
    world = _world_with_lead()
    with pytest.raises(ValueError):
        plan(world.ego, world, [], RISK, PlannerParams())


def test_first_step_accel_tracks_profile():
    p = make_profile(4.0, 10.0, accel_limit=4.0, times=TIMES)
    assert first_step_accel(p, 0.1) == pytest.approx(4.0)
    held = make_profile(10.0, 10.0, accel_limit=4.0, times=TIMES)
    assert first_step_accel(held, 0.1) == 0.0
