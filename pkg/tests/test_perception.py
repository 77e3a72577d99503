import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from riskwarn.exceptions import PerceptionError, ScenarioError
from riskwarn.perception import (AgentErrors, ErrorSchedule, apply_forecast_error,
                                 apply_inference_error, apply_notice_error,
                                 perceive, perceive_agent)
from riskwarn.world import WorldState, agent_on_path, straight_path

LANE = straight_path("lane", (0.0, 0.0), (400.0, 0.0))
SIDE = straight_path("side", (0.0, 3.5), (400.0, 3.5))


def small_world(n_others: int, speeds) -> WorldState:
    ego = agent_on_path("ego", LANE, arc=50.0, speed=10.0)
    others = tuple(
        agent_on_path(f"car_{i}", LANE if i % 2 == 0 else SIDE,
                      arc=20.0 + 30.0 * i, speed=speeds[i])
        for i in range(n_others)
    )
    return WorldState(time=0.0, ego=ego, others=others, paths=(LANE, SIDE))


def test_notice_cut_is_half():
    assert apply_notice_error(0.0)
    assert apply_notice_error(0.49)
    assert not apply_notice_error(0.5)
    assert not apply_notice_error(1.0)


def test_forecast_shifts_and_clamps_speed():
    assert apply_forecast_error(10.0, 0.5, v_off=4.0) == 12.0
    assert apply_forecast_error(10.0, -1.0, v_off=4.0) == 6.0
    assert apply_forecast_error(2.0, -1.0, v_off=7.0) == 0.0


def test_inference_below_cut_keeps_path():
    assert apply_inference_error(LANE, 0.49, SIDE) is LANE
    assert apply_inference_error(LANE, 0.0, None) is LANE


def test_inference_requires_predicted_path():
    with pytest.raises(PerceptionError):
        apply_inference_error(LANE, 1.0, None)


def test_inference_reseats_agent_on_predicted_path():
    a = agent_on_path("a", LANE, arc=60.0, speed=8.0)
    p = perceive_agent(a, AgentErrors(inference=1.0, predicted_path=SIDE), t=0.0)
    assert p.state.path is SIDE
    assert p.state.arc == pytest.approx(60.0)
    assert p.state.position[1] == pytest.approx(3.5)
    assert p.aware


def test_zero_errors_reuse_objective_state():
    a = agent_on_path("a", LANE, arc=60.0, speed=8.0)
    p = perceive_agent(a, AgentErrors(), t=0.0)
    assert p.state is a


def test_schedule_is_piecewise_constant():
    early = {"a": AgentErrors(notice=1.0)}
    late = {"a": AgentErrors(forecast=1.0)}
    sched = ErrorSchedule(entries=((1.0, early), (5.0, late)))
    assert sched.at(0.0) == {}
    assert sched.at(1.0) is early
    assert sched.at(4.999) is early
    assert sched.at(5.0) is late
    assert sched.at(100.0) is late


def test_schedule_rejects_bad_entries():
    with pytest.raises(ScenarioError):
        ErrorSchedule(entries=((1.0, {}), (1.0, {})))
    with pytest.raises(ScenarioError):
        ErrorSchedule(entries=((-0.5, {}),))
    with pytest.raises(ScenarioError):
        ErrorSchedule(entries=((0.0, {"a": AgentErrors(notice=1.5)}),))
    with pytest.raises(ScenarioError):
        ErrorSchedule(entries=((0.0, {"a": AgentErrors(forecast=-1.5)}),))


def test_perceive_keeps_agent_set_stable():
    world = small_world(2, speeds=[8.0, 12.0])
    sched = ErrorSchedule(entries=((0.0, {"car_0": AgentErrors(notice=1.0)}),))
    view = perceive(world, sched, 0.0)
    assert [p.state.agent_id for p in view.others] == ["car_0", "car_1"]
    assert not view.others[0].aware
    assert view.others[1].aware


@settings(max_examples=80, deadline=None)
@given(
    speeds=st.lists(st.floats(0.0, 30.0), min_size=1, max_size=4),
    t=st.floats(0.0, 20.0),
)
def test_zero_schedule_is_identity(speeds, t):
    world = small_world(len(speeds), speeds)
    view = perceive(world, ErrorSchedule(), t)
    assert view.ego is world.ego
    for p, a in zip(view.others, world.others):
        assert p.aware
        assert p.state is a


@settings(max_examples=80, deadline=None)
@given(
    notice=st.floats(0.0, 1.0),
    forecast=st.floats(-1.0, 1.0),
    v_off=st.floats(0.0, 10.0),
    speed=st.floats(0.0, 30.0),
)
def test_error_terms_compose(notice, forecast, v_off, speed):
    a = agent_on_path("a", LANE, arc=40.0, speed=speed)
    p = perceive_agent(a, AgentErrors(notice=notice, forecast=forecast), 0.0, v_off)
    assert p.aware == (notice < 0.5)
    assert p.state.speed == max(0.0, speed + forecast * v_off)
    assert p.state.path is LANE
