import csv
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dribbleforge.errors import EmptyTrace
from dribbleforge.fixtures import seed_plan
from dribbleforge.geometry import Point2
from dribbleforge.plan import NodeParams, PlanNode, build_plan
from dribbleforge.simulation import (
    AgentState,
    SimConfig,
    Termination,
    Trace,
    sample_field,
    simulate,
    step,
    trace_document,
    trace_metrics,
    write_field_csv,
    write_trace_csv,
)


def flat_plan(accel=0.0, body=0.0):
    """Rectangle of nodes all issuing the same command."""
    nodes = [PlanNode(Point2(x, y), NodeParams(accel, body, 0.0))
             for x in (-12.0, 0.0, 12.0) for y in (-6.0, 6.0)]
    return build_plan(nodes)


# --------------------------------------------------------------------------
# single step

def test_step_aligned_acceleration():
    s0 = AgentState(position=Point2(0.0, 0.0), velocity=(4.0, 0.0), time=0.0)
    s1 = step(s0, NodeParams(3.0, 0.0, 0.0), SimConfig())
    # no turning needed, so the whole 3 m/s^2 for 0.1 s becomes speed
    assert s1.speed == pytest.approx(4.3, abs=1e-12)
    assert s1.position.x == pytest.approx(0.43, abs=1e-12)
    assert s1.position.y == 0.0
    assert s1.time == pytest.approx(0.1)


def test_step_zero_acceleration_drifts():
    s0 = AgentState(position=Point2(1.0, 2.0), velocity=(4.0, 0.0), time=0.5)
    s1 = step(s0, NodeParams(0.0, 0.0, 0.0), SimConfig())
    assert s1.velocity == (4.0, 0.0)
    assert s1.position.x == pytest.approx(1.4, abs=1e-12)
    assert s1.position.y == pytest.approx(2.0, abs=1e-12)


def test_step_turn_budget_caps_rotation():
    s0 = AgentState(position=Point2(0.0, 0.0), velocity=(4.0, 0.0), time=0.0)
    s1 = step(s0, NodeParams(3.0, math.pi / 2, 0.0), SimConfig())
    budget = 3.0 / 4.0 * 0.1
    heading = math.atan2(s1.velocity[1], s1.velocity[0])
    assert heading == pytest.approx(budget, abs=1e-12)
    # nearly the whole budget went to turning, so almost no speed gain
    assert s1.speed == pytest.approx(4.0, abs=1e-9)


def test_step_speed_clamped_at_max():
    s0 = AgentState(position=Point2(0.0, 0.0), velocity=(9.95, 0.0), time=0.0)
    s1 = step(s0, NodeParams(3.0, 0.0, 0.0), SimConfig())
    assert s1.speed == pytest.approx(10.0, abs=1e-12)


def test_step_from_rest_adopts_commanded_heading():
    s0 = AgentState(position=Point2(0.0, 0.0), velocity=(0.0, 0.0), time=0.0)
    s1 = step(s0, NodeParams(2.0, math.pi / 3, 0.0), SimConfig())
    heading = math.atan2(s1.velocity[1], s1.velocity[0])
    assert heading == pytest.approx(math.pi / 3, abs=1e-12)
    assert s1.speed == pytest.approx(0.2, abs=1e-12)


# --------------------------------------------------------------------------
# full rollout

def test_straight_line_closed_form():
    trace = simulate(flat_plan(), Point2(-12.0, 0.0), (4.0, 0.0), SimConfig())
    assert trace.termination is Termination.FINISHED
    assert len(trace.states) == 61
    for k, s in enumerate(trace.states):
        assert s.position.x == pytest.approx(-12.0 + 4.0 * k * 0.1, abs=1e-9)
        assert s.position.y == 0.0
    assert trace.states[-1].time == pytest.approx(6.0, abs=1e-9)
    assert not trace.fallback_used


def test_states_one_more_than_commands():
    trace = simulate(flat_plan(), Point2(-12.0, 0.0), (4.0, 0.0), SimConfig())
    assert len(trace.states) == len(trace.commands) + 1


def test_step_limit_termination():
    trace = simulate(flat_plan(), Point2(-12.0, 0.0), (4.0, 0.0),
                     SimConfig(max_steps=1))
    assert len(trace.states) == 2
    assert trace.termination is Termination.STEP_LIMIT


def test_start_beyond_finish_line_is_immediate():
    trace = simulate(flat_plan(), Point2(12.5, 0.0), (4.0, 0.0), SimConfig())
    assert len(trace.states) == 1
    assert trace.commands == []
    assert trace.termination is Termination.FINISHED


def test_outside_hull_sets_fallback_flag():
    trace = simulate(flat_plan(), Point2(-12.0, 40.0), (4.0, 0.0),
                     SimConfig(max_steps=3))
    assert trace.fallback_used


def test_speed_never_decreases_and_obeys_limits():
    plan = seed_plan()
    cfg = SimConfig()
    trace = simulate(plan, Point2(-12.0, 0.0), (4.0, 0.0), cfg)
    speeds = [s.speed for s in trace.states]
    accel_cap = plan.limits.max_acceleration * cfg.dt
    for a, b in zip(speeds, speeds[1:]):
        assert b >= a - 1e-12
        assert b - a <= accel_cap + 1e-9
        assert b <= cfg.max_speed + 1e-12


def test_path_length_at_least_displacement():
    plan = seed_plan()
    trace = simulate(plan, Point2(-12.0, -2.0), (4.0, 0.0), SimConfig())
    m = trace_metrics(trace, Point2(0.0, 0.0))
    disp = trace.states[0].position.distance_to(trace.states[-1].position)
    assert m.path_length >= disp - 1e-9


@settings(max_examples=30, deadline=None)
@given(
    y0=st.floats(min_value=-5.0, max_value=5.0),
    vy=st.floats(min_value=-2.0, max_value=2.0),
)
def test_rollout_is_deterministic(y0, vy):
    plan = seed_plan()
    t1 = simulate(plan, Point2(-12.0, y0), (4.0, vy), SimConfig())
    t2 = simulate(plan, Point2(-12.0, y0), (4.0, vy), SimConfig())
    assert [s.position for s in t1.states] == [s.position for s in t2.states]
    assert t1.commands == t2.commands


# --------------------------------------------------------------------------
# metrics

def test_metrics_min_distance_uses_segments():
    trace = simulate(flat_plan(), Point2(-12.0, 0.0), (4.0, 0.0), SimConfig())
    m = trace_metrics(trace, Point2(0.0, 2.0))
    # straight run along y=0 passes exactly 2.0 below the obstacle
    assert m.min_obstacle_distance == pytest.approx(2.0, abs=1e-12)
    assert m.path_length == pytest.approx(24.0, abs=1e-9)
    assert m.finish_time == pytest.approx(6.0, abs=1e-9)


def test_metrics_segment_beats_sampled_vertices():
    # Two states straddling the obstacle: nearest point is mid-segment.
    states = [
        AgentState(position=Point2(-1.0, 0.0), velocity=(4.0, 0.0), time=0.0),
        AgentState(position=Point2(1.0, 0.0), velocity=(4.0, 0.0), time=0.5),
    ]
    trace = Trace(states=states, commands=[NodeParams(0.0, 0.0, 0.0)],
                  termination=Termination.STEP_LIMIT, fallback_used=False)
    m = trace_metrics(trace, Point2(0.0, 3.0))
    assert m.min_obstacle_distance == pytest.approx(3.0, abs=1e-12)


def test_metrics_single_state():
    trace = Trace(
        states=[AgentState(position=Point2(1.0, 1.0), velocity=(0.0, 0.0),
                           time=0.0)],
        commands=[], termination=Termination.STEP_LIMIT, fallback_used=False)
    m = trace_metrics(trace, Point2(4.0, 5.0))
    assert m.min_obstacle_distance == pytest.approx(5.0)
    assert m.path_length == 0.0
    assert m.finish_time is None


def test_metrics_empty_trace_rejected():
    trace = Trace(states=[], commands=[],
                  termination=Termination.STEP_LIMIT, fallback_used=False)
    with pytest.raises(EmptyTrace):
        trace_metrics(trace, Point2(0.0, 0.0))


def test_metrics_speed_split_by_obstacle_x():
    states = [
        AgentState(position=Point2(-2.0, 0.0), velocity=(1.0, 0.0), time=0.0),
        AgentState(position=Point2(-1.0, 0.0), velocity=(3.0, 0.0), time=1.0),
        AgentState(position=Point2(1.0, 0.0), velocity=(5.0, 0.0), time=2.0),
    ]
    trace = Trace(states=states, commands=[NodeParams(0, 0, 0)] * 2,
                  termination=Termination.STEP_LIMIT, fallback_used=False)
    m = trace_metrics(trace, Point2(0.0, 1.0))
    assert m.mean_speed_before == pytest.approx(2.0)
    assert m.mean_speed_after == pytest.approx(5.0)


def test_metrics_side_with_no_states_is_none():
    states = [
        AgentState(position=Point2(1.0, 0.0), velocity=(2.0, 0.0), time=0.0),
        AgentState(position=Point2(2.0, 0.0), velocity=(2.0, 0.0), time=0.5),
    ]
    trace = Trace(states=states, commands=[NodeParams(0, 0, 0)],
                  termination=Termination.STEP_LIMIT, fallback_used=False)
    m = trace_metrics(trace, Point2(0.0, 0.5))
    assert m.mean_speed_before is None
    assert m.mean_speed_after == pytest.approx(2.0)


# --------------------------------------------------------------------------
# exports

def test_trace_csv_layout(tmp_path):
    trace = simulate(flat_plan(), Point2(-12.0, 0.0), (4.0, 0.0),
                     SimConfig(max_steps=3))
    path = tmp_path / "trace.csv"
    write_trace_csv(trace, path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "x", "y", "vx", "vy",
                       "accel_cmd", "body_dir_cmd", "ball_dir_cmd"]
    assert len(rows) == 1 + len(trace.states)
    # final state row has no command columns
    assert rows[-1][5:] == ["", "", ""]
    # values parse back to the exact floats
    for row, state in zip(rows[1:], trace.states):
        assert float(row[0]) == state.time
        assert float(row[1]) == state.position.x
        assert float(row[4]) == state.velocity[1]
    assert float(rows[1][5]) == trace.commands[0].acceleration


def test_trace_document_shape():
    trace = simulate(flat_plan(), Point2(-12.0, 0.0), (4.0, 0.0),
                     SimConfig(max_steps=2))
    doc = trace_document(trace, trace_metrics(trace, Point2(0.0, 2.0)))
    assert len(doc["states"]) == 3
    assert len(doc["commands"]) == 2
    assert doc["termination"] == "step_limit"
    assert doc["metrics"]["min_obstacle_distance"] > 0
    assert set(doc["states"][0]) == {"t", "x", "y", "vx", "vy"}


def test_sim_config_validation():
    with pytest.raises(ValueError):
        SimConfig(dt=0.0)
    with pytest.raises(ValueError):
        SimConfig(max_steps=0)
    with pytest.raises(ValueError):
        SimConfig(max_speed=-1.0)


# --------------------------------------------------------------------------
# field sampling

def test_sample_field_grid_and_constant_commands():
    rows = sample_field(flat_plan(accel=1.0, body=0.25), 4, 3,
                        speed_probes=0)
    assert len(rows) == 12
    xs = sorted({r["x"] for r in rows})
    assert xs == pytest.approx([-9.0, -3.0, 3.0, 9.0])
    for r in rows:
        assert r["accel"] == pytest.approx(1.0, abs=1e-9)
        assert r["body_dir"] == pytest.approx(0.25, abs=1e-9)
        assert r["speed"] is None


def test_sample_field_probes_fill_crossed_cells():
    rows = sample_field(flat_plan(), 6, 3, speed_probes=5)
    with_speed = [r for r in rows if r["speed"] is not None]
    assert with_speed
    for r in with_speed:
        assert r["speed"] == pytest.approx(4.0, abs=1e-9)


def test_sample_field_rejects_empty_grid():
    with pytest.raises(ValueError):
        sample_field(flat_plan(), 0, 3)


def test_field_csv_blank_for_missing_speed(tmp_path):
    rows = sample_field(flat_plan(), 2, 2, speed_probes=0)
    path = tmp_path / "field.csv"
    write_field_csv(rows, path)
    with open(path, newline="") as fh:
        got = list(csv.reader(fh))
    assert got[0] == ["x", "y", "accel", "body_dir", "speed"]
    assert len(got) == 5
    assert all(row[4] == "" for row in got[1:])
    assert float(got[1][0]) == rows[0]["x"]
