"""Kinematic rollout of an agent steering by a trajectory plan.

The agent queries the plan at its current position each tick and spends the
commanded acceleration on turning first: heading rotates toward the
commanded body direction under a turn-rate cap, and whatever fraction of
the cap goes unused becomes forward throttle.  Position integrates by Euler
steps.  Speed therefore never decreases and is capped at ``max_speed``.

A trace records the visited states, the per-step commands (one fewer than
states — the final state is never queried), how the run ended, and whether
any query fell back to a nearest-node answer outside the plan hull.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .errors import EmptyTrace
from .geometry import Point2, wrap_angle
from .plan import NodeParams, TrajectoryPlan, query_info

#: Guards the turn-fraction division when the turn budget is zero.
_TURN_EPS = 1e-12


@dataclass(frozen=True)
class SimConfig:
    dt: float = 0.1
    max_steps: int = 300
    max_speed: float = 10.0
    kickable_radius: float = 1.085
    finish_x: float = 12.0

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")
        if not self.max_speed > 0:
            raise ValueError("max_speed must be positive")


@dataclass(frozen=True)
class AgentState:
    position: Point2
    velocity: tuple[float, float]
    time: float

    @property
    def speed(self) -> float:
        return math.hypot(*self.velocity)


class Termination(str, Enum):
    FINISHED = "finished"
    STEP_LIMIT = "step_limit"


@dataclass
class Trace:
    states: list[AgentState]
    commands: list[NodeParams]
    termination: Termination
    fallback_used: bool


@dataclass(frozen=True)
class TraceMetrics:
    min_obstacle_distance: float
    path_length: float
    finish_time: float | None
    mean_speed_before: float | None
    mean_speed_after: float | None
    fallback_used: bool


def step(state: AgentState, params: NodeParams, cfg: SimConfig) -> AgentState:
    """Advance one tick under a single command.

    Turn rate is capped at ``acceleration / max(speed, 0.1)`` rad/s; the
    unused share of that cap scales the speed gain ``acceleration·dt``.
    """
    vx, vy = state.velocity
    speed = math.hypot(vx, vy)
    heading = math.atan2(vy, vx) if speed > _TURN_EPS else params.body_dir
    budget = params.acceleration / max(speed, 0.1) * cfg.dt
    error = wrap_angle(params.body_dir - heading)
    turn = min(max(error, -budget), budget)
    heading += turn
    gain = params.acceleration * cfg.dt * (1.0 - abs(turn) / (budget + _TURN_EPS))
    speed = min(speed + gain, cfg.max_speed)
    vx, vy = speed * math.cos(heading), speed * math.sin(heading)
    return AgentState(
        position=Point2(state.position.x + vx * cfg.dt,
                        state.position.y + vy * cfg.dt),
        velocity=(vx, vy),
        time=state.time + cfg.dt,
    )


def simulate(plan: TrajectoryPlan, start: Point2, v0: tuple[float, float],
             cfg: SimConfig | None = None) -> Trace:
    """Roll the agent from ``start`` until it crosses ``finish_x`` or the
    step budget runs out."""
    cfg = cfg if cfg is not None else SimConfig()
    states = [AgentState(position=start, velocity=tuple(v0), time=0.0)]
    commands: list[NodeParams] = []
    fallback_used = False
    while (states[-1].position.x < cfg.finish_x
           and len(commands) < cfg.max_steps):
        params, info = query_info(plan, states[-1].position)
        fallback_used = fallback_used or not info.inside_hull
        commands.append(params)
        states.append(step(states[-1], params, cfg))
    done = states[-1].position.x >= cfg.finish_x
    return Trace(
        states=states,
        commands=commands,
        termination=Termination.FINISHED if done else Termination.STEP_LIMIT,
        fallback_used=fallback_used,
    )


def _point_segment_distance(p: Point2, a: Point2, b: Point2) -> float:
    ax, ay = b.x - a.x, b.y - a.y
    seg2 = ax * ax + ay * ay
    if seg2 == 0.0:
        return p.distance_to(a)
    t = ((p.x - a.x) * ax + (p.y - a.y) * ay) / seg2
    t = min(max(t, 0.0), 1.0)
    return p.distance_to(Point2(a.x + t * ax, a.y + t * ay))


def trace_metrics(trace: Trace, obstacle: Point2) -> TraceMetrics:
    """Distance/speed summary of a trace relative to an obstacle point.

    Speed means split the states by the obstacle's x coordinate; a side
    with no states yields ``None``.
    """
    if not trace.states:
        raise EmptyTrace("trace has no states")
    positions = [s.position for s in trace.states]
    if len(positions) == 1:
        min_dist = obstacle.distance_to(positions[0])
    else:
        min_dist = min(
            _point_segment_distance(obstacle, a, b)
            for a, b in zip(positions, positions[1:])
        )
    path_length = sum(a.distance_to(b)
                      for a, b in zip(positions, positions[1:]))
    before = [s.speed for s in trace.states if s.position.x < obstacle.x]
    after = [s.speed for s in trace.states if s.position.x > obstacle.x]
    return TraceMetrics(
        min_obstacle_distance=min_dist,
        path_length=path_length,
        finish_time=(trace.states[-1].time
                     if trace.termination is Termination.FINISHED else None),
        mean_speed_before=sum(before) / len(before) if before else None,
        mean_speed_after=sum(after) / len(after) if after else None,
        fallback_used=trace.fallback_used,
    )


# --------------------------------------------------------------------------
# Exports

def write_trace_csv(trace: Trace, path: str | Path) -> None:
    """One row per state; command columns are empty on the final row, which
    was never queried."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "x", "y", "vx", "vy",
                         "accel_cmd", "body_dir_cmd", "ball_dir_cmd"])
        for i, s in enumerate(trace.states):
            row = [repr(s.time), repr(s.position.x), repr(s.position.y),
                   repr(s.velocity[0]), repr(s.velocity[1])]
            if i < len(trace.commands):
                c = trace.commands[i]
                row += [repr(c.acceleration), repr(c.body_dir),
                        repr(c.ball_dir)]
            else:
                row += ["", "", ""]
            writer.writerow(row)


def trace_document(trace: Trace, metrics: TraceMetrics | None = None) -> dict:
    doc = {
        "states": [
            {"t": s.time, "x": s.position.x, "y": s.position.y,
             "vx": s.velocity[0], "vy": s.velocity[1]}
            for s in trace.states
        ],
        "commands": [
            {"acceleration": c.acceleration, "body_dir": c.body_dir,
             "ball_dir": c.ball_dir}
            for c in trace.commands
        ],
        "termination": trace.termination.value,
        "fallback_used": trace.fallback_used,
    }
    if metrics is not None:
        doc["metrics"] = {
            "min_obstacle_distance": metrics.min_obstacle_distance,
            "path_length": metrics.path_length,
            "finish_time": metrics.finish_time,
            "mean_speed_before": metrics.mean_speed_before,
            "mean_speed_after": metrics.mean_speed_after,
            "fallback_used": metrics.fallback_used,
        }
    return doc


def sample_field(plan: TrajectoryPlan, nx: int, ny: int,
                 bounds: tuple[float, float, float, float] | None = None,
                 cfg: SimConfig | None = None,
                 speed_probes: int = 7,
                 probe_speed: float = 4.0) -> list[dict]:
    """Sample the plan's command field on an nx × ny grid of cell centers.

    ``bounds`` is (x_min, y_min, x_max, y_max), defaulting to the node
    bounding box.  Speeds come from ``speed_probes`` simulated runs started
    along the left edge at ``probe_speed`` m/s heading +x, averaged per
    cell; cells no probe visited carry ``None``.
    """
    if nx < 1 or ny < 1:
        raise ValueError("grid must be at least 1x1")
    if bounds is None:
        xs = [p.x for p in plan.positions]
        ys = [p.y for p in plan.positions]
        bounds = (min(xs), min(ys), max(xs), max(ys))
    x_min, y_min, x_max, y_max = bounds
    dx = (x_max - x_min) / nx
    dy = (y_max - y_min) / ny

    speed_sum = [[0.0] * nx for _ in range(ny)]
    speed_count = [[0] * nx for _ in range(ny)]
    if speed_probes > 0:
        cfg = cfg if cfg is not None else SimConfig(finish_x=x_max)
        for k in range(speed_probes):
            frac = (k + 0.5) / speed_probes
            start = Point2(x_min, y_min + frac * (y_max - y_min))
            trace = simulate(plan, start, (probe_speed, 0.0), cfg)
            for s in trace.states:
                i = int((s.position.x - x_min) / dx) if dx > 0 else 0
                j = int((s.position.y - y_min) / dy) if dy > 0 else 0
                if 0 <= i < nx and 0 <= j < ny:
                    speed_sum[j][i] += s.speed
                    speed_count[j][i] += 1

    rows = []
    for j in range(ny):
        cy = y_min + (j + 0.5) * dy
        for i in range(nx):
            cx = x_min + (i + 0.5) * dx
            params = query_info(plan, Point2(cx, cy))[0]
            speed = (speed_sum[j][i] / speed_count[j][i]
                     if speed_count[j][i] else None)
            rows.append({"x": cx, "y": cy, "accel": params.acceleration,
                         "body_dir": params.body_dir, "speed": speed})
    return rows


def write_field_csv(rows: list[dict], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "y", "accel", "body_dir", "speed"])
        for row in rows:
            writer.writerow([
                repr(row["x"]), repr(row["y"]), repr(row["accel"]),
                repr(row["body_dir"]),
                "" if row.get("speed") is None else repr(row["speed"]),
            ])
