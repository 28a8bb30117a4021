"""Built-in starting layouts.

The seed plan is a hand-shaped 25-node grid around the obstacle (origin).
Its body directions sketch a gentle swerve over the obstacle: approach
straight, drift up and across in front of it, then fold back to the exit
line.  Optimizers start from this plan; the editor shows it on first load.
"""

from __future__ import annotations

from .geometry import Point2
from .plan import NodeParams, PlanLimits, PlanNode, TrajectoryPlan, build_plan

# x, y, acceleration, body_dir, ball_dir
SEED_NODE_TABLE: tuple[tuple[float, float, float, float, float], ...] = (
    (-12.0, -6.0, 1.5, 0.0, 0.0),
    (-12.0, -3.0, 1.5, 0.3, 0.0),
    (-12.0, 0.0, 1.5, 0.8, 0.0),
    (-12.0, 3.0, 1.5, 0.5, 0.0),
    (-12.0, 6.0, 1.5, 0.0, 0.0),
    (-6.0, -6.0, 1.5, 0.2, 0.0),
    (-6.0, -3.0, 1.5, 0.8, 0.0),
    (-6.0, 0.0, 1.5, 1.2, 0.0),
    (-6.0, 3.0, 1.5, 0.9, 0.0),
    (-6.0, 6.0, 1.5, 0.1, 0.0),
    (0.0, -6.0, 1.5, 0.0, 0.0),
    (0.0, -3.0, 1.5, 1.2, 0.0),
    # Offset from the origin so no node sits exactly on the obstacle.
    (0.0, 1.5, 1.5, 0.2, 0.0),
    (0.0, 3.0, 1.5, 0.1, 0.0),
    (0.0, 6.0, 1.5, -0.1, 0.0),
    (6.0, -6.0, 1.5, 0.0, 0.0),
    (6.0, -3.0, 1.5, 0.3, 0.0),
    (6.0, 0.0, 1.5, -0.3, 0.0),
    (6.0, 3.0, 1.5, -0.5, 0.0),
    (6.0, 6.0, 1.5, -0.3, 0.0),
    (12.0, -6.0, 1.5, 0.0, 0.0),
    (12.0, -3.0, 1.5, 0.0, 0.0),
    (12.0, 0.0, 1.5, 0.0, 0.0),
    (12.0, 3.0, 1.5, -0.3, 0.0),
    (12.0, 6.0, 1.5, -0.1, 0.0),
)


def seed_plan(limits: PlanLimits | None = None) -> TrajectoryPlan:
    nodes = [
        PlanNode(position=Point2(x, y),
                 params=NodeParams(acceleration=acc, body_dir=body,
                                   ball_dir=ball))
        for x, y, acc, body, ball in SEED_NODE_TABLE
    ]
    return build_plan(nodes, limits or PlanLimits())
