"""dribbleforge: design, evolve and replay obstacle-relative dribbling plans.

The pipeline: author a trajectory plan (triangulated node set with motion
parameters), evolve its parameters with a real-valued GA against an
analytic obstacle-avoidance fitness, verify by kinematic simulation, and
deploy many plans at once through a field atlas that blends them per
obstacle position.
"""

from .errors import DribbleForgeError
from .geometry import Point2, Triangulation, triangulate
from .plan import (
    NodeParams,
    PlanLimits,
    PlanNode,
    TrajectoryPlan,
    build_plan,
    load_plan,
    query,
    save_plan,
)
from .evolution import FitnessConfig, GaConfig, evolve, plan_fitness
from .simulation import SimConfig, Trace, simulate, trace_metrics
from .atlas import FieldAtlas, build_atlas, dribble_action, resolve_plan
from .fixtures import seed_plan

__version__ = "0.1.0"

__all__ = [
    "DribbleForgeError",
    "Point2",
    "Triangulation",
    "triangulate",
    "NodeParams",
    "PlanLimits",
    "PlanNode",
    "TrajectoryPlan",
    "build_plan",
    "load_plan",
    "query",
    "save_plan",
    "FitnessConfig",
    "GaConfig",
    "evolve",
    "plan_fitness",
    "SimConfig",
    "Trace",
    "simulate",
    "trace_metrics",
    "FieldAtlas",
    "build_atlas",
    "dribble_action",
    "resolve_plan",
    "seed_plan",
    "__version__",
]
