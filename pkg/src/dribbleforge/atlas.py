"""Field atlas: plan retrieval for arbitrary obstacle positions.

Anchor obstacle positions across the field each carry a full trajectory
plan; a second Delaunay triangulation over those anchor positions lets any
intermediate obstacle position borrow a plan by blending the three
surrounding anchors' parameters node-by-node (all anchors share one node
layout, so blending is element-wise).  Plans live in an obstacle-centric
frame whose +x axis points from the obstacle toward the goal, so the atlas
also provides the world ↔ local transforms and a one-call action lookup.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

from .errors import (
    CoincidentGoalObstacle,
    DegenerateInput,
    EmptyAnchors,
    LayoutMismatch,
    TooFewPoints,
    ValidationFailed,
)
from .geometry import Point2, Triangulation, idw_interpolate, locate, triangulate
from .plan import (
    NodeParams,
    PARAM_FIELDS,
    TrajectoryPlan,
    plan_from_document,
    plan_to_document,
    query_info,
    with_node_params,
)

ATLAS_FORMAT = "dribbleforge-atlas/1"
#: Anchor layouts must agree within this distance, and an obstacle this
#: close to an anchor resolves to that anchor's plan exactly.
ANCHOR_SNAP_TOL = 1e-9


@dataclass(frozen=True)
class AnchorPlan:
    obstacle_position: Point2
    plan: TrajectoryPlan


@dataclass(frozen=True)
class FieldAtlas:
    anchors: tuple[AnchorPlan, ...]
    goal_position: Point2
    #: None means nearest-anchor mode (fewer than 3 usable anchor positions).
    field_triangulation: Triangulation | None


def build_atlas(anchors, goal: Point2) -> FieldAtlas:
    """Validate the shared layout and triangulate the anchor positions.

    Degenerate anchor geometries (fewer than three anchors, collinear or
    coincident positions) produce a nearest-anchor atlas instead of a
    triangulated one.
    """
    anchor_tuple = tuple(anchors)
    if not anchor_tuple:
        raise EmptyAnchors("atlas needs at least one anchor plan")
    reference = anchor_tuple[0].plan
    for a, anchor in enumerate(anchor_tuple[1:], start=1):
        plan = anchor.plan
        if len(plan.nodes) != len(reference.nodes):
            raise LayoutMismatch(
                f"anchor {a} has {len(plan.nodes)} nodes, "
                f"anchor 0 has {len(reference.nodes)}"
            )
        for j, (node, ref_node) in enumerate(zip(plan.nodes, reference.nodes)):
            if node.position.distance_to(ref_node.position) > ANCHOR_SNAP_TOL:
                raise LayoutMismatch(
                    f"anchor {a} node {j} position differs from anchor 0"
                )
        if plan.limits != reference.limits:
            raise LayoutMismatch(f"anchor {a} limits differ from anchor 0")
    try:
        tri = triangulate([a.obstacle_position for a in anchor_tuple])
    except (TooFewPoints, DegenerateInput):
        tri = None
    return FieldAtlas(anchors=anchor_tuple, goal_position=goal,
                      field_triangulation=tri)


def _nearest_anchor(atlas: FieldAtlas, obstacle: Point2) -> int:
    best = 0
    best_d = atlas.anchors[0].obstacle_position.distance_to(obstacle)
    for i in range(1, len(atlas.anchors)):
        d = atlas.anchors[i].obstacle_position.distance_to(obstacle)
        if d < best_d:
            best, best_d = i, d
    return best


def _resolve(atlas: FieldAtlas, obstacle: Point2) -> tuple[TrajectoryPlan, bool]:
    """Plan for an obstacle position plus whether the nearest-anchor
    fallback was used (an exact anchor hit is not a fallback)."""
    for anchor in atlas.anchors:
        if anchor.obstacle_position.distance_to(obstacle) <= ANCHOR_SNAP_TOL:
            return anchor.plan, False
    tri = atlas.field_triangulation
    t = locate(tri, obstacle) if tri is not None else None
    if t is None:
        return atlas.anchors[_nearest_anchor(atlas, obstacle)].plan, True

    ia, ib, ic = tri.triangles[t]
    pa, pb, pc = tri.vertices[ia], tri.vertices[ib], tri.vertices[ic]
    plans = (atlas.anchors[ia].plan, atlas.anchors[ib].plan,
             atlas.anchors[ic].plan)
    base = atlas.anchors[0].plan
    blended = []
    for j in range(len(base.nodes)):
        values = {}
        for field in PARAM_FIELDS:
            va, vb, vc = (getattr(p.nodes[j].params, field) for p in plans)
            values[field] = idw_interpolate(pa, pb, pc, va, vb, vc, obstacle)
        blended.append(base.limits.clamp(NodeParams(**values)))
    return with_node_params(base, blended), False


def resolve_plan(atlas: FieldAtlas, obstacle: Point2) -> TrajectoryPlan:
    return _resolve(atlas, obstacle)[0]


# --------------------------------------------------------------------------
# Obstacle-centric frame

def frame_rotation(obstacle: Point2, goal: Point2) -> float:
    """World bearing of the local +x axis (obstacle toward goal)."""
    if obstacle.distance_to(goal) <= ANCHOR_SNAP_TOL:
        raise CoincidentGoalObstacle(
            "goal and obstacle coincide; frame orientation undefined"
        )
    return math.atan2(goal.y - obstacle.y, goal.x - obstacle.x)


def to_obstacle_frame(world_point: Point2, obstacle: Point2,
                      goal: Point2) -> Point2:
    phi = frame_rotation(obstacle, goal)
    c, s = math.cos(phi), math.sin(phi)
    dx, dy = world_point.x - obstacle.x, world_point.y - obstacle.y
    return Point2(c * dx + s * dy, -s * dx + c * dy)


def from_obstacle_frame(local_point: Point2, obstacle: Point2,
                        goal: Point2) -> Point2:
    phi = frame_rotation(obstacle, goal)
    c, s = math.cos(phi), math.sin(phi)
    return Point2(obstacle.x + c * local_point.x - s * local_point.y,
                  obstacle.y + s * local_point.x + c * local_point.y)


@dataclass(frozen=True)
class DribbleAction:
    params: NodeParams
    #: Add to body_dir/ball_dir to express them as world bearings.
    frame_rotation: float
    local_position: Point2
    #: Agent fell outside the plan hull (nearest-node parameters).
    plan_fallback: bool
    #: Obstacle fell outside the anchor hull (nearest-anchor plan).
    atlas_fallback: bool


def dribble_action(atlas: FieldAtlas, agent_world: Point2,
                   obstacle_world: Point2) -> DribbleAction:
    """Resolve, transform and query in one call."""
    plan, atlas_fallback = _resolve(atlas, obstacle_world)
    phi = frame_rotation(obstacle_world, atlas.goal_position)
    local = to_obstacle_frame(agent_world, obstacle_world,
                              atlas.goal_position)
    params, info = query_info(plan, local)
    return DribbleAction(
        params=params,
        frame_rotation=phi,
        local_position=local,
        plan_fallback=not info.inside_hull,
        atlas_fallback=atlas_fallback,
    )


# --------------------------------------------------------------------------
# Atlas documents (JSON)

def atlas_to_document(atlas: FieldAtlas) -> dict:
    return {
        "format": ATLAS_FORMAT,
        "goal": {"x": atlas.goal_position.x, "y": atlas.goal_position.y},
        "anchors": [
            {
                "obstacle": {"x": a.obstacle_position.x,
                             "y": a.obstacle_position.y},
                "plan": plan_to_document(a.plan),
            }
            for a in atlas.anchors
        ],
    }


def _point_from(doc, label: str) -> Point2:
    if (not isinstance(doc, dict) or "x" not in doc or "y" not in doc
            or isinstance(doc.get("x"), bool) or isinstance(doc.get("y"), bool)
            or not isinstance(doc.get("x"), (int, float))
            or not isinstance(doc.get("y"), (int, float))
            or not math.isfinite(doc["x"]) or not math.isfinite(doc["y"])):
        raise ValidationFailed([{"node": None, "field": label,
                                 "message": f"{label} must be {{x, y}}"}])
    return Point2(float(doc["x"]), float(doc["y"]))


def atlas_from_document(doc: dict) -> FieldAtlas:
    if not isinstance(doc, dict) or doc.get("format") != ATLAS_FORMAT:
        raise ValidationFailed([{"node": None, "field": "format",
                                 "message": f"expected format {ATLAS_FORMAT!r}"}])
    goal = _point_from(doc.get("goal"), "goal")
    anchors_doc = doc.get("anchors")
    if not isinstance(anchors_doc, list):
        raise ValidationFailed([{"node": None, "field": "anchors",
                                 "message": "anchors must be a list"}])
    anchors = []
    for i, entry in enumerate(anchors_doc):
        if not isinstance(entry, dict):
            raise ValidationFailed([{"node": None, "field": f"anchors[{i}]",
                                     "message": f"anchor {i} must be an object"}])
        obstacle = _point_from(entry.get("obstacle"), f"anchors[{i}].obstacle")
        anchors.append(AnchorPlan(
            obstacle_position=obstacle,
            plan=plan_from_document(entry.get("plan")),
        ))
    return build_atlas(anchors, goal)


def save_atlas(atlas: FieldAtlas, path: str | Path) -> None:
    text = json.dumps(atlas_to_document(atlas), indent=2) + "\n"
    Path(path).write_text(text, encoding="utf-8")


def load_atlas(path: str | Path) -> FieldAtlas:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationFailed([{"node": None, "field": None,
                                 "message": f"invalid JSON: {exc}"}]) from exc
    return atlas_from_document(doc)
