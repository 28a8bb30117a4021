"""Trajectory plans: triangulated node layouts carrying motion parameters.

A plan is a set of nodes positioned relative to an obstacle at the origin.
Each node holds three motion parameters — acceleration, body direction and
ball direction — and a Delaunay triangulation over the node positions turns
the discrete set into a continuous field: querying any point inside the hull
blends the three surrounding node values by inverse distance.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable

from .errors import (
    DegenerateInput,
    DegenerateLayout,
    ParamOutOfRange,
    TooFewNodes,
    UnknownNode,
    ValidationFailed,
)
from .geometry import Point2, Triangulation, idw_interpolate, locate, triangulate

PLAN_FORMAT = "dribbleforge-plan/1"
HALF_PI = math.pi / 2
#: Minimum pairwise node spacing in meters.
MIN_NODE_SPACING = 1e-6

PARAM_FIELDS = ("acceleration", "body_dir", "ball_dir")


@dataclass(frozen=True)
class PlanLimits:
    """Parameter bounds shared by every node of a plan."""

    max_acceleration: float = 3.0
    body_dir_range: tuple[float, float] = (-HALF_PI, HALF_PI)
    ball_dir_range: tuple[float, float] = (-HALF_PI, HALF_PI)

    def __post_init__(self):
        if not (math.isfinite(self.max_acceleration)
                and self.max_acceleration > 0):
            raise ValueError("max_acceleration must be positive and finite")
        for name in ("body_dir_range", "ball_dir_range"):
            lo, hi = getattr(self, name)
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise ValueError(f"{name} must be a finite (low, high) pair")

    def bounds(self, field: str) -> tuple[float, float]:
        if field == "acceleration":
            return (0.0, self.max_acceleration)
        if field == "body_dir":
            return self.body_dir_range
        if field == "ball_dir":
            return self.ball_dir_range
        raise KeyError(field)

    def check(self, node_index: int, params: "NodeParams") -> None:
        """Raise :class:`ParamOutOfRange` naming the offending field."""
        for field in PARAM_FIELDS:
            value = getattr(params, field)
            lo, hi = self.bounds(field)
            if not (math.isfinite(value) and lo <= value <= hi):
                raise ParamOutOfRange(node_index, field, value, lo, hi)

    def clamp(self, params: "NodeParams") -> "NodeParams":
        clamped = {}
        for field in PARAM_FIELDS:
            lo, hi = self.bounds(field)
            clamped[field] = min(max(getattr(params, field), lo), hi)
        return NodeParams(**clamped)


@dataclass(frozen=True)
class NodeParams:
    """Motion command triple attached to a node (or produced by a query)."""

    acceleration: float
    body_dir: float
    ball_dir: float


@dataclass(frozen=True)
class PlanNode:
    position: Point2
    params: NodeParams


@dataclass(frozen=True)
class TrajectoryPlan:
    nodes: tuple[PlanNode, ...]
    triangulation: Triangulation
    limits: PlanLimits

    @property
    def positions(self) -> tuple[Point2, ...]:
        return self.triangulation.vertices


@dataclass(frozen=True)
class QueryInfo:
    """Where a query landed: inside which triangle, or which fallback node."""

    inside_hull: bool
    triangle: int | None
    nearest_node: int | None


def build_plan(nodes: Iterable[PlanNode],
               limits: PlanLimits | None = None) -> TrajectoryPlan:
    """Validate nodes, triangulate their positions, and assemble a plan."""
    node_tuple = tuple(nodes)
    limits = limits if limits is not None else PlanLimits()
    if len(node_tuple) < 3:
        raise TooFewNodes(f"need at least 3 nodes, got {len(node_tuple)}")
    for i, node in enumerate(node_tuple):
        limits.check(i, node.params)
    positions = [node.position for node in node_tuple]
    for i in range(len(positions)):
        for j in range(i + 1, len(positions)):
            if positions[i].distance_to(positions[j]) <= MIN_NODE_SPACING:
                raise DegenerateLayout(f"nodes {i} and {j} coincide")
    try:
        tri = triangulate(positions)
    except DegenerateInput as exc:
        raise DegenerateLayout(str(exc)) from exc
    return TrajectoryPlan(nodes=node_tuple, triangulation=tri, limits=limits)


def with_node_params(plan: TrajectoryPlan,
                     per_node: Iterable[NodeParams]) -> TrajectoryPlan:
    """Same layout and limits, new parameters; skips re-triangulation."""
    params = tuple(per_node)
    if len(params) != len(plan.nodes):
        raise UnknownNode(
            f"expected {len(plan.nodes)} parameter triples, got {len(params)}"
        )
    for i, p in enumerate(params):
        plan.limits.check(i, p)
    nodes = tuple(
        replace(node, params=p) for node, p in zip(plan.nodes, params)
    )
    return replace(plan, nodes=nodes)


def edit_node(plan: TrajectoryPlan, action: str,
              node: PlanNode | None = None,
              index: int | None = None) -> TrajectoryPlan:
    """Insert, update or remove a node, returning a freshly validated plan.

    ``action`` is one of ``"insert"`` (append ``node``), ``"update"``
    (replace node ``index`` with ``node``) or ``"remove"`` (drop node
    ``index``).  The original plan is never modified.
    """
    nodes = list(plan.nodes)
    if action == "insert":
        if node is None:
            raise ValueError("insert requires a node")
        nodes.append(node)
    elif action in ("update", "remove"):
        if index is None or not 0 <= index < len(nodes):
            raise UnknownNode(f"no node at index {index!r}")
        if action == "update":
            if node is None:
                raise ValueError("update requires a node")
            nodes[index] = node
        else:
            del nodes[index]
    else:
        raise ValueError(f"unknown edit action {action!r}")
    return build_plan(nodes, plan.limits)


def nearest_node(plan: TrajectoryPlan, p: Point2) -> int:
    """Index of the node closest to ``p`` (ties go to the lower index)."""
    best = 0
    best_d = plan.nodes[0].position.distance_to(p)
    for i in range(1, len(plan.nodes)):
        d = plan.nodes[i].position.distance_to(p)
        if d < best_d:
            best, best_d = i, d
    return best


def query_info(plan: TrajectoryPlan, p: Point2) -> tuple[NodeParams, QueryInfo]:
    """Interpolated parameters at ``p`` plus how they were obtained.

    Inside the hull the containing triangle's three node values are blended
    by inverse distance and clamped to the plan limits.  Outside, the
    nearest node's parameters are returned verbatim and flagged as a
    fallback.
    """
    t = locate(plan.triangulation, p)
    if t is None:
        idx = nearest_node(plan, p)
        return plan.nodes[idx].params, QueryInfo(False, None, idx)
    ia, ib, ic = plan.triangulation.triangles[t]
    pa, pb, pc = (plan.positions[ia], plan.positions[ib], plan.positions[ic])
    na, nb, nc = (plan.nodes[ia].params, plan.nodes[ib].params,
                  plan.nodes[ic].params)
    blended = NodeParams(**{
        field: idw_interpolate(
            pa, pb, pc,
            getattr(na, field), getattr(nb, field), getattr(nc, field),
            p,
        )
        for field in PARAM_FIELDS
    })
    return plan.limits.clamp(blended), QueryInfo(True, t, None)


def query(plan: TrajectoryPlan, p: Point2) -> NodeParams:
    return query_info(plan, p)[0]


# --------------------------------------------------------------------------
# Plan documents (JSON)

def plan_to_document(plan: TrajectoryPlan) -> dict:
    return {
        "format": PLAN_FORMAT,
        "limits": {
            "max_acceleration": plan.limits.max_acceleration,
            "body_dir_range": list(plan.limits.body_dir_range),
            "ball_dir_range": list(plan.limits.ball_dir_range),
        },
        "nodes": [
            {
                "x": node.position.x,
                "y": node.position.y,
                "acceleration": node.params.acceleration,
                "body_dir": node.params.body_dir,
                "ball_dir": node.params.ball_dir,
            }
            for node in plan.nodes
        ],
    }


def _require_number(value, message: str, problems: list[dict],
                    node: int | None = None, field: str | None = None) -> float:
    if not isinstance(value, (int, float)) or isinstance(value, bool) \
            or not math.isfinite(value):
        problems.append({"node": node, "field": field, "message": message})
        return math.nan
    return float(value)


def plan_from_document(doc: dict) -> TrajectoryPlan:
    """Parse and validate a plan document.

    Structural problems raise :class:`ValidationFailed` carrying one entry
    per offending node/field; semantic problems (out-of-range parameters,
    degenerate layouts) raise their specific errors.
    """
    problems: list[dict] = []
    if not isinstance(doc, dict):
        raise ValidationFailed([{"node": None, "field": None,
                                 "message": "document must be an object"}])
    if doc.get("format") != PLAN_FORMAT:
        problems.append({"node": None, "field": "format",
                         "message": f"expected format {PLAN_FORMAT!r}"})

    limits_doc = doc.get("limits", {})
    if not isinstance(limits_doc, dict):
        problems.append({"node": None, "field": "limits",
                         "message": "limits must be an object"})
        limits_doc = {}
    max_acc = _require_number(limits_doc.get("max_acceleration", 3.0),
                              "max_acceleration must be a finite number",
                              problems, field="limits.max_acceleration")
    ranges = {}
    for name in ("body_dir_range", "ball_dir_range"):
        pair = limits_doc.get(name, [-HALF_PI, HALF_PI])
        if (not isinstance(pair, (list, tuple)) or len(pair) != 2):
            problems.append({"node": None, "field": f"limits.{name}",
                             "message": f"{name} must be a [low, high] pair"})
            pair = [-HALF_PI, HALF_PI]
        lo = _require_number(pair[0], f"{name} low bound must be a number",
                             problems, field=f"limits.{name}")
        hi = _require_number(pair[1], f"{name} high bound must be a number",
                             problems, field=f"limits.{name}")
        ranges[name] = (lo, hi)

    nodes_doc = doc.get("nodes")
    if not isinstance(nodes_doc, list):
        problems.append({"node": None, "field": "nodes",
                         "message": "nodes must be a list"})
        nodes_doc = []
    nodes: list[PlanNode] = []
    for i, entry in enumerate(nodes_doc):
        if not isinstance(entry, dict):
            problems.append({"node": i, "field": None,
                             "message": f"node {i} must be an object"})
            continue
        values = {}
        for key in ("x", "y", *PARAM_FIELDS):
            if key not in entry:
                problems.append({"node": i, "field": key,
                                 "message": f"node {i} is missing {key!r}"})
                values[key] = math.nan
            else:
                values[key] = _require_number(
                    entry[key], f"node {i} field {key!r} must be a number",
                    problems, node=i, field=key)
        if not any(math.isnan(v) for v in values.values()):
            nodes.append(PlanNode(
                position=Point2(values["x"], values["y"]),
                params=NodeParams(values["acceleration"], values["body_dir"],
                                  values["ball_dir"]),
            ))

    if problems:
        raise ValidationFailed(problems)
    limits = PlanLimits(max_acceleration=max_acc,
                        body_dir_range=ranges["body_dir_range"],
                        ball_dir_range=ranges["ball_dir_range"])
    return build_plan(nodes, limits)


def dump_plan(plan: TrajectoryPlan) -> str:
    """Serialize with shortest round-trip float repr, so save followed by
    load reproduces every value bit-for-bit."""
    return json.dumps(plan_to_document(plan), indent=2) + "\n"


def save_plan(plan: TrajectoryPlan, path: str | Path) -> None:
    Path(path).write_text(dump_plan(plan), encoding="utf-8")


def load_plan(path: str | Path) -> TrajectoryPlan:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationFailed([{"node": None, "field": None,
                                 "message": f"invalid JSON: {exc}"}]) from exc
    return plan_from_document(doc)
