import json
import math

import pytest

from dribbleforge.errors import (
    DegenerateLayout,
    ParamOutOfRange,
    TooFewNodes,
    UnknownNode,
    ValidationFailed,
)
from dribbleforge.fixtures import SEED_NODE_TABLE, seed_plan
from dribbleforge.geometry import Point2
from dribbleforge.plan import (
    NodeParams,
    PlanLimits,
    PlanNode,
    build_plan,
    dump_plan,
    edit_node,
    load_plan,
    plan_from_document,
    plan_to_document,
    query,
    query_info,
    save_plan,
)


def node(x, y, acc=1.0, body=0.0, ball=0.0):
    return PlanNode(Point2(x, y), NodeParams(acc, body, ball))


def triangle_plan():
    return build_plan([node(0, 0, 1.0), node(4, 0, 2.0), node(0, 4, 3.0)])


# --------------------------------------------------------------------------
# build / validate

def test_three_nodes_one_triangle():
    plan = triangle_plan()
    assert len(plan.triangulation.triangles) == 1


def test_too_few_nodes():
    with pytest.raises(TooFewNodes):
        build_plan([node(0, 0), node(1, 1)])


def test_acceleration_above_max_names_node_and_field():
    nodes = [node(0, 0), node(4, 0), node(0, 4, acc=5.0)]
    with pytest.raises(ParamOutOfRange) as err:
        build_plan(nodes)
    assert err.value.node_index == 2
    assert err.value.field == "acceleration"
    assert "node 2" in str(err.value)


def test_body_dir_beyond_half_pi_rejected():
    nodes = [node(0, 0), node(4, 0), node(0, 4, body=1.7)]
    with pytest.raises(ParamOutOfRange) as err:
        build_plan(nodes)
    assert err.value.field == "body_dir"


def test_coincident_nodes_rejected():
    nodes = [node(0, 0), node(4, 0), node(0, 4), node(4 + 1e-9, 0)]
    with pytest.raises(DegenerateLayout):
        build_plan(nodes)


def test_collinear_nodes_rejected():
    with pytest.raises(DegenerateLayout):
        build_plan([node(0, 0), node(1, 1), node(2, 2)])


def test_seed_fixture_euler_count():
    plan = seed_plan()
    assert len(plan.nodes) == 25
    # 16 nodes on the boundary of the 24x12 box
    assert len(plan.triangulation.triangles) == 2 * 25 - 16 - 2


def test_limits_validation():
    with pytest.raises(ValueError):
        PlanLimits(max_acceleration=0.0)
    with pytest.raises(ValueError):
        PlanLimits(body_dir_range=(1.0, -1.0))


# --------------------------------------------------------------------------
# edits

def test_insert_then_remove_restores_plan():
    plan = seed_plan()
    grown = edit_node(plan, "insert", node=node(2.0, -1.0, 1.0, 0.1, 0.0))
    assert len(grown.nodes) == 26
    back = edit_node(grown, "remove", index=25)
    assert back == plan


def test_update_params_only_keeps_triangulation():
    plan = seed_plan()
    replacement = PlanNode(plan.nodes[7].position, NodeParams(2.5, -0.5, 0.25))
    updated = edit_node(plan, "update", node=replacement, index=7)
    assert updated.triangulation == plan.triangulation
    assert updated.nodes[7].params == NodeParams(2.5, -0.5, 0.25)
    # original untouched
    assert plan.nodes[7].params != updated.nodes[7].params


def test_remove_interior_node_drops_two_triangles():
    plan = seed_plan()
    interior = next(
        i for i, n in enumerate(plan.nodes)
        if abs(n.position.x) < 12 and abs(n.position.y) < 6
    )
    smaller = edit_node(plan, "remove", index=interior)
    assert len(smaller.triangulation.triangles) == \
        len(plan.triangulation.triangles) - 2


def test_edit_unknown_node_index():
    plan = triangle_plan()
    with pytest.raises(UnknownNode):
        edit_node(plan, "remove", index=17)
    with pytest.raises(UnknownNode):
        edit_node(plan, "update", node=node(9, 9), index=-1)


def test_edit_bad_action():
    with pytest.raises(ValueError):
        edit_node(triangle_plan(), "rename", index=0)


# --------------------------------------------------------------------------
# queries

def test_query_at_node_returns_node_params():
    plan = seed_plan()
    for n in plan.nodes:
        assert query(plan, n.position) == n.params


def test_query_equidistant_equilateral_mean():
    s = 3.0
    nodes = [
        PlanNode(Point2(0, 0), NodeParams(1.0, 0, 0)),
        PlanNode(Point2(s, 0), NodeParams(2.0, 0, 0)),
        PlanNode(Point2(s / 2, s * math.sqrt(3) / 2), NodeParams(3.0, 0, 0)),
    ]
    plan = build_plan(nodes)
    center = Point2(s / 2, s / (2 * math.sqrt(3)))
    assert query(plan, center).acceleration == pytest.approx(2.0, abs=1e-12)


def test_query_outside_hull_falls_back_to_nearest_node():
    plan = seed_plan()
    params, info = query_info(plan, Point2(100, 100))
    assert not info.inside_hull
    assert info.triangle is None
    nearest = plan.nodes[info.nearest_node]
    assert nearest.position == Point2(12, 6)
    assert params == nearest.params


def test_query_inside_reports_containing_triangle():
    plan = triangle_plan()
    params, info = query_info(plan, Point2(1, 1))
    assert info.inside_hull and info.triangle == 0
    assert 1.0 <= params.acceleration <= 3.0


def test_query_within_local_value_range():
    plan = seed_plan()
    tri = plan.triangulation
    for t, (a, b, c) in enumerate(tri.triangles):
        pa, pb, pc = tri.vertices[a], tri.vertices[b], tri.vertices[c]
        p = Point2((pa.x + 2 * pb.x + 3 * pc.x) / 6,
                   (pa.y + 2 * pb.y + 3 * pc.y) / 6)
        got = query(plan, p)
        accs = [plan.nodes[i].params.acceleration for i in (a, b, c)]
        bodies = [plan.nodes[i].params.body_dir for i in (a, b, c)]
        assert min(accs) - 1e-12 <= got.acceleration <= max(accs) + 1e-12
        assert min(bodies) - 1e-12 <= got.body_dir <= max(bodies) + 1e-12


def test_query_deterministic_on_shared_edges():
    # Edge points belong to exactly one (lowest-index) triangle, so repeated
    # queries agree bit-for-bit no matter which neighbor the caller expects.
    plan = seed_plan()
    tri = plan.triangulation
    for t, (a, b, c) in enumerate(tri.triangles):
        for u, v in ((a, b), (b, c), (c, a)):
            mid = Point2((tri.vertices[u].x + tri.vertices[v].x) / 2,
                         (tri.vertices[u].y + tri.vertices[v].y) / 2)
            first = query(plan, mid)
            again = query(plan, mid)
            assert first == again


# --------------------------------------------------------------------------
# documents

def test_document_round_trip_bit_exact(tmp_path):
    plan = seed_plan()
    path = tmp_path / "plan.json"
    save_plan(plan, path)
    loaded = load_plan(path)
    assert loaded == plan
    # and the serialized text itself is stable
    assert dump_plan(loaded) == dump_plan(plan)


def test_document_preserves_awkward_floats(tmp_path):
    nodes = [
        node(0.1 + 0.2, -0.30000000000000004, acc=1e-17 + 1.0),
        node(4, 0, body=math.pi / 2),
        node(0, 4, ball=-math.pi / 2),
    ]
    plan = build_plan(nodes)
    path = tmp_path / "plan.json"
    save_plan(plan, path)
    loaded = load_plan(path)
    for a, b in zip(plan.nodes, loaded.nodes):
        assert a.position.x == b.position.x
        assert a.params.body_dir == b.params.body_dir


def test_from_document_reports_node_level_problems():
    doc = {
        "format": "dribbleforge-plan/1",
        "limits": {"max_acceleration": 3.0},
        "nodes": [
            {"x": 0, "y": 0, "acceleration": 1, "body_dir": 0, "ball_dir": 0},
            {"x": 4, "y": 0, "acceleration": "fast", "body_dir": 0,
             "ball_dir": 0},
            {"x": 0, "y": 4, "acceleration": 1, "body_dir": 0},
        ],
    }
    with pytest.raises(ValidationFailed) as err:
        plan_from_document(doc)
    details = err.value.details
    assert {"node": 1, "field": "acceleration",
            "message": "node 1 field 'acceleration' must be a number"} in details
    assert any(d["node"] == 2 and d["field"] == "ball_dir" for d in details)


def test_from_document_rejects_wrong_format_tag():
    with pytest.raises(ValidationFailed):
        plan_from_document({"format": "something-else", "nodes": []})


def test_from_document_semantic_errors_pass_through():
    doc = plan_to_document(seed_plan())
    doc["nodes"][0]["acceleration"] = 27.0
    with pytest.raises(ParamOutOfRange):
        plan_from_document(doc)


def test_load_plan_bad_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(ValidationFailed):
        load_plan(path)


def test_document_shape_matches_contract():
    doc = plan_to_document(seed_plan())
    assert doc["format"] == "dribbleforge-plan/1"
    assert set(doc["limits"]) == {"max_acceleration", "body_dir_range",
                                  "ball_dir_range"}
    assert len(doc["nodes"]) == len(SEED_NODE_TABLE)
    assert set(doc["nodes"][0]) == {"x", "y", "acceleration", "body_dir",
                                    "ball_dir"}
    # documents must be plain JSON all the way down
    json.dumps(doc)
