"""Planar Delaunay triangulation and inverse-distance interpolation.

The triangulation is built by incremental insertion: points are visited in
lexicographic (x, y) order, so every new point lies outside the hull built so
far and attaches to its visible hull edges.  Each attachment is followed by
Lawson legalization — recursively flipping any edge whose opposite vertex
falls strictly inside a circumcircle — which restores the empty-circumcircle
property after every insertion.

Output ordering is canonical: triangles are rotated so the smallest vertex
index comes first (preserving counter-clockwise winding) and sorted by their
vertex triples, so the same input always yields the same structure.  Exact
cocircular quads (in-circle determinant within tolerance of zero) are
resolved by a final pass that prefers the diagonal touching the lowest
vertex index of the quad.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateInput, TooFewPoints

#: Points closer than this are treated as duplicates.
DISTINCT_TOL = 1e-9
#: Interpolation queries within this distance of a vertex return its value.
VERTEX_SNAP_TOL = 1e-9
#: Margin on the lifted in-circle determinant below which a quad counts as
#: cocircular rather than a Delaunay violation.
INCIRCLE_TOL = 1e-9
#: Signed-area threshold for collinearity and point-in-triangle tests.
AREA_TOL = 1e-12


@dataclass(frozen=True)
class Point2:
    """Immutable 2-D point with finite coordinates."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite coordinate ({self.x!r}, {self.y!r})")

    def distance_to(self, other: "Point2") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class Triangulation:
    """A Delaunay triangulation over a fixed vertex list.

    ``triangles[t]`` is a counter-clockwise vertex-index triple whose
    smallest index comes first.  ``adjacency[t][i]`` is the triangle sharing
    the edge from ``triangles[t][i]`` to ``triangles[t][(i + 1) % 3]``, or
    ``-1`` on the hull.
    """

    vertices: tuple[Point2, ...]
    triangles: tuple[tuple[int, int, int], ...]
    adjacency: tuple[tuple[int, int, int], ...]


def orientation(a: Point2, b: Point2, c: Point2) -> float:
    """Twice the signed area of (a, b, c); positive when counter-clockwise."""
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)


def incircle_determinant(a: Point2, b: Point2, c: Point2, d: Point2) -> float:
    """Lifted 3x3 determinant; positive iff ``d`` lies strictly inside the
    circumcircle of counter-clockwise triangle (a, b, c)."""
    adx, ady = a.x - d.x, a.y - d.y
    bdx, bdy = b.x - d.x, b.y - d.y
    cdx, cdy = c.x - d.x, c.y - d.y
    ad2 = adx * adx + ady * ady
    bd2 = bdx * bdx + bdy * bdy
    cd2 = cdx * cdx + cdy * cdy
    return (adx * (bdy * cd2 - cdy * bd2)
            - ady * (bdx * cd2 - cdx * bd2)
            + ad2 * (bdx * cdy - cdx * bdy))


class _Mesh:
    """Mutable triangle soup used during construction.

    Triangles are stored counter-clockwise under throwaway ids; an edge map
    (undirected vertex pair -> incident triangle ids) supports neighbor
    lookup and flipping.
    """

    def __init__(self, points: list[Point2]):
        self.points = points
        self.tris: dict[int, tuple[int, int, int]] = {}
        self.edges: dict[tuple[int, int], list[int]] = {}
        self._next = 0

    def add(self, a: int, b: int, c: int) -> int:
        if orientation(self.points[a], self.points[b], self.points[c]) < 0:
            b, c = c, b
        tid = self._next
        self._next += 1
        self.tris[tid] = (a, b, c)
        for u, v in ((a, b), (b, c), (c, a)):
            self.edges.setdefault((min(u, v), max(u, v)), []).append(tid)
        return tid

    def remove(self, tid: int) -> None:
        a, b, c = self.tris.pop(tid)
        for u, v in ((a, b), (b, c), (c, a)):
            key = (min(u, v), max(u, v))
            incident = self.edges[key]
            incident.remove(tid)
            if not incident:
                del self.edges[key]

    def edge_triangles(self, u: int, v: int) -> list[int]:
        return self.edges.get((min(u, v), max(u, v)), [])

    def triangle_with(self, u: int, v: int, w: int) -> int | None:
        for tid in self.edge_triangles(u, v):
            if w in self.tris[tid]:
                return tid
        return None

    def opposite_vertex(self, tid: int, u: int, v: int) -> int:
        for idx in self.tris[tid]:
            if idx != u and idx != v:
                return idx
        raise AssertionError("degenerate triangle")


def _legalize(mesh: _Mesh, p: int, first_edges: list[tuple[int, int]]) -> None:
    """Flip edges opposite the freshly inserted vertex ``p`` until every
    incident triangle satisfies the empty-circumcircle property."""
    stack = list(first_edges)
    while stack:
        u, v = stack.pop()
        tid = mesh.triangle_with(u, v, p)
        if tid is None:  # edge already flipped away
            continue
        across = [t for t in mesh.edge_triangles(u, v) if t != tid]
        if not across:
            continue
        other = across[0]
        w = mesh.opposite_vertex(other, u, v)
        a, b, c = mesh.tris[tid]
        pa, pb, pc = mesh.points[a], mesh.points[b], mesh.points[c]
        if incircle_determinant(pa, pb, pc, mesh.points[w]) > INCIRCLE_TOL:
            mesh.remove(tid)
            mesh.remove(other)
            mesh.add(p, u, w)
            mesh.add(p, w, v)
            stack.append((u, w))
            stack.append((w, v))


def _visible_run(hull: list[int], points: list[Point2], p: Point2) -> list[int]:
    """Indices of hull edges (i -> i+1) strictly visible from ``p``.

    The hull is counter-clockwise, so edge (a, b) is visible when ``p``
    lies strictly on its clockwise side.  Visibility is contiguous for a
    point outside a convex polygon; the run is returned in walk order.
    """
    h = len(hull)
    visible = [
        orientation(points[hull[i]], points[hull[(i + 1) % h]], p) < -AREA_TOL
        for i in range(h)
    ]
    if all(visible):  # cannot happen for a point outside the hull
        raise AssertionError("point sees every hull edge")
    # Rotate to a non-visible edge, then collect the single contiguous run.
    start = visible.index(False)
    run: list[int] = []
    for k in range(h):
        i = (start + k) % h
        if visible[i]:
            run.append(i)
        elif run:
            break
    return run


def triangulate(points: list[Point2] | tuple[Point2, ...]) -> Triangulation:
    """Delaunay-triangulate ``points``.

    Raises :class:`TooFewPoints` for fewer than three points and
    :class:`DegenerateInput` when points coincide (within ``DISTINCT_TOL``)
    or are all collinear.
    """
    pts = [p if isinstance(p, Point2) else Point2(*p) for p in points]
    n = len(pts)
    if n < 3:
        raise TooFewPoints(f"need at least 3 points, got {n}")

    order = sorted(range(n), key=lambda i: (pts[i].x, pts[i].y, i))
    # Duplicate sweep: x-sorted points can only coincide while their x
    # coordinates stay within tolerance.
    for k, a in enumerate(order):
        for b in order[k + 1:]:
            if pts[b].x - pts[a].x > DISTINCT_TOL:
                break
            if pts[a].distance_to(pts[b]) <= DISTINCT_TOL:
                raise DegenerateInput(
                    f"points {min(a, b)} and {max(a, b)} coincide"
                )

    # First point off the line through the two lexicographically smallest.
    apex_pos = None
    for k in range(2, n):
        if abs(orientation(pts[order[0]], pts[order[1]], pts[order[k]])) > AREA_TOL:
            apex_pos = k
            break
    if apex_pos is None:
        raise DegenerateInput("all points are collinear")

    mesh = _Mesh(pts)
    apex = order[apex_pos]
    chain = order[:apex_pos]  # collinear, sorted along the line
    for a, b in zip(chain, chain[1:]):
        mesh.add(a, b, apex)
    # Counter-clockwise hull keeps the chain's interior points: they sit on
    # the boundary and later insertions must attach to their sub-edges.
    if orientation(pts[chain[0]], pts[chain[-1]], pts[apex]) > 0:
        hull = chain + [apex]
    else:
        hull = list(reversed(chain)) + [apex]

    for pi in order[apex_pos + 1:]:
        p = pts[pi]
        run = _visible_run(hull, pts, p)
        base_edges = []
        h = len(hull)
        for i in run:
            a, b = hull[i], hull[(i + 1) % h]
            mesh.add(a, b, pi)
            base_edges.append((a, b))
        # Replace the visible arc's interior vertices with the new point.
        keep_from = (run[-1] + 1) % h  # first endpoint after the arc
        keep_to = run[0]               # first endpoint of the arc
        new_hull = [pi]
        j = keep_from
        while True:
            new_hull.append(hull[j])
            if j == keep_to:
                break
            j = (j + 1) % h
        hull = new_hull
        _legalize(mesh, pi, base_edges)

    _canonicalize_cocircular(mesh)
    return _freeze(mesh, pts)


def _canonicalize_cocircular(mesh: _Mesh) -> None:
    """Flip exactly-cocircular quads so the kept diagonal touches the lowest
    vertex index among the four, making output independent of insert order."""
    changed = True
    while changed:
        changed = False
        for key in sorted(mesh.edges):
            incident = mesh.edges.get(key)
            if not incident or len(incident) != 2:
                continue
            u, v = key
            t1, t2 = incident
            w1 = mesh.opposite_vertex(t1, u, v)
            w2 = mesh.opposite_vertex(t2, u, v)
            lowest = min(u, v, w1, w2)
            if lowest in (u, v):
                continue  # current diagonal already touches it
            a, b, c = mesh.tris[t1]
            det = incircle_determinant(
                mesh.points[a], mesh.points[b], mesh.points[c], mesh.points[w2]
            )
            if abs(det) <= INCIRCLE_TOL:
                # Flipping requires a strictly convex quad; cocircular quads
                # with distinct vertices always are.
                mesh.remove(t1)
                mesh.remove(t2)
                mesh.add(w1, u, w2)
                mesh.add(w1, w2, v)
                changed = True


def _freeze(mesh: _Mesh, pts: list[Point2]) -> Triangulation:
    canonical = []
    for tri in mesh.tris.values():
        k = tri.index(min(tri))
        canonical.append((tri[k], tri[(k + 1) % 3], tri[(k + 2) % 3]))
    canonical.sort()

    edge_owner: dict[tuple[int, int], list[int]] = {}
    for t, (a, b, c) in enumerate(canonical):
        for u, v in ((a, b), (b, c), (c, a)):
            edge_owner.setdefault((min(u, v), max(u, v)), []).append(t)
    adjacency = []
    for t, (a, b, c) in enumerate(canonical):
        row = []
        for u, v in ((a, b), (b, c), (c, a)):
            incident = edge_owner[(min(u, v), max(u, v))]
            row.append(next((o for o in incident if o != t), -1))
        adjacency.append(tuple(row))

    return Triangulation(
        vertices=tuple(pts),
        triangles=tuple(canonical),
        adjacency=tuple(adjacency),
    )


def locate(tri: Triangulation, p: Point2) -> int | None:
    """Index of the triangle containing ``p``, or ``None`` outside the hull.

    Triangles are scanned in ascending index order, so a point on a shared
    edge or vertex deterministically belongs to the lowest-index triangle
    touching it.
    """
    for t, (ia, ib, ic) in enumerate(tri.triangles):
        a, b, c = tri.vertices[ia], tri.vertices[ib], tri.vertices[ic]
        if (orientation(a, b, p) >= -AREA_TOL
                and orientation(b, c, p) >= -AREA_TOL
                and orientation(c, a, p) >= -AREA_TOL):
            return t
    return None


def idw_interpolate(va: Point2, vb: Point2, vc: Point2,
                    ia: float, ib: float, ic: float, p: Point2) -> float:
    """Inverse-distance weighted blend of three vertex values at ``p``.

    Weight of each vertex is the reciprocal of its distance to ``p``; a
    query within ``VERTEX_SNAP_TOL`` of a vertex returns that vertex's value
    exactly.  The result is a convex combination, so it always lies within
    ``[min(ia, ib, ic), max(ia, ib, ic)]``.
    """
    num = 0.0
    den = 0.0
    for vertex, value in ((va, ia), (vb, ib), (vc, ic)):
        d = p.distance_to(vertex)
        if d <= VERTEX_SNAP_TOL:
            return value
        w = 1.0 / d
        num += w * value
        den += w
    return num / den


def wrap_angle(a: float) -> float:
    """Normalize an angle to (−π, π]."""
    return math.atan2(math.sin(a), math.cos(a))
