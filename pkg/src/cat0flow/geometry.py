"""Geodesic metric spaces of nonpositive curvature and their tangent cones.

Four concrete space kinds are provided: Euclidean d-space, the closed
nonnegative quadrant in the plane, finite metric trees, and two-factor
products with the l2 metric. Points are plain tuples except on trees,
where a point is an (edge, offset) pair canonicalized at vertices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Sequence

from .errors import DomainError, UsageError, ValidationError

__all__ = [
    "EuclideanSpace",
    "ProductSpace",
    "QuadrantSpace",
    "Space",
    "TangentVector",
    "TreeGerm",
    "TreePoint",
    "TreeSpace",
    "angle_between",
    "angle_difference_bound_check",
    "cat0_quadruple_check",
    "comparison_angle",
    "cone_distance",
    "coordinate_labels",
    "distance",
    "flatten_point",
    "geodesic_point",
    "inner_product",
    "log_direction",
    "point_from_spec",
    "point_to_spec",
    "random_point",
    "space_from_spec",
]


class Space:
    """Common interface for the concrete space kinds."""

    kind = "abstract"

    def validate_point(self, p):
        raise NotImplementedError

    def distance(self, p, q) -> float:
        raise NotImplementedError

    def geodesic_point(self, p, q, t: float):
        """Point at parameter t in [0, 1] on the unique geodesic from p to q."""
        raise NotImplementedError

    def log_direction(self, p, q) -> "TangentVector":
        """Tangent vector at p pointing toward q with length d(p, q)."""
        raise NotImplementedError

    def random_point(self, rng, scale: float = 1.0):
        raise NotImplementedError

    def describe(self) -> dict:
        raise NotImplementedError


def _check_param(t: float):
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"geodesic parameter {t!r} outside [0, 1]")


class EuclideanSpace(Space):
    """R^d with the usual metric. Points are d-tuples of floats."""

    kind = "euclidean"

    def __init__(self, dim: int):
        if not isinstance(dim, int) or dim < 1:
            raise ValidationError(f"euclidean dim must be a positive integer, got {dim!r}")
        self.dim = dim

    def validate_point(self, p):
        if len(p) != self.dim:
            raise ValidationError(f"point {p!r} has {len(p)} coordinates, expected {self.dim}")
        return tuple(float(c) for c in p)

    def distance(self, p, q):
        # explicit loop keeps the arithmetic identical to the step kernels
        s = 0.0
        for a, b in zip(p, q):
            diff = a - b
            s += diff * diff
        return math.sqrt(s)

    def geodesic_point(self, p, q, t):
        _check_param(t)
        # a + t*(b - a), the same order the compiled kernels use
        return tuple(a + t * (b - a) for a, b in zip(p, q))

    def log_direction(self, p, q):
        d = self.distance(p, q)
        if d == 0.0:
            return TangentVector(self, p, None, 0.0)
        unit = tuple((b - a) / d for a, b in zip(p, q))
        return TangentVector(self, p, unit, d)

    def direction_vector(self, p, unit: Sequence[float], length: float) -> "TangentVector":
        norm = math.sqrt(sum(c * c for c in unit))
        if norm == 0.0:
            raise UsageError("zero direction for a nonzero tangent vector")
        return TangentVector(self, p, tuple(c / norm for c in unit), float(length))

    def random_point(self, rng, scale=1.0):
        return tuple(float(c) for c in rng.normal(0.0, scale, size=self.dim))

    def describe(self):
        return {"kind": "euclidean", "dim": self.dim}


class QuadrantSpace(Space):
    """The closed convex set {(x, y): x >= 0, y >= 0} in the plane.

    Geodesics are the ambient straight segments; tangent directions use the
    ambient plane angle.
    """

    kind = "quadrant"
    dim = 2

    def validate_point(self, p):
        if len(p) != 2:
            raise ValidationError(f"quadrant point {p!r} must have 2 coordinates")
        x, y = float(p[0]), float(p[1])
        if x < 0.0 or y < 0.0:
            raise ValidationError(f"point {p!r} outside the nonnegative quadrant")
        return (x, y)

    def distance(self, p, q):
        dx = p[0] - q[0]
        dy = p[1] - q[1]
        return math.sqrt(dx * dx + dy * dy)

    def geodesic_point(self, p, q, t):
        _check_param(t)
        # clamp guards against -1e-17 style rounding on the boundary
        return (max(0.0, p[0] + t * (q[0] - p[0])), max(0.0, p[1] + t * (q[1] - p[1])))

    def log_direction(self, p, q):
        d = self.distance(p, q)
        if d == 0.0:
            return TangentVector(self, p, None, 0.0)
        unit = ((q[0] - p[0]) / d, (q[1] - p[1]) / d)
        return TangentVector(self, p, unit, d)

    def direction_vector(self, p, unit, length):
        norm = math.hypot(unit[0], unit[1])
        if norm == 0.0:
            raise UsageError("zero direction for a nonzero tangent vector")
        return TangentVector(self, p, (unit[0] / norm, unit[1] / norm), float(length))

    def random_point(self, rng, scale=1.0):
        return (abs(float(rng.normal(0.0, scale))), abs(float(rng.normal(0.0, scale))))

    def describe(self):
        return {"kind": "quadrant"}


@dataclass(frozen=True)
class TreePoint:
    """Point on a metric tree: an offset measured from the first endpoint of an edge."""

    edge: int
    offset: float


@dataclass(frozen=True)
class TreeGerm:
    """Direction at a tree point: an edge and a sign (+1 toward increasing offset)."""

    edge: int
    sign: int


class TreeSpace(Space):
    """Finite metric tree given by weighted edges [(u, v, length), ...].

    Vertex labels may be any hashable values. Edge ids are list indices.
    Points at a vertex have several (edge, offset) representations; the
    canonical one uses offset 0 on the smallest-id outgoing edge, falling
    back to offset == length on the smallest-id incoming edge.
    """

    kind = "tree"

    def __init__(self, edges: Sequence[tuple]):
        if not edges:
            raise ValidationError("tree needs at least one edge")
        self.edges = []
        vertices = set()
        seen_pairs = set()
        for i, e in enumerate(edges):
            if len(e) != 3:
                raise ValidationError(f"edge {i} must be [u, v, length], got {e!r}")
            u, v, length = e[0], e[1], float(e[2])
            if u == v:
                raise ValidationError(f"edge {i} is a self-loop at {u!r}")
            if length <= 0.0:
                raise ValidationError(f"edge {i} has nonpositive length {length}")
            key = frozenset((u, v))
            if key in seen_pairs:
                raise ValidationError(f"duplicate edge {i} between {u!r} and {v!r}")
            seen_pairs.add(key)
            self.edges.append((u, v, length))
            vertices.add(u)
            vertices.add(v)
        self.vertices = vertices
        if len(self.edges) != len(vertices) - 1:
            raise ValidationError("edge list does not form a tree (wrong edge count)")

        self._adj = {w: [] for w in vertices}
        for i, (u, v, length) in enumerate(self.edges):
            self._adj[u].append((v, i, length))
            self._adj[v].append((u, i, length))

        # BFS from every vertex; trees are small so the quadratic table is fine
        self._vdist = {}
        self._parent = {}
        for root in vertices:
            dist = {root: 0.0}
            parent = {root: None}
            stack = [root]
            while stack:
                w = stack.pop()
                for nb, eid, length in self._adj[w]:
                    if nb not in dist:
                        dist[nb] = dist[w] + length
                        parent[nb] = (w, eid)
                        stack.append(nb)
            if len(dist) != len(vertices):
                raise ValidationError("edge list does not form a tree (disconnected)")
            self._vdist[root] = dist
            self._parent[root] = parent

        self._canonical_vertex = {}
        for w in vertices:
            out = sorted(i for i, (u, _, _) in enumerate(self.edges) if u == w)
            if out:
                self._canonical_vertex[w] = TreePoint(out[0], 0.0)
            else:
                inc = min(i for i, (_, v, _) in enumerate(self.edges) if v == w)
                self._canonical_vertex[w] = TreePoint(inc, self.edges[inc][2])

    def edge_length(self, eid: int) -> float:
        return self.edges[eid][2]

    def validate_point(self, p):
        if isinstance(p, TreePoint):
            eid, off = p.edge, p.offset
        else:
            try:
                eid, off = int(p[0]), float(p[1])
            except (TypeError, ValueError, IndexError):
                raise ValidationError(f"tree point must be (edge, offset), got {p!r}")
        if not 0 <= eid < len(self.edges):
            raise ValidationError(f"edge id {eid} out of range")
        length = self.edges[eid][2]
        if not 0.0 <= off <= length:
            raise ValidationError(f"offset {off} outside [0, {length}] on edge {eid}")
        return self.canonicalize(TreePoint(eid, float(off)))

    def canonicalize(self, p: TreePoint) -> TreePoint:
        u, v, length = self.edges[p.edge]
        if p.offset == 0.0:
            return self._canonical_vertex[u]
        if p.offset == length:
            return self._canonical_vertex[v]
        return p

    def vertex_point(self, w) -> TreePoint:
        if w not in self.vertices:
            raise ValidationError(f"unknown vertex {w!r}")
        return self._canonical_vertex[w]

    def at_vertex(self, p: TreePoint):
        """Vertex label if p sits on one, else None."""
        u, v, length = self.edges[p.edge]
        if p.offset == 0.0:
            return u
        if p.offset == length:
            return v
        return None

    def _endpoint_dists(self, p: TreePoint):
        u, v, length = self.edges[p.edge]
        return u, p.offset, v, length - p.offset

    def vertex_distance(self, a, b) -> float:
        return self._vdist[a][b]

    def point_vertex_distance(self, p: TreePoint, w) -> float:
        u, du, v, dv = self._endpoint_dists(p)
        return min(du + self._vdist[u][w], dv + self._vdist[v][w])

    def distance(self, p, q):
        p = self.canonicalize(p)
        q = self.canonicalize(q)
        if p.edge == q.edge:
            return abs(p.offset - q.offset)
        u, du, v, dv = self._endpoint_dists(p)
        u2, du2, v2, dv2 = self._endpoint_dists(q)
        return min(
            du + self._vdist[u][u2] + du2,
            du + self._vdist[u][v2] + dv2,
            dv + self._vdist[v][u2] + du2,
            dv + self._vdist[v][v2] + dv2,
        )

    def _vertex_path(self, a, b):
        """Vertices from a to b inclusive, with the edge ids between them."""
        parent = self._parent[a]
        verts = [b]
        eids = []
        w = b
        while w != a:
            w, eid = parent[w]
            verts.append(w)
            eids.append(eid)
        verts.reverse()
        eids.reverse()
        return verts, eids

    def path_segments(self, p: TreePoint, q: TreePoint):
        """Geodesic from p to q as [(edge, offset_from, offset_to), ...]."""
        p = self.canonicalize(p)
        q = self.canonicalize(q)
        if p.edge == q.edge:
            return [(p.edge, p.offset, q.offset)]
        u, du, v, dv = self._endpoint_dists(p)
        u2, du2, v2, dv2 = self._endpoint_dists(q)
        routes = [
            (du + self._vdist[u][u2] + du2, u, u2),
            (du + self._vdist[u][v2] + dv2, u, v2),
            (dv + self._vdist[v][u2] + du2, v, u2),
            (dv + self._vdist[v][v2] + dv2, v, v2),
        ]
        _, a, b = min(routes, key=lambda r: r[0])
        segs = []
        # leading partial edge, unless p already sits on vertex a
        if self.at_vertex(p) is None or self.at_vertex(p) != a:
            target = 0.0 if self.edges[p.edge][0] == a else self.edges[p.edge][2]
            if target != p.offset:
                segs.append((p.edge, p.offset, target))
        verts, eids = self._vertex_path(a, b)
        for w, w_next, eid in zip(verts, verts[1:], eids):
            eu, ev, elen = self.edges[eid]
            if eu == w:
                segs.append((eid, 0.0, elen))
            else:
                segs.append((eid, elen, 0.0))
        if self.at_vertex(q) is None or self.at_vertex(q) != b:
            start = 0.0 if self.edges[q.edge][0] == b else self.edges[q.edge][2]
            if start != q.offset:
                segs.append((q.edge, start, q.offset))
        if not segs:
            segs.append((p.edge, p.offset, p.offset))
        return segs

    def geodesic_point(self, p, q, t):
        _check_param(t)
        total = self.distance(p, q)
        if total == 0.0:
            return self.canonicalize(p)
        target = t * total
        segs = self.path_segments(p, q)
        walked = 0.0
        for eid, s_from, s_to in segs:
            seg_len = abs(s_to - s_from)
            if walked + seg_len >= target or (eid, s_from, s_to) == segs[-1]:
                remaining = min(target - walked, seg_len)
                off = s_from + math.copysign(remaining, s_to - s_from) if seg_len else s_from
                off = min(max(off, min(s_from, s_to)), max(s_from, s_to))
                return self.canonicalize(TreePoint(eid, off))
            walked += seg_len
        return self.canonicalize(q)

    def log_direction(self, p, q):
        p = self.canonicalize(p)
        q = self.canonicalize(q)
        d = self.distance(p, q)
        if d == 0.0:
            return TangentVector(self, p, None, 0.0)
        eid, s_from, s_to = self.path_segments(p, q)[0]
        germ = TreeGerm(eid, 1 if s_to > s_from else -1)
        return TangentVector(self, p, germ, d)

    def germs_at(self, p: TreePoint):
        """All direction germs at p (two on an edge interior, degree many at a vertex)."""
        p = self.canonicalize(p)
        w = self.at_vertex(p)
        if w is None:
            return [TreeGerm(p.edge, 1), TreeGerm(p.edge, -1)]
        germs = []
        for nb, eid, length in self._adj[w]:
            sign = 1 if self.edges[eid][0] == w else -1
            germs.append(TreeGerm(eid, sign))
        germs.sort(key=lambda g: (g.edge, -g.sign))
        return germs

    def walk(self, p: TreePoint, germ: TreeGerm, arc: float, chooser=None) -> TreePoint:
        """Move arc length along germ; at vertices continue per chooser (default: stop).

        chooser(germs) picks the next germ among the continuations, or None
        to stop at the vertex. Used for sampling; geodesics use path_segments.
        """
        p = self.canonicalize(p)
        cur, g, left = p, germ, arc
        while left > 0.0:
            u, v, length = self.edges[g.edge]
            pos = cur.offset if cur.edge == g.edge else (0.0 if self.at_vertex(cur) == u else length)
            room = (length - pos) if g.sign > 0 else pos
            if left <= room:
                return self.canonicalize(TreePoint(g.edge, pos + g.sign * left))
            left -= room
            cur = self.canonicalize(TreePoint(g.edge, length if g.sign > 0 else 0.0))
            w = self.at_vertex(cur)
            options = [h for h in self.germs_at(cur) if not (h.edge == g.edge and h.sign == -g.sign)]
            if not options or chooser is None:
                return cur
            g = chooser(options)
            if g is None:
                return cur
        return self.canonicalize(cur)

    def random_point(self, rng, scale=1.0):
        eid = int(rng.integers(0, len(self.edges)))
        off = float(rng.uniform(0.0, self.edges[eid][2]))
        return self.canonicalize(TreePoint(eid, off))

    def describe(self):
        return {"kind": "tree", "edges": [[u, v, length] for u, v, length in self.edges]}


class ProductSpace(Space):
    """Two-factor product with d((a,b),(a',b'))^2 = d(a,a')^2 + d(b,b')^2."""

    kind = "product"

    def __init__(self, left: Space, right: Space):
        self.left = left
        self.right = right

    def validate_point(self, p):
        if len(p) != 2:
            raise ValidationError(f"product point must be a pair, got {p!r}")
        return (self.left.validate_point(p[0]), self.right.validate_point(p[1]))

    def distance(self, p, q):
        return math.hypot(self.left.distance(p[0], q[0]), self.right.distance(p[1], q[1]))

    def geodesic_point(self, p, q, t):
        _check_param(t)
        return (self.left.geodesic_point(p[0], q[0], t), self.right.geodesic_point(p[1], q[1], t))

    def log_direction(self, p, q):
        vl = self.left.log_direction(p[0], q[0])
        vr = self.right.log_direction(p[1], q[1])
        length = math.hypot(vl.length, vr.length)
        if length == 0.0:
            return TangentVector(self, p, None, 0.0)
        return TangentVector(self, p, (vl, vr), length)

    def random_point(self, rng, scale=1.0):
        return (self.left.random_point(rng, scale), self.right.random_point(rng, scale))

    def describe(self):
        return {"kind": "product", "left": self.left.describe(), "right": self.right.describe()}


@dataclass(frozen=True)
class TangentVector:
    """Element of the tangent cone at a base point.

    Zero length encodes the cone vertex; its direction datum is None and it
    compares equal to any other vertex vector at the same base.
    """

    space: Space
    base: Any
    data: Any
    length: float

    @property
    def is_vertex(self) -> bool:
        return self.length == 0.0

    def scaled(self, factor: float) -> "TangentVector":
        if factor < 0.0:
            raise UsageError("tangent vectors scale by nonnegative factors only")
        if self.is_vertex or factor == 0.0:
            return TangentVector(self.space, self.base, None, 0.0)
        data = self.data
        if isinstance(self.space, ProductSpace):
            # component lengths carry the magnitude split; keep them in sync
            data = (self.data[0].scaled(factor), self.data[1].scaled(factor))
        return TangentVector(self.space, self.base, data, self.length * factor)

    def same_base(self, other: "TangentVector", tol: float = 1e-9) -> bool:
        return self.space is other.space and self.space.distance(self.base, other.base) <= tol


def distance(space: Space, p, q) -> float:
    return space.distance(p, q)


def geodesic_point(space: Space, p, q, t: float):
    return space.geodesic_point(p, q, t)


def log_direction(space: Space, p, q) -> TangentVector:
    return space.log_direction(p, q)


def comparison_angle(space: Space, apex, y, z) -> float:
    """Angle at the apex of the Euclidean triangle with the same side lengths."""
    a = space.distance(apex, y)
    b = space.distance(apex, z)
    if a == 0.0 or b == 0.0:
        raise DomainError("comparison angle undefined for coincident points")
    c = space.distance(y, z)
    cosv = (a * a + b * b - c * c) / (2.0 * a * b)
    return math.acos(min(1.0, max(-1.0, cosv)))


def _unit_cos(v: TangentVector, w: TangentVector) -> float:
    """Cosine of the angle between the directions of two nonvertex vectors."""
    space = v.space
    if isinstance(space, (EuclideanSpace, QuadrantSpace)):
        return sum(a * b for a, b in zip(v.data, w.data))
    if isinstance(space, TreeSpace):
        return 1.0 if v.data == w.data else -1.0
    if isinstance(space, ProductSpace):
        vl, vr = v.data
        wl, wr = w.data
        nv = math.hypot(vl.length, vr.length)
        nw = math.hypot(wl.length, wr.length)
        return (inner_product(vl, wl) + inner_product(vr, wr)) / (nv * nw)
    raise UsageError(f"no tangent structure for space kind {space.kind!r}")


def inner_product(v: TangentVector, w: TangentVector) -> float:
    """<v, w> = |v| |w| cos(angle); zero whenever either vector is the vertex."""
    if v.is_vertex or w.is_vertex:
        return 0.0
    if not v.same_base(w):
        raise UsageError("tangent vectors live at different base points")
    return v.length * w.length * _unit_cos(v, w)


def angle_between(v: TangentVector, w: TangentVector) -> float:
    if v.is_vertex or w.is_vertex:
        raise UsageError("angle with the cone vertex is undefined")
    cosv = inner_product(v, w) / (v.length * w.length)
    return math.acos(min(1.0, max(-1.0, cosv)))


def cone_distance(v: TangentVector, w: TangentVector) -> float:
    """Distance in the tangent cone (law of cosines over the direction angle)."""
    if v.is_vertex and w.is_vertex:
        return 0.0
    if v.is_vertex:
        return w.length
    if w.is_vertex:
        return v.length
    sq = v.length**2 + w.length**2 - 2.0 * inner_product(v, w)
    return math.sqrt(max(0.0, sq))


def cat0_quadruple_check(space: Space, y, x0, x1, t: float, tol: float = 1e-9):
    """Convexity of squared distance along geodesics.

    Returns (ok, slack) where slack >= -tol certifies
    d(y, m_t)^2 <= (1-t) d(y,x0)^2 + t d(y,x1)^2 - t(1-t) d(x0,x1)^2.
    """
    m = space.geodesic_point(x0, x1, t)
    lhs = space.distance(y, m) ** 2
    rhs = (
        (1.0 - t) * space.distance(y, x0) ** 2
        + t * space.distance(y, x1) ** 2
        - t * (1.0 - t) * space.distance(x0, x1) ** 2
    )
    slack = rhs - lhs
    return slack >= -tol, slack


def angle_difference_bound_check(v1: TangentVector, v2: TangentVector, v3_unit: TangentVector, tol: float = 1e-9):
    """|<v3, v1> - <v3, v2>| <= cone_distance(v1, v2) for unit v3.

    Returns (ok, slack).
    """
    if abs(v3_unit.length - 1.0) > 1e-12:
        raise UsageError("third vector must have unit length")
    gap = abs(inner_product(v3_unit, v1) - inner_product(v3_unit, v2))
    slack = cone_distance(v1, v2) - gap
    return slack >= -tol, slack


def random_point(space: Space, rng, scale: float = 1.0):
    return space.random_point(rng, scale)


def space_from_spec(obj: dict, field: str = "space") -> Space:
    """Build a space from its config mapping; diagnostics name the bad field."""
    if not isinstance(obj, dict):
        raise ValidationError(f"{field}: expected a mapping, got {type(obj).__name__}")
    kind = obj.get("kind")
    if kind == "euclidean":
        dim = obj.get("dim")
        if not isinstance(dim, int) or dim < 1:
            raise ValidationError(f"{field}.dim: expected a positive integer, got {dim!r}")
        return EuclideanSpace(dim)
    if kind == "quadrant":
        return QuadrantSpace()
    if kind == "tree":
        edges = obj.get("edges")
        if not isinstance(edges, list) or not edges:
            raise ValidationError(f"{field}.edges: expected a nonempty list")
        try:
            return TreeSpace([tuple(e) for e in edges])
        except ValidationError as exc:
            raise ValidationError(f"{field}.edges: {exc}") from None
    if kind == "product":
        if "left" not in obj or "right" not in obj:
            raise ValidationError(f"{field}: product needs 'left' and 'right'")
        return ProductSpace(
            space_from_spec(obj["left"], field + ".left"),
            space_from_spec(obj["right"], field + ".right"),
        )
    raise ValidationError(f"{field}.kind: unknown space kind {kind!r}")


def point_from_spec(space: Space, obj, field: str = "point"):
    try:
        if isinstance(space, TreeSpace):
            if isinstance(obj, dict):
                if "edge" not in obj or "offset" not in obj:
                    raise ValidationError("needs 'edge' and 'offset'")
                return space.validate_point((obj["edge"], obj["offset"]))
            return space.validate_point(tuple(obj))
        if isinstance(space, ProductSpace):
            if not isinstance(obj, (list, tuple)) or len(obj) != 2:
                raise ValidationError("product point must be a two-element list")
            return (
                point_from_spec(space.left, obj[0], field + "[0]"),
                point_from_spec(space.right, obj[1], field + "[1]"),
            )
        return space.validate_point(tuple(obj))
    except (TypeError, ValidationError) as exc:
        raise ValidationError(f"{field}: {exc}") from None


def point_to_spec(space: Space, p):
    if isinstance(space, TreeSpace):
        p = space.canonicalize(p)
        return {"edge": p.edge, "offset": p.offset}
    if isinstance(space, ProductSpace):
        return [point_to_spec(space.left, p[0]), point_to_spec(space.right, p[1])]
    return list(p)


def coordinate_labels(space: Space, prefix: str = "") -> list[str]:
    """Column labels used when flattening points into CSV rows."""
    if isinstance(space, EuclideanSpace):
        if space.dim == 1:
            return [prefix + "x"]
        if space.dim == 2:
            return [prefix + "x", prefix + "y"]
        return [prefix + f"x{i}" for i in range(space.dim)]
    if isinstance(space, QuadrantSpace):
        return [prefix + "x", prefix + "y"]
    if isinstance(space, TreeSpace):
        return [prefix + "edge", prefix + "offset"]
    if isinstance(space, ProductSpace):
        return coordinate_labels(space.left, prefix + "l_") + coordinate_labels(space.right, prefix + "r_")
    raise UsageError(f"no labels for space kind {space.kind!r}")


def flatten_point(space: Space, p) -> list[float]:
    if isinstance(space, (EuclideanSpace, QuadrantSpace)):
        return [float(c) for c in p]
    if isinstance(space, TreeSpace):
        p = space.canonicalize(p)
        return [float(p.edge), p.offset]
    if isinstance(space, ProductSpace):
        return flatten_point(space.left, p[0]) + flatten_point(space.right, p[1])
    raise UsageError(f"cannot flatten points of space kind {space.kind!r}")
