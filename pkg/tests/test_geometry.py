"""Model spaces: metrics, geodesics, tangent cones, serialization."""

from __future__ import annotations

import math

import networkx as nx
import numpy as np
import pytest

from cat0flow import geometry as geo
from cat0flow.errors import DomainError, UsageError, ValidationError
from cat0flow.geometry import (
    EuclideanSpace,
    ProductSpace,
    QuadrantSpace,
    TangentVector,
    TreePoint,
    TreeSpace,
)

from conftest import make_tripod


def _all_spaces():
    tri = make_tripod()
    return [
        EuclideanSpace(2),
        QuadrantSpace(),
        tri,
        ProductSpace(make_tripod(), EuclideanSpace(1)),
    ]


def test_euclidean_distance_and_geodesic():
    sp = EuclideanSpace(2)
    assert sp.distance((0.0, 0.0), (3.0, 4.0)) == 5.0
    assert sp.geodesic_point((0.0, 0.0), (2.0, 2.0), 0.25) == (0.5, 0.5)


def test_quadrant_rejects_negative_points():
    sp = QuadrantSpace()
    with pytest.raises(ValidationError):
        sp.validate_point((-0.1, 1.0))
    with pytest.raises(ValidationError):
        sp.validate_point((1.0, -1e-9))
    assert sp.validate_point((0.0, 0.0)) == (0.0, 0.0)


def test_geodesic_parameter_range():
    sp = EuclideanSpace(1)
    with pytest.raises(DomainError):
        sp.geodesic_point((0.0,), (1.0,), 1.5)
    with pytest.raises(DomainError):
        sp.geodesic_point((0.0,), (1.0,), -0.1)


def test_tree_rejects_non_trees():
    with pytest.raises(ValidationError):
        TreeSpace([("a", "b", 1.0), ("b", "c", 1.0), ("c", "a", 1.0)])  # cycle
    with pytest.raises(ValidationError):
        TreeSpace([("a", "b", 1.0), ("c", "d", 1.0)])  # disconnected
    with pytest.raises(ValidationError):
        TreeSpace([("a", "a", 1.0)])
    with pytest.raises(ValidationError):
        TreeSpace([("a", "b", 0.0)])


def _random_tree_space(rng, n_vertices=12):
    g = nx.random_labeled_tree(n_vertices, seed=int(rng.integers(1 << 30)))
    edges = []
    for u, v in g.edges():
        edges.append((u, v, float(rng.uniform(0.5, 2.0))))
    return TreeSpace(edges), edges


def test_tree_distance_matches_graph_oracle(rng):
    # independent oracle: subdivide the edges carrying the two points and
    # let networkx find the shortest path in the enlarged graph
    for _ in range(20):
        space, edges = _random_tree_space(rng)
        g = nx.Graph()
        for u, v, w in edges:
            g.add_edge(u, v, weight=w)
        for _ in range(10):
            p = space.random_point(rng)
            q = space.random_point(rng)
            gp = g.copy()
            for label, pt in (("_p", p), ("_q", q)):
                u, v, w = edges[pt.edge]
                if gp.has_edge(u, v):
                    gp.remove_edge(u, v)
                    gp.add_edge(u, label, weight=pt.offset)
                    gp.add_edge(label, v, weight=w - pt.offset)
                else:
                    # second point on an already-split edge: attach to the
                    # first split node with the offset difference
                    other = "_p"
                    d0 = space.distance(space.validate_point(p), pt)
                    gp.add_edge(other, label, weight=d0)
            want = nx.shortest_path_length(gp, "_p", "_q", weight="weight")
            got = space.distance(p, q)
            assert got == pytest.approx(want, abs=1e-12)


def test_tree_geodesic_splits_distance(rng):
    space, _ = _random_tree_space(rng)
    for _ in range(50):
        p = space.random_point(rng)
        q = space.random_point(rng)
        t = float(rng.random())
        m = space.geodesic_point(p, q, t)
        d = space.distance(p, q)
        assert space.distance(p, m) == pytest.approx(t * d, abs=1e-9)
        assert space.distance(m, q) == pytest.approx((1.0 - t) * d, abs=1e-9)


def test_tree_vertex_representations_coincide(tripod):
    # the center vertex of the tripod can be written on any of its edges
    reps = [TreePoint(0, 0.0), TreePoint(1, 0.0), TreePoint(2, 0.0)]
    canon = [tripod.canonicalize(r) for r in reps]
    assert len(set(canon)) == 1
    assert tripod.distance(reps[0], reps[2]) == 0.0


def test_tripod_leaf_distances(tripod):
    a = tripod.vertex_point("a")
    b = tripod.vertex_point("b")
    assert tripod.distance(a, b) == pytest.approx(2.0)
    mid = tripod.geodesic_point(a, b, 0.5)
    assert tripod.at_vertex(mid) == "c"


def test_product_distance_is_hypot(product, tripod):
    pa = (tripod.vertex_point("a"), (0.0,))
    pb = (tripod.vertex_point("b"), (1.0,))
    assert product.distance(pa, pb) == pytest.approx(math.hypot(2.0, 1.0))


def test_log_direction_length_equals_distance(rng):
    for space in _all_spaces():
        for _ in range(25):
            p = space.random_point(rng)
            q = space.random_point(rng)
            v = space.log_direction(p, q)
            assert v.length == pytest.approx(space.distance(p, q), abs=1e-12)


def test_metric_axioms_sampled(rng):
    for space in _all_spaces():
        for _ in range(60):
            p = space.random_point(rng)
            q = space.random_point(rng)
            r = space.random_point(rng)
            dpq = space.distance(p, q)
            assert dpq >= 0.0
            assert space.distance(p, p) == 0.0
            assert dpq == pytest.approx(space.distance(q, p), abs=1e-12)
            assert dpq <= space.distance(p, r) + space.distance(r, q) + 1e-9


def test_quadruple_inequality_sampled(rng):
    for space in _all_spaces():
        for _ in range(60):
            y = space.random_point(rng)
            x0 = space.random_point(rng)
            x1 = space.random_point(rng)
            t = float(rng.random())
            ok, slack = geo.cat0_quadruple_check(space, y, x0, x1, t)
            assert ok, (space.kind, slack)


def test_cone_distance_law(rng):
    # tree germs either agree (distance is |len difference|) or open up the
    # full angle pi (distance is the sum of lengths)
    space = make_tripod()
    p = space.vertex_point("c")
    germs = space.germs_at(p)
    v = TangentVector(space, p, germs[0], 2.0)
    w_same = TangentVector(space, p, germs[0], 0.5)
    w_other = TangentVector(space, p, germs[1], 0.5)
    assert geo.cone_distance(v, w_same) == pytest.approx(1.5)
    assert geo.cone_distance(v, w_other) == pytest.approx(2.5)
    vertex = TangentVector(space, p, None, 0.0)
    assert geo.cone_distance(v, vertex) == 2.0


def test_inner_product_requires_shared_base(e2):
    v = TangentVector(e2, (0.0, 0.0), (1.0, 0.0), 1.0)
    w = TangentVector(e2, (5.0, 0.0), (1.0, 0.0), 1.0)
    with pytest.raises(UsageError):
        geo.inner_product(v, w)


def test_angle_difference_bound_sampled(rng):
    for space in _all_spaces():
        for _ in range(40):
            base = space.random_point(rng)
            pts = [space.random_point(rng) for _ in range(3)]
            vecs = [space.log_direction(base, q) for q in pts]
            if any(v.is_vertex for v in vecs):
                continue
            unit = vecs[2].scaled(1.0 / vecs[2].length)
            ok, slack = geo.angle_difference_bound_check(vecs[0], vecs[1], unit)
            assert ok, (space.kind, slack)


def test_scaled_product_vector_keeps_components_consistent(product):
    tri = product.left
    p = (tri.vertex_point("a"), (0.0,))
    q = (tri.vertex_point("b"), (2.0,))
    v = product.log_direction(p, q)
    half = v.scaled(0.5)
    assert half.length == pytest.approx(0.5 * v.length)
    assert math.hypot(half.data[0].length, half.data[1].length) == pytest.approx(half.length)
    # the inner product has to see the rescaling too
    assert geo.inner_product(half, v) == pytest.approx(0.5 * v.length**2)


def test_scaling_rejects_negative_factors(e2):
    v = TangentVector(e2, (0.0, 0.0), (1.0, 0.0), 1.0)
    with pytest.raises(UsageError):
        v.scaled(-1.0)
    assert v.scaled(0.0).is_vertex


def test_space_round_trip_through_spec():
    for space in _all_spaces():
        rebuilt = geo.space_from_spec(space.describe())
        assert rebuilt.describe() == space.describe()


def test_space_from_spec_names_bad_field():
    with pytest.raises(ValidationError, match="space.dim"):
        geo.space_from_spec({"kind": "euclidean", "dim": 0})
    with pytest.raises(ValidationError, match="space.kind"):
        geo.space_from_spec({"kind": "sphere"})
    with pytest.raises(ValidationError, match="space.edges"):
        geo.space_from_spec({"kind": "tree", "edges": []})


def test_point_spec_round_trip(rng):
    for space in _all_spaces():
        for _ in range(10):
            p = space.random_point(rng)
            spec = geo.point_to_spec(space, p)
            back = geo.point_from_spec(space, spec)
            assert space.distance(p, back) == 0.0


def test_flatten_point_matches_labels(rng):
    for space in _all_spaces():
        labels = geo.coordinate_labels(space)
        flat = geo.flatten_point(space, space.random_point(rng))
        assert len(labels) == len(flat)
        assert all(isinstance(c, float) for c in flat)
