"""Product-graph construction: shapes, edge counts, canonical ordering."""

import numpy as np
import pytest

from treeline import CapacityError, DomainError, ProductGraph, SlabSpec, build_graph


class TestSlabSpecValidation:
    def test_rejects_unknown_kind(self):
        with pytest.raises(DomainError):
            SlabSpec("ladder", 1, 1)

    def test_rejects_nonpositive_depth(self):
        with pytest.raises(DomainError):
            SlabSpec("strip", 0, 1)

    def test_rejects_negative_width(self):
        with pytest.raises(DomainError):
            SlabSpec("strip", 1, -1)

    def test_slab_requires_degree(self):
        with pytest.raises(DomainError):
            SlabSpec("slab", 1, 1)

    def test_strip_takes_no_degree(self):
        with pytest.raises(DomainError):
            SlabSpec("strip", 1, 1, d=3)

    def test_rejects_degree_two(self):
        with pytest.raises(DomainError):
            SlabSpec("slab", 1, 1, d=2)

    def test_width_zero_allowed(self):
        graph = build_graph(SlabSpec("strip", 2, 0))
        assert graph.levels == 1
        assert graph.n_vertices == 3
        assert graph.n_edges == 2

    def test_branching(self):
        assert SlabSpec("strip", 1, 1).branching == 1
        assert SlabSpec("slab", 1, 1, d=5).branching == 4


class TestStripShape:
    @pytest.mark.parametrize(
        "n, k, vertices, edges",
        [(1, 3, 14, 13), (2, 1, 9, 10), (4, 100, 1005, 1604)],
    )
    def test_counts(self, n, k, vertices, edges):
        graph = build_graph(SlabSpec("strip", n, k))
        assert graph.n_vertices == vertices
        assert graph.n_edges == edges
        assert graph.levels == 2 * k + 1
        assert graph.tree_size == n + 1

    def test_explicit_edge_list(self):
        graph = build_graph(SlabSpec("strip", 1, 1))
        pairs = list(zip(graph.edges_u.tolist(), graph.edges_v.tolist()))
        assert pairs == [(0, 1), (0, 3), (1, 2), (1, 4), (2, 5)]

    def test_origin_and_target(self):
        graph = build_graph(SlabSpec("strip", 1, 3))
        assert graph.origin == 3
        assert graph.first_leaf == 1
        assert graph.n_leaves == 1
        assert (graph.target_lo, graph.target_hi) == (7, 14)


class TestSlabShape:
    def test_small_ternary(self):
        graph = build_graph(SlabSpec("slab", 1, 1, d=3))
        assert graph.tree_size == 3
        assert graph.n_vertices == 9
        assert graph.n_edges == 8
        assert graph.n_leaves == 2
        assert graph.first_leaf == 1
        assert (graph.target_lo, graph.target_hi) == (3, 6)

    def test_degree_four_depth_two(self):
        graph = build_graph(SlabSpec("slab", 2, 2, d=4))
        assert graph.tree_size == 13
        assert graph.levels == 5
        assert graph.n_vertices == 65
        assert graph.n_edges == 76
        assert graph.n_leaves == 9
        assert graph.first_leaf == 4

    def test_line_edges_only_above_leaves(self):
        # depth-n vertices carry no line edges, so each leaf fiber is
        # connected to the rest only through its parent rungs
        graph = build_graph(SlabSpec("slab", 1, 2, d=3))
        leaf_fiber = set(range(graph.target_lo, graph.target_hi))
        internal = [
            (u, v)
            for u, v in zip(graph.edges_u.tolist(), graph.edges_v.tolist())
            if u in leaf_fiber and v in leaf_fiber
        ]
        assert internal == []


class TestDeterminism:
    def test_rebuild_identical(self):
        a = build_graph(SlabSpec("slab", 2, 3, d=4))
        b = build_graph(SlabSpec("slab", 2, 3, d=4))
        assert np.array_equal(a.edges_u, b.edges_u)
        assert np.array_equal(a.edges_v, b.edges_v)
        assert a.origin == b.origin

    def test_edges_are_int32(self):
        graph = build_graph(SlabSpec("strip", 1, 1))
        assert graph.edges_u.dtype == np.int32
        assert graph.edges_v.dtype == np.int32

    def test_edges_oriented(self):
        graph = build_graph(SlabSpec("slab", 2, 2, d=4))
        assert np.all(graph.edges_u < graph.edges_v)


class TestCapacity:
    def test_too_wide(self):
        with pytest.raises(CapacityError):
            build_graph(SlabSpec("strip", 1, 600_000))

    def test_too_deep_slab(self):
        with pytest.raises(CapacityError):
            build_graph(SlabSpec("slab", 13, 1, d=4))


def test_graph_is_frozen():
    graph = build_graph(SlabSpec("strip", 1, 1))
    assert isinstance(graph, ProductGraph)
    with pytest.raises(AttributeError):
        graph.origin = 5
