"""
Tests for strip graphs
"""

import pytest

from sftperiods.errors import BudgetExhausted, DimensionMismatchError, VertexCapExceeded
from sftperiods.periods.budget import SATURATED, SearchBudget
from sftperiods.periods.strip import (
    build_strip_graph,
    closed_walk,
    nontrivial_components,
    vertical_companion_bound,
    walk_to_torus,
)
from sftperiods.sft.validity import is_valid


@pytest.fixture
def alternating_graph(alternating_rows, budget):
    return build_strip_graph(alternating_rows, 2, 0, budget)


class TestBuild:
    def test_alternating_rows(self, alternating_graph):
        """Rows alternate independently and nothing constrains columns."""
        assert len(alternating_graph.vertices) == 16
        assert len(alternating_graph.edges) == 256
        assert nontrivial_components(alternating_graph.graph) == [list(range(16))]

    def test_band_rows_alternate(self, alternating_graph):
        for v in range(len(alternating_graph.vertices)):
            band = alternating_graph.band_rows(v)
            assert band.shape == (2, 4)
            assert all(band[0, y] != band[1, y] for y in range(4))

    def test_constant_strips_only_loop(self, constant_2d, budget):
        """Test that constant strips only glue onto themselves"""
        strips = build_strip_graph(constant_2d, 1, 0, budget)
        assert len(strips.vertices) == 2
        assert strips.edges == [(0, 0), (1, 1)]
        assert nontrivial_components(strips.graph) == [[0], [1]]

    def test_diagonal_strip(self, constant_2d, budget):
        """Test strips along the diagonal period (1, 1)"""
        strips = build_strip_graph(constant_2d, 1, 1, budget)
        assert len(strips.vertices) == 2
        assert all(strips.is_periodic(v, (1, 1)) for v in range(2))

    def test_vertex_cap(self, full_shift_2d, budget):
        """Test that the vertex cap raises a budget error"""
        with pytest.raises(VertexCapExceeded) as err:
            build_strip_graph(full_shift_2d, 2, 0, budget, max_vertices=10)
        assert isinstance(err.value, BudgetExhausted)

    def test_node_budget(self, full_shift_2d):
        tiny = SearchBudget(max_nodes=20, max_seconds=10.0, max_vertical=4)
        with pytest.raises(BudgetExhausted):
            build_strip_graph(full_shift_2d, 2, 0, tiny)

    def test_rejects_bad_periods(self, alternating_rows, golden_mean, budget):
        with pytest.raises(ValueError):
            build_strip_graph(alternating_rows, 0, 0, budget)
        with pytest.raises(ValueError):
            build_strip_graph(alternating_rows, 1, 2, budget)
        with pytest.raises(DimensionMismatchError):
            build_strip_graph(golden_mean, 1, 0, budget)


class TestWalks:
    def test_self_loop_walk(self, alternating_graph):
        assert closed_walk(alternating_graph.graph, [3]) == [3]

    def test_walk_through_stops(self, alternating_graph):
        walk = closed_walk(alternating_graph.graph, [0, 5, 9])
        assert walk == [0, 5, 9]
        graph = alternating_graph.graph
        assert all(graph.has_edge(a, b) for a, b in zip(walk, walk[1:] + walk[:1], strict=True))

    def test_walk_to_torus_is_valid(self, alternating_graph, alternating_rows):
        """Test that stacking a closed walk gives a valid torus"""
        torus = walk_to_torus(alternating_graph, [0, 7, 12])
        assert torus.dims == (2, 12)
        assert is_valid(torus, alternating_rows)


class TestExport:
    def test_dot(self, alternating_graph):
        dot = alternating_graph.to_dot()
        assert "digraph" in dot
        assert dot.count("->") == 256
        assert alternating_graph.label(0) in dot


def test_companion_bound(alternating_rows, full_shift_2d):
    assert vertical_companion_bound(alternating_rows, 2) == 256
    assert vertical_companion_bound(full_shift_2d, 20) == SATURATED
    with pytest.raises(ValueError):
        vertical_companion_bound(alternating_rows, 0)
