"""
Tests for horizontal periods
"""

import random

import pytest

from sftperiods.errors import DimensionMismatchError
from sftperiods.periods.budget import Verdict
from sftperiods.periods.horizontal import horizontal_period, least_horizontal_period, torus_height_bound
from sftperiods.sft.model import Alphabet, TorusConfig
from sftperiods.sft.validity import is_valid

from .conftest import random_spec


class TestLeastHorizontalPeriod:
    @pytest.mark.parametrize(
        "row,expected",
        [(["a", "b", "a", "b"], 2), (["a", "a", "a"], 1), (["a", "a", "b"], 3), (["a", "b", "b", "a", "b", "b"], 3)],
    )
    def test_single_row(self, row, expected):
        torus = TorusConfig.from_rows(Alphabet(["a", "b"]), [row])
        assert least_horizontal_period(torus) == expected

    def test_every_row_counts(self):
        torus = TorusConfig.from_rows(Alphabet(["a", "b"]), [["a", "b", "a", "b"], ["a", "a", "b", "b"]])
        assert least_horizontal_period(torus) == 4


class TestByGraph:
    """Decisions through strip graph cycles"""
    def test_alternating_rows_have_period_two(self, alternating_rows, budget):
        """Test the graph witness for alternating rows"""
        report = horizontal_period(alternating_rows, 2, budget, method="graph")
        assert report.verdict is Verdict.YES
        assert is_valid(report.witness, alternating_rows)
        assert least_horizontal_period(report.witness) == 2
        assert "16 vertices" in report.detail

    @pytest.mark.parametrize("n", [1, 3, 4])
    def test_alternating_rows_other_periods(self, alternating_rows, budget, n):
        assert horizontal_period(alternating_rows, n, budget, method="graph").verdict is Verdict.NO

    def test_constant_shift(self, constant_2d, budget):
        """Test that constant configurations only have horizontal period one"""
        assert horizontal_period(constant_2d, 1, budget, method="graph").verdict is Verdict.YES
        assert horizontal_period(constant_2d, 2, budget, method="graph").verdict is Verdict.NO


class TestByTorus:
    def test_agrees_with_graph(self, alternating_rows, budget):
        report = horizontal_period(alternating_rows, 2, budget, method="torus")
        assert report.verdict is Verdict.YES
        assert report.witness.dims[0] == 2
        assert is_valid(report.witness, alternating_rows)

    def test_constant_period_one(self, constant_2d, budget):
        report = horizontal_period(constant_2d, 1, budget, method="torus")
        assert report.verdict is Verdict.YES
        assert report.witness.dims == (1, 1)

    def test_clamped_height_is_unknown(self, constant_2d, budget):
        """Test that a clamped torus search cannot answer no"""
        assert torus_height_bound(constant_2d, 2) == 1024
        clamped = budget.model_copy(update={"max_vertical": 4})
        report = horizontal_period(constant_2d, 2, clamped, method="torus")
        assert report.verdict is Verdict.UNKNOWN
        assert "bound is 1024" in report.detail


class TestArguments:
    def test_auto_uses_graph_for_small_specs(self, alternating_rows, budget, spans):
        """Test that auto stays on the graph below the vertex cap"""
        assert horizontal_period(alternating_rows, 2, budget).verdict is Verdict.YES
        names = [s.name for s in spans.get_finished_spans()]
        assert "build_strip_graph" in names
        assert "torus_search.height" not in names

    def test_rejects_one_dimensional(self, golden_mean, budget):
        with pytest.raises(DimensionMismatchError):
            horizontal_period(golden_mean, 2, budget)

    def test_rejects_bad_arguments(self, alternating_rows, budget):
        with pytest.raises(ValueError):
            horizontal_period(alternating_rows, 0, budget)
        with pytest.raises(ValueError):
            horizontal_period(alternating_rows, 2, budget, method="guess")


class TestRandomSpecs:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_graph_and_torus_searches_agree(self, budget, n):
        """Test that the two methods never contradict on seeded random specs"""
        rng = random.Random(4099)
        short = budget.model_copy(update={"max_vertical": 8})
        for index in range(10):
            sft = random_spec(rng, index)
            graph = horizontal_period(sft, n, short, method="graph")
            torus = horizontal_period(sft, n, short, method="torus")
            assert graph.verdict in (Verdict.YES, Verdict.NO), sft.name
            assert {graph.verdict, torus.verdict} != {Verdict.YES, Verdict.NO}, sft.name
            for report in (graph, torus):
                if report.verdict is Verdict.YES:
                    assert is_valid(report.witness, sft)
                    assert least_horizontal_period(report.witness) == n
            if torus.verdict is Verdict.YES:
                assert graph.verdict is Verdict.YES
            if graph.verdict is Verdict.YES and graph.witness.dims[1] <= 8:
                assert torus.verdict in (Verdict.YES, Verdict.UNKNOWN)
                if torus.verdict is Verdict.YES:
                    assert torus.witness.dims[1] <= graph.witness.dims[1]
