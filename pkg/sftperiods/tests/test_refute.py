"""
Tests for bounded refutation of period lattices
"""

import itertools

import pytest

from sftperiods.errors import AlphabetMismatchError, DimensionMismatchError
from sftperiods.periods.budget import SearchBudget, Verdict
from sftperiods.periods.lattice import PeriodGroup
from sftperiods.periods.refute import ForbiddenStream, bounded_lattice_refute
from sftperiods.sft.model import Pattern
from sftperiods.sft.validity import is_valid

UNIT = PeriodGroup.generated_by([(1, 0), (0, 1)], 2)


class TestFromSpec:
    def test_alternating_rows_refute_unit_lattice(self, alternating_rows, budget):
        """Test that a constant filling is refuted"""
        report = bounded_lattice_refute(alternating_rows, UNIT, budget)
        assert report.verdict is Verdict.NO

    def test_invariant_filling(self, alternating_rows, budget):
        report = bounded_lattice_refute(alternating_rows, PeriodGroup.scaled(2, 2), budget)
        assert report.verdict is Verdict.YES
        assert is_valid(report.witness, alternating_rows)

    def test_skewed_lattice(self, alternating_rows, budget):
        """(1, 1) and (2, 0) fit a checkerboard."""
        group = PeriodGroup.generated_by([(1, 1), (2, 0)], 2)
        report = bounded_lattice_refute(alternating_rows, group, budget)
        assert report.verdict is Verdict.YES
        assert is_valid(report.witness, alternating_rows)


class TestFromStream:
    def test_finite_stream(self, alternating_rows, budget):
        """Test that a finite stream refutes every filling"""
        report = bounded_lattice_refute(ForbiddenStream.of(alternating_rows), UNIT, budget)
        assert report.verdict is Verdict.NO
        assert report.detail == "all fillings refuted after 2 patterns"

    def test_surviving_stream(self, alternating_rows, budget):
        group = PeriodGroup.generated_by([(2, 0), (0, 1)], 2)
        report = bounded_lattice_refute(ForbiddenStream.of(alternating_rows), group, budget)
        assert report.verdict is Verdict.YES
        assert report.detail.startswith("2 fillings survive")

    def test_endless_stream_runs_out_of_budget(self, alternating_rows):
        """Test that an endless stream with survivors ends unknown"""
        ab = alternating_rows.alphabet
        same = Pattern((((0, 0), 0), ((1, 0), 0)))
        stream = ForbiddenStream(ab, 2, itertools.repeat(same))
        group = PeriodGroup.generated_by([(2, 0), (0, 1)], 2)
        tiny = SearchBudget(max_nodes=1000, max_seconds=10.0, max_vertical=4)
        report = bounded_lattice_refute(stream, group, tiny)
        assert report.verdict is Verdict.UNKNOWN
        assert report.stats.nodes > 0

    def test_bad_symbol_in_stream(self, alternating_rows, budget):
        """Test that streamed symbols are checked against the alphabet"""
        stream = ForbiddenStream(alternating_rows.alphabet, 2, [Pattern((((0, 0), 5),))])
        with pytest.raises(AlphabetMismatchError):
            bounded_lattice_refute(stream, UNIT, budget)


class TestArguments:
    def test_lattice_must_be_full_rank(self, alternating_rows, budget):
        with pytest.raises(ValueError):
            bounded_lattice_refute(alternating_rows, PeriodGroup.generated_by([(1, 0)], 2), budget)

    def test_lattice_dimension(self, alternating_rows, budget):
        with pytest.raises(DimensionMismatchError):
            bounded_lattice_refute(alternating_rows, PeriodGroup.scaled(2, 1), budget)
