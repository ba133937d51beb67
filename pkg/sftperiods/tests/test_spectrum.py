"""
Tests for period spectra
"""

import pytest

from sftperiods.periods.budget import Verdict
from sftperiods.periods.spectrum import period_spectrum


def yes(reports):
    return [p for p, report in reports.items() if report.verdict is Verdict.YES]


def test_strong_spectrum(golden_mean, constant_2d, budget):
    """Test that duplicate and unordered periods are decided once in order"""
    assert yes(period_spectrum(golden_mean, "strong", range(1, 6), budget)) == [1, 2, 3, 4, 5]
    assert yes(period_spectrum(constant_2d, "strong", [3, 1, 2, 1], budget)) == [1]


def test_horizontal_spectrum(alternating_rows, budget, spans):
    reports = period_spectrum(alternating_rows, "horizontal", range(1, 5), budget)
    assert list(reports) == [1, 2, 3, 4]
    assert yes(reports) == [2]
    finished = [s for s in spans.get_finished_spans() if s.name == "period_spectrum"]
    assert finished[0].attributes["spectrum.size"] == 1


def test_unknown_kind(golden_mean, budget):
    with pytest.raises(ValueError):
        period_spectrum(golden_mean, "one", [1], budget)
