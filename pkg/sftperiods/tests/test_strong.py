"""
Tests for strong periods and orbit counting
"""

import random

import pytest

from sftperiods.errors import BudgetExhausted
from sftperiods.periods.budget import SearchBudget, Verdict
from sftperiods.periods.lattice import PeriodGroup, stabilizer
from sftperiods.periods.search import enumerate_torus, sofic_projection
from sftperiods.periods.strong import (
    count_strong,
    count_strong_inclusion_exclusion,
    has_trivial_stabilizer,
    strong_period_exists,
)
from sftperiods.sft.model import BlockCode
from sftperiods.sft.validity import is_valid

from .conftest import random_spec


def primitive_necklaces(k: int, p: int) -> int:
    """Aperiodic necklaces of length p over k letters."""

    def mobius(n: int) -> int:
        result, d = 1, 2
        while d * d <= n:
            if n % d == 0:
                n //= d
                if n % d == 0:
                    return 0
                result = -result
            d += 1
        return -result if n > 1 else result

    return sum(mobius(p // d) * k**d for d in range(1, p + 1) if p % d == 0) // p


class TestStrongPeriodExists:
    def test_witness_has_exact_lattice(self, full_shift_2d, budget):
        """Test that the witness lattice is exactly pZ^2"""
        report = strong_period_exists(full_shift_2d, 3, budget)
        assert report.verdict is Verdict.YES
        assert is_valid(report.witness, full_shift_2d)
        assert stabilizer(report.witness) == PeriodGroup.scaled(3, 2)

    def test_constant_shift_has_only_period_one(self, constant_2d, budget):
        """Test that constant configurations have no strong period above one"""
        assert strong_period_exists(constant_2d, 1, budget).verdict is Verdict.YES
        report = strong_period_exists(constant_2d, 2, budget)
        assert report.verdict is Verdict.NO
        assert report.witness is None

    def test_golden_mean(self, golden_mean, budget):
        for p in range(1, 6):
            assert strong_period_exists(golden_mean, p, budget).verdict is Verdict.YES

    def test_tiny_budget_gives_unknown(self, full_shift_2d):
        """Test that a cut search reports unknown with its node count"""
        tiny = SearchBudget(max_nodes=3, max_seconds=10.0, max_vertical=4)
        report = strong_period_exists(full_shift_2d, 4, tiny)
        assert report.verdict is Verdict.UNKNOWN
        assert report.stats.nodes > 0
        assert report.summary().startswith("verdict=unknown nodes=")

    def test_span_records_verdict(self, constant_2d, budget, spans):
        """Test that the decision span carries the verdict"""
        strong_period_exists(constant_2d, 2, budget)
        finished = [s for s in spans.get_finished_spans() if s.name == "strong_period_exists"]
        assert finished
        assert finished[-1].attributes["search.verdict"] == "no"

    def test_rejects_zero(self, full_shift_1d, budget):
        with pytest.raises(ValueError):
            strong_period_exists(full_shift_1d, 0, budget)


class TestCountStrong:
    """Orbit counts against closed forms"""
    @pytest.mark.parametrize("p", [1, 2, 3, 4, 5, 6])
    def test_full_shift_counts_necklaces(self, full_shift_1d, budget, p):
        """Test full shift counts against primitive necklaces"""
        assert count_strong(full_shift_1d, p, budget) == primitive_necklaces(2, p)

    @pytest.mark.parametrize("p,expected", [(1, 1), (2, 1), (3, 1), (4, 1), (5, 2), (6, 2)])
    def test_golden_mean(self, golden_mean, budget, p, expected):
        assert count_strong(golden_mean, p, budget) == expected

    @pytest.mark.parametrize("p,expected", [(1, 2), (2, 2)])
    def test_two_dimensional_full_shift(self, full_shift_2d, budget, p, expected):
        assert count_strong(full_shift_2d, p, budget) == expected

    @pytest.mark.parametrize("p", [1, 2, 3, 4])
    def test_counting_modes_agree(self, golden_mean, alternating_rows, budget, p):
        """Test lex-min counting against the inclusion-exclusion count"""
        for sft in (golden_mean, alternating_rows):
            assert count_strong(sft, p, budget) == count_strong_inclusion_exclusion(sft, p, budget)

    def test_budget_propagates(self, full_shift_2d):
        tiny = SearchBudget(max_nodes=5, max_seconds=10.0, max_vertical=4)
        with pytest.raises(BudgetExhausted):
            count_strong(full_shift_2d, 3, tiny)


class TestSearch:
    def test_threads_do_not_change_results(self, full_shift_2d):
        """Test that threaded enumeration yields the same tori in the same order"""
        sequential = SearchBudget(max_nodes=100_000, max_seconds=30.0, max_vertical=4, threads=1)
        threaded = sequential.model_copy(update={"threads": 3})
        one = list(enumerate_torus(full_shift_2d, (2, 2), sequential))
        many = list(enumerate_torus(full_shift_2d, (2, 2), threaded))
        assert one == many
        assert len(one) == 16

    def test_trivial_stabilizer(self, full_shift_2d, budget):
        tori = list(enumerate_torus(full_shift_2d, (2, 2), budget))
        assert sum(has_trivial_stabilizer(t) for t in tori) == 8

    def test_sofic_projection_of_xor_code(self, full_shift_1d, budget, spans):
        """Test that neighbour sums of cyclic words are exactly the even-weight words"""
        ab = full_shift_1d.alphabet
        code = BlockCode(((0,), (1,)), {(a, b): a ^ b for a in (0, 1) for b in (0, 1)}, ab, ab)
        images = sofic_projection(full_shift_1d, code, (4,), budget)
        assert len(images) == 8
        assert all(sum(image.flat()) % 2 == 0 for image in images)
        assert images == sorted(set(images))
        (span,) = [s for s in spans.get_finished_spans() if s.name == "sofic_projection"]
        assert span.attributes["sofic.images"] == 8

    def test_sofic_projection_identity(self, golden_mean, budget):
        """Test that the identity code keeps every torus"""
        ab = golden_mean.alphabet
        code = BlockCode(((0,),), {(0,): 0, (1,): 1}, ab, ab)
        images = sofic_projection(golden_mean, code, (5,), budget)
        assert images == sorted(enumerate_torus(golden_mean, (5,), budget))
        assert len(images) == 11

    def test_sofic_projection_in_two_dimensions(self, full_shift_2d, budget):
        """Test that horizontal neighbour sums on width-two tori are constant along rows"""
        ab = full_shift_2d.alphabet
        code = BlockCode(((0, 0), (1, 0)), {(a, b): a ^ b for a in (0, 1) for b in (0, 1)}, ab, ab)
        images = sofic_projection(full_shift_2d, code, (2, 2), budget)
        assert len(images) == 4
        assert all(image.at((0, y)) == image.at((1, y)) for image in images for y in (0, 1))


class TestRandomSpecs:
    @pytest.mark.parametrize("p", [1, 2, 3])
    def test_counting_modes_agree(self, budget, p):
        """Test both orbit counts and the existence search on seeded random specs"""
        rng = random.Random(1723)
        for index in range(20):
            sft = random_spec(rng, index)
            count = count_strong(sft, p, budget)
            assert count == count_strong_inclusion_exclusion(sft, p, budget), sft.name
            report = strong_period_exists(sft, p, budget)
            assert report.verdict is (Verdict.YES if count else Verdict.NO), sft.name
            if count:
                assert is_valid(report.witness, sft)
                assert stabilizer(report.witness) == PeriodGroup.scaled(p, 2)
