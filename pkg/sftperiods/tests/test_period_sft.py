"""
Tests for the machine period SFT
"""

import numpy as np
import pytest

from sftperiods.constructions.layers import BREAKER, MARKED, counter_symbols, y_k
from sftperiods.errors import UnsupportedSftError
from sftperiods.periods.budget import SearchBudget, Verdict
from sftperiods.periods.horizontal import horizontal_period, least_horizontal_period
from sftperiods.sft.model import Alphabet, SftSpec, TorusConfig
from sftperiods.sft.validity import is_locally_valid, is_valid
from sftperiods.tm.compiler import compile_tm
from sftperiods.tm.machine import parse_tm, run_bounded
from sftperiods.tm.period_sft import (
    BAR,
    PICK_NONE,
    SEED_PREFIX,
    check_space_exact,
    choice_labels,
    choice_layer,
    computation_time,
    machine_layer,
    period_for_input,
    period_witness,
    tm_period_bundle,
    tm_period_sft,
)

from .conftest import GUESS, LOOP, pairs

ONLY_ONE = """%tm
name: only1
states: q0 q1 acc
tape: 1 B
blank: B
input: 1
initial: q0
halting: acc
delta: q0 1 -> q1 1 R
delta: q1 B -> acc B S
"""

NOTHING = """%tm
name: nothing
states: q0 acc
tape: 1 B
blank: B
input: 1
initial: q0
halting: acc
delta: q0 1 -> q0 1 S
"""

# Walks right forever, one cell past the input and beyond.
RUNAWAY = """%tm
name: runaway
states: q acc
tape: 1 B
blank: B
input: 1
initial: q
halting: acc
delta: q 1 -> q 1 R
delta: q B -> q B R
"""


@pytest.fixture
def columns_2d():
    """Horizontal neighbours differ and vertical ones agree: columns abab..., so even periods only."""
    ab = Alphabet(["a", "b"])
    return SftSpec(
        2,
        ab,
        pairs(ab, (1, 0), [("a", "a"), ("b", "b")]) + pairs(ab, (0, 1), [("a", "b"), ("b", "a")]),
        name="columns",
    )


def background(width):
    ab = Alphabet(["a", "b"])
    return TorusConfig.from_rows(ab, [["ab"[x % 2] for x in range(width)]])


def test_rectangle_sizes():
    assert period_for_input(0) == 4
    assert period_for_input(3) == 7
    assert computation_time(2, 0) == 7
    assert computation_time(3, 1) == 3**4 - 1


class TestMachineLayer:
    def test_extra_tiles(self, even_tm):
        tiles = machine_layer(even_tm)
        assert len(tiles) == len(compile_tm(even_tm)) + 7
        assert BAR in tiles.names
        assert sum(name.startswith(SEED_PREFIX) for name in tiles.names) == 6

    def test_seed_row_spells_the_input(self, even_tm):
        """Test that seed tiles write the head and the trailing blank"""
        tiles = machine_layer(even_tm)
        seeds = {t.name: tiles.edge_tokens(t) for t in tiles.tiles if t.name.startswith(SEED_PREFIX)}
        assert seeds["seed@head.1"] == ("e:1", "s1", "~", "s0")
        assert seeds["seed@blank"] == ("B", "sE", "~", "s1")

    def test_unary_input_only(self):
        with pytest.raises(UnsupportedSftError):
            machine_layer(parse_tm(GUESS))


class TestSpaceExact:
    def test_machines_staying_inside(self, even_tm):
        check_space_exact(even_tm, 2)
        check_space_exact(parse_tm(LOOP), 3)
        check_space_exact(parse_tm(ONLY_ONE), 2)

    def test_runaway_is_rejected(self, full_shift_2d):
        runaway = parse_tm(RUNAWAY)
        with pytest.raises(UnsupportedSftError, match="space-exact"):
            check_space_exact(runaway, 2)
        with pytest.raises(UnsupportedSftError):
            tm_period_bundle(runaway, 2, full_shift_2d)


class TestChoiceLayer:
    @pytest.mark.parametrize(
        "tile,expected",
        [
            ("e:1@d0", ["pick.d0"]),
            ("e:B@d2", ["pick.d2"]),
            ("seed@one", [PICK_NONE]),
            ("acc:B@halt", [PICK_NONE]),
            ("1@cap", [PICK_NONE]),
            ("1@copy", [PICK_NONE, "pick.d0", "pick.d1", "pick.d2"]),
            (BAR, [PICK_NONE, "pick.d0", "pick.d1", "pick.d2"]),
        ],
    )
    def test_labels(self, tile, expected):
        assert choice_labels(tile, 3) == expected

    def test_rows_share_one_label(self, even_tm):
        sft = choice_layer(even_tm)
        ab = sft.alphabet
        assert list(ab) == [PICK_NONE, "pick.d0", "pick.d1", "pick.d2"]
        assert is_valid(TorusConfig.from_rows(ab, [["pick.d1", "pick.d1"], [PICK_NONE, PICK_NONE]]), sft)
        assert not is_valid(TorusConfig.from_rows(ab, [["pick.d1", "pick.d0"]]), sft)


class TestBundle:
    def test_layers_are_tied(self, even_tm, full_shift_2d):
        """Test that bars sit on breakers, seeds on marked rows and transitions under their label"""
        bundle = tm_period_bundle(even_tm, 2, full_shift_2d)
        assert bundle.names == ("A", "C", "T", "M", "N")
        a_layer, c_layer, _, m_layer, n_layer = bundle.layers
        brk = a_layer.symbol(BREAKER)
        bar = m_layer.symbol(BAR)
        marked = {c_layer.symbol(s.token) for s in counter_symbols(2) if s.mark == MARKED}
        for a, c, _, m, x in bundle.allowed:
            name = m_layer.alphabet[m]
            if a == brk:
                assert m == bar
            elif c in marked:
                assert name.startswith(SEED_PREFIX)
                assert n_layer.alphabet[x] == PICK_NONE
            else:
                assert m != bar and not name.startswith(SEED_PREFIX)
            if "@d" in name:
                assert n_layer.alphabet[x] == f"pick.{name.rsplit('@', 1)[1]}"

    def test_size(self, even_tm, full_shift_2d):
        """Test the number of superimposed symbols"""
        skeleton = y_k(2, full_shift_2d)
        bundle = tm_period_bundle(even_tm, 2, full_shift_2d)
        a_layer, c_layer, _ = skeleton.layers
        brk = a_layer.symbol(BREAKER)
        marked = {c_layer.symbol(s.token) for s in counter_symbols(2) if s.mark == MARKED}
        on_breakers = sum(a == brk for a, _, _ in skeleton.allowed)
        seeded = sum(a != brk and c in marked for a, c, _ in skeleton.allowed)
        plain = len(skeleton.allowed) - on_breakers - seeded
        # 3 transitions and 6 halt or cap tiles take one label, the other 16 tiles any of 4.
        assert len(compile_tm(even_tm)) == 25
        assert len(bundle.allowed) == 4 * on_breakers + 6 * seeded + (3 + 6 + 4 * 16) * plain

    def test_flattened_sft(self, even_tm, full_shift_2d):
        sft = tm_period_sft(even_tm, 2, full_shift_2d)
        assert sft.dim == 2
        assert len(sft.alphabet) == len(tm_period_bundle(even_tm, 2, full_shift_2d).allowed)

    def test_rejects(self, even_tm, full_shift_2d):
        with pytest.raises(ValueError):
            tm_period_bundle(even_tm, 1, full_shift_2d)
        with pytest.raises(UnsupportedSftError):
            tm_period_bundle(parse_tm(GUESS), 2, full_shift_2d)


class TestWitness:
    def test_accepting_one(self, columns_2d):
        """Test that a machine accepting 1 yields a torus of least horizontal period 5"""
        tm = parse_tm(ONLY_ONE)
        bundle = tm_period_bundle(tm, 2, columns_2d)
        torus = period_witness(bundle, tm, 2, 1, background(4))
        assert torus.dims == (5, 16)
        assert is_valid(torus, bundle.sft())
        assert least_horizontal_period(torus) == 5
        labels = bundle.project(torus, "N")
        assert [labels.token_at((0, y)) for y in range(4)] == [PICK_NONE, "pick.d0", "pick.d1", PICK_NONE]

    def test_empty_input(self, even_tm, columns_2d):
        bundle = tm_period_bundle(even_tm, 2, columns_2d)
        torus = period_witness(bundle, even_tm, 2, 0, background(3))
        assert torus.dims == (4, 8)
        assert is_valid(torus, bundle.sft())

    def test_no_witness_without_acceptance(self, columns_2d):
        tm = parse_tm(NOTHING)
        bundle = tm_period_bundle(tm, 2, columns_2d)
        assert period_witness(bundle, tm, 2, 1, background(4)) is None

    def test_background_must_fit(self, columns_2d):
        tm = parse_tm(ONLY_ONE)
        bundle = tm_period_bundle(tm, 2, columns_2d)
        with pytest.raises(ValueError):
            period_witness(bundle, tm, 2, 1, background(3))


class TestSynchronization:
    """Rectangles side by side must take the same nondeterministic branch"""
    @pytest.fixture
    def loop_runs(self):
        tm = parse_tm(LOOP)
        runs = [r for r in run_bounded(tm, ["1"], computation_time(2, 1), 2) if r.accepted]
        return tm, runs

    def test_each_branch_alone(self, loop_runs, columns_2d):
        tm, runs = loop_runs
        assert len(runs) == 14
        bundle = tm_period_bundle(tm, 2, columns_2d)
        sft = bundle.sft()
        for run in runs[:3]:
            assert is_valid(period_witness(bundle, tm, 2, 1, background(4), run=run), sft)

    def test_different_branches_side_by_side(self, loop_runs, columns_2d):
        tm, runs = loop_runs
        bundle = tm_period_bundle(tm, 2, columns_2d)
        sft = bundle.sft()
        first = period_witness(bundle, tm, 2, 1, background(4), run=runs[0])
        second = period_witness(bundle, tm, 2, 1, background(4), run=runs[1])
        same = TorusConfig(sft.alphabet, np.concatenate([first.cells, first.cells]))
        assert is_valid(same, sft)
        mixed = TorusConfig(sft.alphabet, np.concatenate([first.cells, second.cells]))
        violations = is_locally_valid(mixed, sft)
        assert violations
        assert least_horizontal_period(same) == 5


@pytest.mark.slow
class TestHorizontalPeriodSearch:
    @pytest.fixture
    def big_budget(self):
        return SearchBudget(max_nodes=500_000_000, max_seconds=3600.0, max_vertical=64, threads=1)

    def test_accepted_input_gives_period(self, columns_2d, big_budget):
        sft = tm_period_sft(parse_tm(ONLY_ONE), 2, columns_2d)
        report = horizontal_period(sft, 5, big_budget, method="graph")
        assert report.verdict is Verdict.YES
        assert is_valid(report.witness, sft)

    def test_empty_language_gives_no_period(self, columns_2d, big_budget):
        sft = tm_period_sft(parse_tm(NOTHING), 2, columns_2d)
        report = horizontal_period(sft, 5, big_budget, method="graph")
        assert report.verdict is Verdict.NO
