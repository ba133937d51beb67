"""
Tests for the Turing machine to Wang tile compiler
"""

import pytest

from sftperiods.sft.model import WangTileset
from sftperiods.sft.textio import parse_wang, wang_to_text
from sftperiods.tm.compiler import (
    EAST_WALL,
    WEST_WALL,
    WHITE,
    compile_tm,
    count_rectangle_tilings,
    input_row,
    run_rows,
)
from sftperiods.tm.machine import count_accepting, parse_tm, run_bounded

from .conftest import LOOP


class TestCompile:
    def test_tile_count(self, even_tm):
        """|tape|(2 + 2|states|) + |delta| + 2|halting||tape| + 2."""
        tiles = compile_tm(even_tm)
        assert len(tiles) == 25
        assert {"1@copy", "B@cap", "1@in>o", "e:1@d0", "acc:B@halt", "wall@west"} <= set(tiles.names)

    def test_transition_tiles(self, even_tm):
        """Test the edges of moving and staying transition tiles"""
        tiles = compile_tm(even_tm)
        right = next(t for t in tiles.tiles if t.name == "e:1@d0")
        assert tiles.edge_tokens(right) == ("1", ">o", "e:1", "-")
        stay = next(t for t in tiles.tiles if t.name == "e:B@d2")
        assert tiles.edge_tokens(stay) == ("acc:B", "-", "e:B", "-")

    def test_text_round_trip(self, even_tm):
        tiles = compile_tm(even_tm)
        again = parse_wang(wang_to_text(tiles))
        assert sorted(again.names) == sorted(tiles.names)
        assert again.tape == tiles.tape
        edges = {t.name: tiles.edge_tokens(t) for t in tiles.tiles}
        assert all(again.edge_tokens(t) == edges[t.name] for t in again.tiles)


class TestInputRow:
    def test_walls_and_head(self, even_tm):
        assert input_row(compile_tm(even_tm), 3, ["1"]) == ["~", "e:1", "B", "B", "~"]
        assert input_row(compile_tm(even_tm), 2, []) == ["~", "e:B", "B", "~"]

    def test_rejects(self, even_tm):
        with pytest.raises(ValueError):
            input_row(compile_tm(even_tm), 1, ["1", "1"])
        bare = WangTileset.from_named([("t", "x", "x", "x", "x")])
        assert input_row(bare, 2, []) == ["~"] * 4
        with pytest.raises(ValueError):
            input_row(bare, 2, ["x"])


class TestTilingsCountRuns:
    """Rectangle tilings against accepted runs"""
    def test_runs_and_tilings_agree(self, any_tm):
        """Test that tilings and accepting runs agree on small rectangles"""
        tiles = compile_tm(any_tm)
        symbol = any_tm.input[0]
        for w in range(1, 5):
            for t in range(1, 7):
                for n in range(w + 1):
                    word = [symbol] * n
                    assert count_rectangle_tilings(tiles, w, t, word) == count_accepting(any_tm, word, t, w), (
                        w,
                        t,
                        n,
                    )

    def test_known_counts(self, even_tm):
        tiles = compile_tm(even_tm)
        assert count_rectangle_tilings(tiles, 3, 10, ["1", "1"]) == 1
        assert count_rectangle_tilings(tiles, 2, 10, ["1"]) == 0

    def test_three_accepting_branches(self):
        """Test a machine that may idle once or twice before accepting"""
        loop = parse_tm(LOOP)
        assert count_accepting(loop, ["1"], 4, 1) == 3
        assert count_rectangle_tilings(compile_tm(loop), 1, 4, ["1"]) == 3

    @pytest.mark.parametrize("t", [2, 3, 5, 6])
    def test_one_branch_per_idle_count(self, t):
        loop = compile_tm(parse_tm(LOOP))
        assert count_rectangle_tilings(loop, 1, t, ["1"]) == t - 1

    def test_tileset_without_walls(self):
        """Test that a tileset lacking wall colors tiles nothing"""
        bare = WangTileset.from_named([("t", "x", "x", "x", "x")])
        assert count_rectangle_tilings(bare, 2, 2, []) == 0

    def test_positive_bounds(self, even_tm):
        with pytest.raises(ValueError):
            count_rectangle_tilings(compile_tm(even_tm), 0, 1, [])


def edges_of(tiles, rows):
    named = {t.name: tiles.edge_tokens(t) for t in tiles.tiles}
    return [[named[name] for name in row] for row in rows]


class TestRunRows:
    """Rectangles built from accepted runs"""
    def test_every_accepted_run_tiles(self, any_tm):
        """Test that each accepted run gives a rectangle with matching edges"""
        tiles = compile_tm(any_tm)
        symbol = any_tm.input[0]
        for w, t, n in [(1, 4, 1), (2, 5, 1), (3, 6, 2)]:
            word = [symbol] * n
            for run in run_bounded(any_tm, word, t, w):
                if not run.accepted:
                    continue
                rows = edges_of(tiles, run_rows(any_tm, run, t))
                assert len(rows) == t and all(len(row) == w + 2 for row in rows)
                assert [south for _, _, south, _ in rows[0]] == input_row(tiles, w, word)
                assert all(north == WHITE for north, _, _, _ in rows[-1])
                for row in rows:
                    assert row[0][3] == WEST_WALL and row[-1][1] == EAST_WALL
                    assert all(left[1] == right[3] for left, right in zip(row, row[1:], strict=False))
                for below, above in zip(rows, rows[1:], strict=False):
                    assert all(b[0] == a[2] for b, a in zip(below, above, strict=True))

    def test_known_rows(self, even_tm):
        run = next(r for r in run_bounded(even_tm, ["1", "1"], 4, 3) if r.accepted)
        assert run_rows(even_tm, run, 4) == [
            ["wall@west", "e:1@d0", "1@in>o", "B@copy", "wall@east"],
            ["wall@west", "1@copy", "o:1@d1", "B@in>e", "wall@east"],
            ["wall@west", "1@copy", "1@copy", "e:B@d2", "wall@east"],
            ["wall@west", "1@cap", "1@cap", "acc:B@cap", "wall@east"],
        ]

    def test_rejects(self, even_tm):
        runs = run_bounded(even_tm, ["1"], 6, 2)
        with pytest.raises(ValueError):
            run_rows(even_tm, runs[0], 6)
        accepted = next(r for r in run_bounded(even_tm, ["1", "1"], 4, 3) if r.accepted)
        with pytest.raises(ValueError):
            run_rows(even_tm, accepted, 3)
