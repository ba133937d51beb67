"""
Wang tiles simulating a Turing machine, and rectangle tiling counts.

One row of tiles performs one step: the south edges of a row carry a
snapshot, the north edges the next one. A content color is either a plain
tape symbol `a` or a head `q:a`. West/east edges carry the idle signal `-` or
a head travelling sideways (`>q` to the right, `<q` to the left). A tape of
`w` cells sits between a west wall and an east wall; the rectangle is closed
by white edges on top and, under the walls, at the bottom. Cap tiles close a
column with a white north edge, and only plain symbols or halting heads can
be capped, so the top row certifies acceptance. Halting heads copy
themselves upward until the cap row.

Transition tiles carry the index of the transition they perform, so a
tiling determines the run, including which of several identical delta lines
was taken.
"""

import logging
from collections import Counter, defaultdict
from collections.abc import Sequence

from sftperiods.opentelemetry_config import get_tracer
from sftperiods.sft.model import TapeInfo, WangTile, WangTileset
from sftperiods.tm.machine import MOVES, RunWitness, TmSpec

logger = logging.getLogger(__name__)
tracer = get_tracer("sftperiods.tm")

WHITE = "~"
WEST_WALL = "Ww"
EAST_WALL = "We"
IDLE = "-"


def head_color(state: str, symbol: str) -> str:
    return f"{state}:{symbol}"


def compile_tm(tm: TmSpec) -> WangTileset:
    """Tiles as (name, north, east, south, west), emitted in a fixed order."""
    tiles: list[tuple[str, str, str, str, str]] = []
    for a in tm.tape:
        tiles.append((f"{a}@copy", a, IDLE, a, IDLE))
        tiles.append((f"{a}@cap", WHITE, IDLE, a, IDLE))
        for q in tm.states:
            tiles.append((f"{a}@in>{q}", head_color(q, a), IDLE, a, f">{q}"))
            tiles.append((f"{a}@in<{q}", head_color(q, a), f"<{q}", a, IDLE))
    for i, tr in enumerate(tm.delta):
        south = head_color(tr.state, tr.read)
        name = f"{south}@d{i}"
        if tr.move == "S":
            tiles.append((name, head_color(tr.next_state, tr.write), IDLE, south, IDLE))
        elif tr.move == "R":
            tiles.append((name, tr.write, f">{tr.next_state}", south, IDLE))
        else:
            tiles.append((name, tr.write, IDLE, south, f"<{tr.next_state}"))
    for h in sorted(tm.halting):
        for a in tm.tape:
            head = head_color(h, a)
            tiles.append((f"{head}@halt", head, IDLE, head, IDLE))
            tiles.append((f"{head}@cap", WHITE, IDLE, head, IDLE))
    tiles.append(("wall@west", WHITE, IDLE, WHITE, WEST_WALL))
    tiles.append(("wall@east", WHITE, EAST_WALL, WHITE, IDLE))
    compiled = WangTileset.from_named(tiles, tape=TapeInfo(tm.blank, tm.initial))
    logger.info(
        f"compiled tm {tm.name or ''} into {len(compiled)} tiles and {len(compiled.colors)} colors"
    )
    return compiled


def run_rows(tm: TmSpec, run: RunWitness, t: int) -> list[list[str]]:
    """
    Tile names of the rectangle that tiles an accepted run in `t` rows,
    bottom row first, walls included. Row i performs the step out of
    snapshot i; once halted the head is copied up to the cap row.
    """
    if not run.accepted:
        raise ValueError(f"only accepted runs tile a rectangle, got a {run.outcome.value} run")
    steps = len(run) - 1
    if steps >= t:
        raise ValueError(f"a run of {len(run)} snapshots does not fit in {t} rows")
    rows = []
    for snap in run.snapshots[:-1]:
        tr = tm.delta[snap.transition]
        row = [f"{a}@copy" for a in snap.tape]
        row[snap.head] = f"{head_color(snap.state, snap.tape[snap.head])}@d{snap.transition}"
        target = snap.head + MOVES[tr.move]
        if tr.move == "R":
            row[target] = f"{snap.tape[target]}@in>{tr.next_state}"
        elif tr.move == "L":
            row[target] = f"{snap.tape[target]}@in<{tr.next_state}"
        rows.append(row)
    last = run.snapshots[-1]
    head = head_color(last.state, last.tape[last.head])
    for _ in range(t - 1 - steps):
        row = [f"{a}@copy" for a in last.tape]
        row[last.head] = f"{head}@halt"
        rows.append(row)
    cap = [f"{a}@cap" for a in last.tape]
    cap[last.head] = f"{head}@cap"
    rows.append(cap)
    return [["wall@west"] + row + ["wall@east"] for row in rows]


def input_row(tiles: WangTileset, w: int, word: Sequence[str]) -> list[str]:
    """South colors of the bottom row, walls included."""
    word = list(word)
    if len(word) > w:
        raise ValueError(f"input of length {len(word)} does not fit on {w} cells")
    if tiles.tape is None:
        if word:
            raise ValueError("the tileset records no tape conventions, so the input must be empty")
        return [WHITE] * (w + 2)
    cells = word + [tiles.tape.blank] * (w - len(word))
    cells[0] = head_color(tiles.tape.initial, cells[0])
    return [WHITE] + cells + [WHITE]


def count_rectangle_tilings(tiles: WangTileset, w: int, t: int, word: Sequence[str]) -> int:
    """
    Tilings of a (w+2) x t rectangle whose bottom edges spell the input row,
    whose top edges are white and whose side edges are the two wall colors.

    Row-transfer over north-edge profiles.
    """
    if w < 1 or t < 1:
        raise ValueError(f"w and t must be positive, got w={w} t={t}")
    if not tiles.tiles:
        return 0
    bottom = input_row(tiles, w, word)
    needed = set(bottom) | {WHITE, WEST_WALL, EAST_WALL}
    if any(c not in tiles.colors for c in needed):
        return 0
    index = tiles.colors.index
    by_south_west: dict[tuple[int, int], list[WangTile]] = defaultdict(list)
    for tile in tiles.tiles:
        by_south_west[(tile.south, tile.west)].append(tile)
    west, east = index(WEST_WALL), index(EAST_WALL)

    def next_rows(profile: tuple[int, ...]) -> Counter:
        # partial rows keyed by (north colors so far, east color of the last tile)
        partial = Counter({((), west): 1})
        for south in profile:
            grown: Counter = Counter()
            for (north, edge), ways in partial.items():
                for tile in by_south_west.get((south, edge), ()):
                    grown[(north + (tile.north,), tile.east)] += ways
            partial = grown
            if not partial:
                break
        return Counter({north: ways for (north, edge), ways in partial.items() if edge == east})

    with tracer.start_as_current_span("count_rectangle_tilings") as span:
        span.set_attribute("rectangle.w", w)
        span.set_attribute("rectangle.t", t)
        profiles = Counter({tuple(index(c) for c in bottom): 1})
        for _ in range(t):
            step: Counter = Counter()
            for profile, ways in profiles.items():
                for north, count in next_rows(profile).items():
                    step[north] += ways * count
            profiles = step
        top = (index(WHITE),) * (w + 2)
        total = profiles.get(top, 0)
        span.set_attribute("rectangle.tilings", total)
        logger.debug(f"count_rectangle_tilings: w={w} t={t} -> {total}")
        return total

