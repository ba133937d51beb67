"""
An SFT whose horizontal periods encode the language of a unary machine.

The y_k skeleton cuts the plane into rectangles p cells wide and k^(p-1)
rows high. A fourth layer M runs the compiled machine inside each rectangle:
the breaker column carries a bar tile, the marked row seeds the tape with
1^n followed by one blank, and the rows above compute until cap tiles close
the rectangle in a halting state. With the breaker and the two walls the
width is p = n + 4, so n is accepted within k^(p-1) - 1 steps on n + 1
cells iff p can be a horizontal period.

A fifth layer N labels every row with the transition its machine tiles
perform. The label is constant along the whole row, so all rectangles of a
row take the same nondeterministic choices and compute the same run.
"""

import logging
import re

from sftperiods.constructions.layers import (
    BREAKER,
    MARKED,
    LayerBundle,
    counter_symbols,
    skeleton_cells,
    y_k,
)
from sftperiods.errors import UnsupportedSftError
from sftperiods.opentelemetry_config import get_tracer
from sftperiods.sft.model import Alphabet, ShapeRule, SftSpec, TorusConfig, WangTileset
from sftperiods.sft.ops import EAST, wang_to_sft
from sftperiods.tm.compiler import (
    EAST_WALL,
    WEST_WALL,
    WHITE,
    compile_tm,
    head_color,
    run_rows,
)
from sftperiods.tm.machine import RunWitness, TmSpec, accepting_run, reachable_heads

logger = logging.getLogger(__name__)
tracer = get_tracer("sftperiods.tm")

UNARY = ("1",)
BAR = "bar"
SEED_PREFIX = "seed@"
PICK_NONE = "pick.none"
# Breaker plus the two walls.
PERIOD_OFFSET = 3
# Inputs 1^n with n below this are run to check that n + 1 cells suffice.
SPACE_CHECK_INPUTS = 4

_TRANSITION = re.compile(r"@d(\d+)$")


def period_for_input(n: int) -> int:
    """Width of the rectangle running the machine on 1^n: n + 1 cells, walls and the breaker."""
    return n + 1 + PERIOD_OFFSET


def computation_time(k: int, n: int) -> int:
    """Rows a rectangle of width period_for_input(n) leaves for the run, seed row excluded."""
    return k ** (period_for_input(n) - 1) - 1


def _check_unary(tm: TmSpec):
    if tuple(tm.input) != UNARY:
        raise UnsupportedSftError(
            f"machines reading 1^n only are supported, input alphabet is {list(tm.input)}"
        )


def check_space_exact(tm: TmSpec, k: int, inputs: int = SPACE_CHECK_INPUTS):
    """
    Reject a machine that leaves the n + 1 cells of its rectangle: given one
    more cell, no run on 1^n within computation_time(k, n) steps may reach it.
    Checked for n < `inputs`.
    """
    _check_unary(tm)
    for n in range(inputs):
        reached = reachable_heads(tm, ["1"] * n, computation_time(k, n), n + 2)
        if n + 1 in reached:
            raise UnsupportedSftError(
                f"machine {tm.name or 'tm'} is not space-exact: on 1^{n} it reaches cell {n + 1}"
            )


def machine_layer(tm: TmSpec) -> WangTileset:
    """Compiled tiles, the bar tile and the seed row tiles writing q0:1 1 ... 1 B."""
    _check_unary(tm)
    compiled = compile_tm(tm)
    tiles = [(t.name, *compiled.edge_tokens(t)) for t in compiled.tiles]
    q0, blank = tm.initial, tm.blank
    tiles += [
        (BAR, f"~{BAR}", WEST_WALL, f"~{BAR}", EAST_WALL),
        (f"{SEED_PREFIX}wall.west", WHITE, "s0", WHITE, WEST_WALL),
        (f"{SEED_PREFIX}head.1", head_color(q0, "1"), "s1", WHITE, "s0"),
        (f"{SEED_PREFIX}head.blank", head_color(q0, blank), "sE", WHITE, "s0"),
        (f"{SEED_PREFIX}one", "1", "s1", WHITE, "s1"),
        (f"{SEED_PREFIX}blank", blank, "sE", WHITE, "s1"),
        (f"{SEED_PREFIX}wall.east", WHITE, EAST_WALL, WHITE, "sE"),
    ]
    return WangTileset.from_named(tiles, tape=compiled.tape)


def pick(index: int | None) -> str:
    return PICK_NONE if index is None else f"pick.d{index}"


def choice_layer(tm: TmSpec) -> SftSpec:
    """One label per row, equal on horizontal neighbours: a transition index or none."""
    tokens = [pick(None)] + [pick(i) for i in range(len(tm.delta))]
    size = len(tokens)
    differ = {(a, b) for a in range(size) for b in range(size) if a != b}
    rules = [ShapeRule(((0, 0), EAST), differ, size)] if differ else []
    return SftSpec(2, Alphabet(tokens), rules=rules, name=f"choice({tm.name or 'tm'})")


def choice_labels(tile: str, transitions: int) -> list[str]:
    """
    Row labels a machine tile may sit under. Transition tiles need their own
    index; seed, halt and cap rows perform no transition; the rest take any.
    """
    match = _TRANSITION.search(tile)
    if match is not None:
        return [pick(int(match.group(1)))]
    if tile.startswith(SEED_PREFIX) or tile.endswith(("@halt", "@cap")):
        return [pick(None)]
    return [pick(None)] + [pick(i) for i in range(transitions)]


def tm_period_bundle(tm: TmSpec, k: int, base: SftSpec | None = None) -> LayerBundle:
    """
    y_k plus the machine layer M and the choice layer N. Breaker cells carry
    the bar; seed tiles sit exactly on marked rows and every other machine
    tile on unmarked rows.
    """
    _check_unary(tm)
    if k < 2:
        raise ValueError(f"k must be at least 2, got {k}")
    check_space_exact(tm, k)
    skeleton = y_k(k, base)
    a_layer, c_layer, t_layer = skeleton.layers
    tiles = machine_layer(tm)
    m_layer = wang_to_sft(tiles)
    n_layer = choice_layer(tm)
    brk = a_layer.symbol(BREAKER)
    bar = m_layer.symbol(BAR)
    marks = {c_layer.symbol(s.token): s.mark for s in counter_symbols(k)}
    labels = {
        m_layer.symbol(t.name): [n_layer.symbol(x) for x in choice_labels(t.name, len(tm.delta))]
        for t in tiles.tiles
    }
    seeds = [m_layer.symbol(t.name) for t in tiles.tiles if t.name.startswith(SEED_PREFIX)]
    others = [
        m_layer.symbol(t.name)
        for t in tiles.tiles
        if t.name != BAR and not t.name.startswith(SEED_PREFIX)
    ]
    allowed = []
    for a, c, t in skeleton.allowed:
        if a == brk:
            allowed.extend((a, c, t, bar, x) for x in labels[bar])
            continue
        for m in seeds if marks[c] == MARKED else others:
            allowed.extend((a, c, t, m, x) for x in labels[m])
    logger.info(f"tm_period_bundle: {len(tiles)} machine tiles, {len(allowed)} superimposed symbols")
    return LayerBundle(
        (a_layer, c_layer, t_layer, m_layer, n_layer), tuple(allowed), skeleton.names + ("M", "N")
    )


def tm_period_sft(tm: TmSpec, k: int, base: SftSpec | None = None) -> SftSpec:
    """
    Horizontal period n + 4 is realizable iff the machine accepts 1^n within
    computation_time(k, n) steps on n + 1 cells. A base with periodic points
    of its own adds the periods of its breaker-free configurations.
    """
    with tracer.start_as_current_span("tm_period_sft") as span:
        span.set_attribute("counter.k", k)
        bundle = tm_period_bundle(tm, k, base)
        sft = bundle.sft(f"tm_period({tm.name or 'tm'},{k})")
        span.set_attribute("sft.symbols", len(sft.alphabet))
        return sft


def period_witness(
    bundle: LayerBundle,
    tm: TmSpec,
    k: int,
    n: int,
    background: TorusConfig,
    run: RunWitness | None = None,
) -> TorusConfig | None:
    """
    A torus of `bundle` (from tm_period_bundle) one rectangle wide, running
    `run` or else the first accepted run on 1^n; None when 1^n is not
    accepted in time. `background` fills the white cells as in skeleton_cells.
    """
    p = period_for_input(n)
    rows = computation_time(k, n)
    if run is None:
        run = accepting_run(tm, ["1"] * n, rows, n + 1)
    if run is None:
        return None
    tape = ["head.1"] + ["one"] * (n - 1) + ["blank"] if n else ["head.blank"]
    seed = [f"{SEED_PREFIX}{name}" for name in ["wall.west", *tape, "wall.east"]]
    machine = [[BAR] + seed] + [[BAR] + row for row in run_rows(tm, run, rows)]
    choices = [pick(None)] + [pick(i) for i in run.choices]
    choices += [pick(None)] * (len(machine) - len(choices))
    skeleton = skeleton_cells(k, p, background)
    cells = [
        [skeleton[x][y] + (machine[y][x], choices[y]) for y in range(len(machine))]
        for x in range(p)
    ]
    logger.info(f"period_witness: {p} x {len(machine)} torus, run of {len(run)} snapshots")
    return bundle.assemble(cells)
