"""
Robinson's cross and arm tiles, the diagonal layer that makes them
NW-deterministic, and an East-deterministic base obtained by a shear.

Every edge carries one arrow crossing its midpoint and, on some edges, a side
line running next to the arrow. An edge color is the arrow direction followed
by the side the line is offset to (`-` without a line), so two tiles match
when their arrows point the same way and their side lines coincide.

A cross sends arrows out on all four sides and faces one quadrant: facing NE
its east arrow has a line offset north and its north arrow a line offset
east. An arm carries a main arrow straight through the tile and receives
arrows on its two other sides. The main arrow is single (`o`) or doubled by a
line on its left (`dl`) or right (`dr`); the received arrows are both single
(`o`) or both doubled (`d`) by a line on the side the main arrow comes from.
With rotations this gives 4 crosses and 24 arms.

Parity pins the crosses: a tile at parity class (px, py) has px on its east
edge, 1 - px on its west edge, py on its north edge and 1 - py on its south
edge. Class (1, 1) holds crosses, (1, 0) arms with a horizontal main arrow,
(0, 1) arms with a vertical one, and (0, 0) any of the 28 tiles.
"""

import itertools
import logging

from sftperiods.sft.model import SftSpec, WangTileset
from sftperiods.sft.ops import shear, wang_to_sft

logger = logging.getLogger(__name__)

SIDES = ("n", "e", "s", "w")
OPPOSITE = {"n": "s", "s": "n", "e": "w", "w": "e"}
LEFT = {"n": "w", "e": "n", "s": "e", "w": "s"}
RIGHT = {side: OPPOSITE[left] for side, left in LEFT.items()}
NO_LINE = "-"

CROSS = "cross"
# (main arrow lines, received arrow lines) per arm type.
ARM_TYPES = {
    "armoo": ("o", "o"),
    "armod": ("o", "d"),
    "armdlo": ("dl", "o"),
    "armdld": ("dl", "d"),
    "armdro": ("dr", "o"),
    "armdrd": ("dr", "d"),
}

# Corner values of the diagonal layer.
HOR, VER = "H", "V"


def rotate(side: str) -> str:
    """Quarter turn counterclockwise."""
    return LEFT[side]


def cross_edges(vertical: str, horizontal: str) -> dict[str, str]:
    """Edge colors of the cross facing the quadrant (vertical, horizontal), e.g. ("n", "e")."""
    edges = {}
    for side in SIDES:
        line = vertical if side == horizontal else horizontal if side == vertical else NO_LINE
        edges[side] = f"{side}{line}"
    return edges


def arm_edges(kind: str, main: str) -> dict[str, str]:
    """Edge colors of an arm whose main arrow points towards `main`."""
    through, received = ARM_TYPES[kind]
    line = {"o": NO_LINE, "dl": LEFT[main], "dr": RIGHT[main]}[through]
    edges = {main: f"{main}{line}", OPPOSITE[main]: f"{main}{line}"}
    for side in (LEFT[main], RIGHT[main]):
        edges[side] = f"{OPPOSITE[side]}{OPPOSITE[main] if received == 'd' else NO_LINE}"
    return edges


def prototiles() -> dict[str, dict[str, str]]:
    """The 28 tiles up to parity, keyed by name (`cross.ne`, `armdlo.w`, ...)."""
    tiles = {}
    for vertical, horizontal in itertools.product("ns", "ew"):
        tiles[f"{CROSS}.{vertical}{horizontal}"] = cross_edges(vertical, horizontal)
    for kind in ARM_TYPES:
        for main in SIDES:
            tiles[f"{kind}.{main}"] = arm_edges(kind, main)
    return tiles


def is_cross(name: str) -> bool:
    return name.startswith(f"{CROSS}.")


def main_axis(name: str) -> str | None:
    """Axis of the main arrow of an arm, "h" or "v"; None for a cross."""
    if is_cross(name):
        return None
    return "h" if name.split(".")[1] in "ew" else "v"


def _fits(name: str, px: int, py: int) -> bool:
    if (px, py) == (1, 1):
        return is_cross(name)
    if (px, py) == (1, 0):
        return main_axis(name) == "h"
    if (px, py) == (0, 1):
        return main_axis(name) == "v"
    return True


def robinson(parity: bool = True) -> WangTileset:
    """
    The 56 tiles with parity, named `<prototile>.<px><py>`; with
    parity=False the 28 prototiles alone.
    """
    tiles = []
    for name, edges in prototiles().items():
        if not parity:
            tiles.append((name, edges["n"], edges["e"], edges["s"], edges["w"]))
            continue
        for px, py in itertools.product((0, 1), repeat=2):
            if _fits(name, px, py):
                bits = {"n": py, "s": 1 - py, "e": px, "w": 1 - px}
                colors = {side: f"{edges[side]}{bits[side]}" for side in SIDES}
                tiles.append(
                    (f"{name}.{px}{py}", colors["n"], colors["e"], colors["s"], colors["w"])
                )
    return WangTileset.from_named(tiles)


def _diagonals(name: str) -> list[tuple[str, str]]:
    """Allowed (NW, SE) values of the diagonal arrow crossing the tile."""
    axis = main_axis(name)
    if axis is None:
        return [(HOR, HOR), (VER, VER)]
    if axis == "h":
        return [(HOR, VER)]
    return [(VER, HOR)]


def kari_nw() -> WangTileset:
    """
    The 56 parity tiles with a diagonal arrow from the NW corner to the SE
    corner, labelled by its two ends: horizontal arms carry (H, V), vertical
    arms (V, H) and crosses (H, H) or (V, V). The arrow ending at the SE
    corner of a tile must start at the NW corner of its lower right neighbour.

    Tiles also record the value at their NE corner, which they pass to the
    right through the east edge and up through the north edge. The lower
    neighbour relays it from its north edge to the next tile's west edge, so
    all 128 tiles stay Wang tiles: north (n, NE), east (e, NE), south (s, SE),
    west (w, NW). The west and north colors then fix the tile.
    """
    base = robinson()
    tiles = []
    for tile in base.tiles:
        prototile = tile.name.rsplit(".", 1)[0]
        n, e, s, w = base.edge_tokens(tile)
        for (nw, se), ne in itertools.product(_diagonals(prototile), (HOR, VER)):
            tiles.append(
                (f"{tile.name}.{nw}{se}{ne}", f"{n}/{ne}", f"{e}/{ne}", f"{s}/{se}", f"{w}/{nw}")
            )
    logger.debug(f"kari_nw: {len(tiles)} tiles from {len(base)} parity tiles")
    return WangTileset.from_named(tiles)


def east_deterministic_base() -> SftSpec:
    """
    kari_nw sheared by (x, y) -> (x - y, y): the west/north pair of a cell
    becomes the pair below and below-right of it, so NW determinism turns
    into East determinism. n x n tori correspond one to one.
    """
    return shear(wang_to_sft(kari_nw()), 1)
