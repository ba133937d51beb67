"""
Image emitters for two-dimensional torus configurations.

Symbol i is painted with PALETTE[i] while the palette lasts; later symbols
get colors spread around the hue circle by the golden angle. Both SVG and
PPM output are byte-for-byte reproducible.
"""

import colorsys
import logging
from xml.sax.saxutils import escape

import numpy as np

from sftperiods.config import config
from sftperiods.errors import DimensionMismatchError
from sftperiods.sft.model import TorusConfig

logger = logging.getLogger(__name__)

FORMATS = ("svg", "ppm")

PALETTE = (
    (255, 255, 255),
    (33, 33, 33),
    (230, 25, 75),
    (60, 180, 75),
    (0, 130, 200),
    (255, 225, 25),
    (245, 130, 48),
    (145, 30, 180),
    (70, 240, 240),
    (240, 50, 230),
    (170, 110, 40),
    (128, 128, 128),
)

_GOLDEN = 0.618033988749895


def symbol_color(index: int) -> tuple[int, int, int]:
    if index < len(PALETTE):
        return PALETTE[index]
    hue = (index * _GOLDEN) % 1.0
    r, g, b = colorsys.hsv_to_rgb(hue, 0.55, 0.9)
    return round(r * 255), round(g * 255), round(b * 255)


def _grid(torus: TorusConfig) -> np.ndarray:
    """Symbol indices as rows, top row first."""
    if torus.dim == 1:
        return torus.cells.reshape(1, -1)
    if torus.dim != 2:
        raise DimensionMismatchError(f"only one and two dimensional tori render, got {torus.dim}")
    return torus.cells.T[::-1]


def to_svg(torus: TorusConfig, cell_size: int | None = None) -> str:
    size = cell_size or int(config.get("render.cell_size", 12))
    grid = _grid(torus)
    height, width = grid.shape
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width * size}" '
        f'height="{height * size}" shape-rendering="crispEdges">'
    ]
    for row in range(height):
        for col in range(width):
            symbol = int(grid[row, col])
            r, g, b = symbol_color(symbol)
            out.append(
                f'<rect x="{col * size}" y="{row * size}" width="{size}" height="{size}" '
                f'fill="#{r:02x}{g:02x}{b:02x}"><title>{escape(torus.alphabet[symbol])}</title></rect>'
            )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def to_ppm(torus: TorusConfig, cell_size: int | None = None) -> bytes:
    """Binary P6 image, maxval 255."""
    size = cell_size or int(config.get("render.cell_size", 12))
    grid = _grid(torus)
    colors = np.array([symbol_color(i) for i in range(len(torus.alphabet))], dtype=np.uint8)
    pixels = colors[grid].repeat(size, axis=0).repeat(size, axis=1)
    height, width = pixels.shape[:2]
    header = f"P6\n{width} {height}\n255\n".encode("ascii")
    return header + pixels.tobytes()


def render(torus: TorusConfig, fmt: str, cell_size: int | None = None) -> bytes:
    if fmt not in FORMATS:
        raise ValueError(f"unknown image format {fmt!r}, expected one of {FORMATS}")
    logger.debug(f"render: {fmt} of a {torus.dims} torus")
    if fmt == "svg":
        return to_svg(torus, cell_size).encode("utf-8")
    return to_ppm(torus, cell_size)
