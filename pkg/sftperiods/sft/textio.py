"""
Line-oriented text formats.

Each file starts with a header line (`%sft`, `%wang`, `%bundle`, `%torus` or
`%pattern`), followed by `key: value` directives. Lines starting with `#` and blank lines
are ignored. Errors carry the 1-based line number of the offending line.
"""

import logging
import re
from collections.abc import Iterator
from pathlib import Path

import numpy as np

from sftperiods.errors import SftError, SpecParseError
from sftperiods.sft.model import (
    Alphabet,
    LayerProduct,
    Pattern,
    SftSpec,
    TapeInfo,
    TorusConfig,
    WangTileset,
)
from sftperiods.sft.ops import wang_to_sft

logger = logging.getLogger(__name__)

_CELL = re.compile(r"^\((-?\d+(?:\s*,\s*-?\d+)*)\)\s*=\s*(\S+)$")
_EDGE = re.compile(r"^([nesw])=(\S+)$")

Line = tuple[int, str]


def content_lines(text: str, first_line: int = 1) -> list[Line]:
    out = []
    for number, raw in enumerate(text.splitlines(), start=first_line):
        line = raw.strip()
        if line and not line.startswith("#"):
            out.append((number, line))
    return out


def directive(line: str) -> tuple[str, str] | None:
    key, sep, value = line.partition(":")
    if not sep or " " in key:
        return None
    return key.strip(), value.strip()


class LineParser:
    def __init__(self, lines: list[Line], path: str | None, header: str):
        self.lines = lines
        self.path = path
        self.pos = 0
        if not lines:
            raise SpecParseError(f"empty input, expected {header}", None, path)
        number, line = lines[0]
        if line != header:
            raise SpecParseError(f"expected header {header}, got {line!r}", number, path)
        self.pos = 1

    def error(self, message: str, number: int | None = None) -> SpecParseError:
        return SpecParseError(message, number, self.path)

    def peek(self) -> Line | None:
        return self.lines[self.pos] if self.pos < len(self.lines) else None

    def next(self) -> Line:
        item = self.lines[self.pos]
        self.pos += 1
        return item

    def expect(self, key: str) -> tuple[int, str]:
        item = self.peek()
        if item is None:
            raise self.error(f"missing directive {key}:")
        number, line = self.next()
        parsed = directive(line)
        if parsed is None or parsed[0] != key:
            raise self.error(f"expected {key}:, got {line!r}", number)
        return number, parsed[1]

    def integer(self, number: int, value: str, what: str) -> int:
        try:
            return int(value)
        except ValueError:
            raise self.error(f"{what} must be an integer, got {value!r}", number) from None

    def alphabet(self, number: int, value: str) -> Alphabet:
        try:
            return Alphabet(value.split())
        except ValueError as e:
            raise self.error(str(e), number) from None


def _read_sft(parser: LineParser) -> SftSpec:
    number, value = parser.expect("dim")
    dim = parser.integer(number, value, "dim")
    if dim < 1:
        raise parser.error(f"dim must be positive, got {dim}", number)
    name = None
    item = parser.peek()
    if item is not None and item[1].startswith("name:"):
        name = parser.next()[1].partition(":")[2].strip() or None
    number, value = parser.expect("alphabet")
    alphabet = parser.alphabet(number, value)

    patterns = []
    while parser.peek() is not None:
        number, line = parser.peek()
        if line != "forbid:":
            break
        parser.next()
        cells = []
        while parser.peek() is not None:
            cell_number, cell_line = parser.peek()
            match = _CELL.match(cell_line)
            if match is None:
                break
            parser.next()
            vec = tuple(int(c) for c in match.group(1).split(","))
            if len(vec) != dim:
                raise parser.error(f"cell {vec} does not have {dim} coordinates", cell_number)
            token = match.group(2)
            if token not in alphabet:
                raise parser.error(f"unknown symbol {token!r}", cell_number)
            cells.append((vec, alphabet.index(token)))
        if not cells:
            raise parser.error("forbid: block without cells", number)
        try:
            patterns.append(Pattern(tuple(cells)))
        except (ValueError, SftError) as e:
            raise parser.error(str(e), number) from None
    return SftSpec(dim, alphabet, patterns, name=name)


def _read_wang(parser: LineParser) -> WangTileset:
    number, value = parser.expect("colors")
    colors = parser.alphabet(number, value)
    tape = None
    tiles = []
    while parser.peek() is not None:
        number, line = parser.peek()
        parsed = directive(line)
        if parsed is None or parsed[0] not in ("tile", "tape"):
            break
        parser.next()
        key, value = parsed
        fields = value.split()
        if key == "tape":
            opts = dict(f.partition("=")[::2] for f in fields)
            if set(opts) != {"blank", "initial"}:
                raise parser.error("tape: needs blank=<color> and initial=<color>", number)
            tape = TapeInfo(opts["blank"], opts["initial"])
            continue
        if len(fields) != 5:
            raise parser.error("tile: needs a name and n= e= s= w= colors", number)
        edges = {}
        for f in fields[1:]:
            match = _EDGE.match(f)
            if match is None:
                raise parser.error(f"malformed edge {f!r}", number)
            if match.group(2) not in colors:
                raise parser.error(f"unknown color {match.group(2)!r}", number)
            edges[match.group(1)] = match.group(2)
        if set(edges) != set("nesw"):
            raise parser.error("tile: must give each of n= e= s= w= once", number)
        tiles.append((fields[0], edges["n"], edges["e"], edges["s"], edges["w"]))
    try:
        return WangTileset.from_named(tiles, colors=list(colors), tape=tape)
    except (ValueError, SftError) as e:
        raise parser.error(str(e)) from None


def _finish(parser: LineParser):
    item = parser.peek()
    if item is not None:
        number, line = item
        raise parser.error(f"unknown directive {line!r}", number)


def parse_sft(text: str, path: str | None = None) -> SftSpec:
    parser = LineParser(content_lines(text), path, "%sft")
    spec = _read_sft(parser)
    _finish(parser)
    return spec


def parse_wang(text: str, path: str | None = None) -> WangTileset:
    parser = LineParser(content_lines(text), path, "%wang")
    tiles = _read_wang(parser)
    _finish(parser)
    return tiles


def parse_bundle(text: str, path: str | None = None) -> LayerProduct:
    """
    A layer product: `layer: <name>` blocks holding a `%sft` or `%wang` body
    closed by `end`, then one `allow: <tok> ...` line per allowed tuple.
    """
    parser = LineParser(content_lines(text), path, "%bundle")
    names = []
    layers: list[SftSpec] = []
    while parser.peek() is not None and parser.peek()[1].startswith("layer:"):
        number, line = parser.next()
        names.append(line.partition(":")[2].strip())
        body = []
        while True:
            item = parser.peek()
            if item is None:
                raise parser.error(f"layer {names[-1]!r} is not closed by end", number)
            parser.next()
            if item[1] == "end":
                break
            body.append(item)
        if not body:
            raise parser.error(f"layer {names[-1]!r} has no body", number)
        header = body[0][1] if body[0][1] in ("%sft", "%wang") else "%sft"
        sub = LineParser(body, path, header)
        if header == "%wang":
            layer = wang_to_sft(_read_wang(sub))
        else:
            layer = _read_sft(sub)
        _finish(sub)
        layers.append(layer)
    if not layers:
        raise parser.error("a bundle needs at least one layer: block")
    allowed = []
    while parser.peek() is not None:
        number, line = parser.peek()
        parsed = directive(line)
        if parsed is None or parsed[0] != "allow":
            break
        parser.next()
        tokens = parsed[1].split()
        if len(tokens) != len(layers):
            raise parser.error(f"allow: needs {len(layers)} symbols", number)
        try:
            allowed.append(tuple(layer.symbol(t) for layer, t in zip(layers, tokens, strict=True)))
        except SftError as e:
            raise parser.error(str(e), number) from None
    _finish(parser)
    try:
        return LayerProduct(tuple(layers), tuple(allowed), tuple(names))
    except (ValueError, SftError) as e:
        raise parser.error(str(e)) from None


def parse_torus(text: str, path: str | None = None) -> TorusConfig:
    parser = LineParser(content_lines(text), path, "%torus")
    number, value = parser.expect("dims")
    dims = tuple(parser.integer(number, v, "dims") for v in value.split())
    if not dims or any(n < 1 for n in dims):
        raise parser.error(f"dims must be positive integers, got {value!r}", number)
    number, value = parser.expect("alphabet")
    alphabet = parser.alphabet(number, value)

    width = dims[0]
    height = dims[1] if len(dims) > 1 else 1
    slices = int(np.prod(dims[2:])) if len(dims) > 2 else 1
    grid = np.zeros((width, height, slices), dtype=np.int64)
    for k in range(slices):
        if k > 0:
            sep_number, sep = parser.next() if parser.peek() else (None, None)
            if sep != "---":
                raise parser.error("expected --- between slices", sep_number)
        for r in range(height):
            item = parser.peek()
            if item is None:
                raise parser.error(f"expected {height} rows per slice")
            number, line = parser.next()
            parsed = directive(line)
            if parsed is None or parsed[0] != "row":
                raise parser.error(f"expected row:, got {line!r}", number)
            tokens = parsed[1].split()
            if len(tokens) != width:
                raise parser.error(f"row has {len(tokens)} cells, expected {width}", number)
            for x, token in enumerate(tokens):
                if token not in alphabet:
                    raise parser.error(f"unknown symbol {token!r}", number)
                grid[x, height - 1 - r, k] = alphabet.index(token)
    _finish(parser)
    return TorusConfig(alphabet, grid.reshape(dims))


def parse_spec_file(path: str | Path) -> SftSpec | WangTileset | LayerProduct:
    """Dispatch on the header line of a spec file."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    lines = content_lines(text)
    header = lines[0][1] if lines else ""
    parsers = {"%sft": parse_sft, "%wang": parse_wang, "%bundle": parse_bundle}
    if header not in parsers:
        raise SpecParseError(
            f"unknown header {header!r}, expected one of {sorted(parsers)}",
            lines[0][0] if lines else None,
            str(path),
        )
    return parsers[header](text, str(path))


def _sft_body(sft: SftSpec) -> Iterator[str]:
    yield "%sft"
    yield f"dim: {sft.dim}"
    if sft.name:
        yield f"name: {sft.name}"
    yield f"alphabet: {' '.join(sft.alphabet)}"
    for pattern in sorted(sft.forbidden, key=lambda p: p.cells):
        yield "forbid:"
        for vec, s in pattern.cells:
            yield f"({','.join(str(c) for c in vec)}) = {sft.alphabet[s]}"


def _wang_body(tiles: WangTileset) -> Iterator[str]:
    yield "%wang"
    yield f"colors: {' '.join(tiles.colors)}"
    if tiles.tape is not None:
        yield f"tape: blank={tiles.tape.blank} initial={tiles.tape.initial}"
    for tile in sorted(tiles.tiles, key=lambda t: t.name):
        n, e, s, w = tiles.edge_tokens(tile)
        yield f"tile: {tile.name} n={n} e={e} s={s} w={w}"


def sft_to_text(sft: SftSpec) -> str:
    return "\n".join(_sft_body(sft)) + "\n"


def wang_to_text(tiles: WangTileset) -> str:
    return "\n".join(_wang_body(tiles)) + "\n"


def bundle_to_text(layers: LayerProduct) -> str:
    names = layers.names or tuple(f"L{i}" for i in range(len(layers.layers)))
    out = ["%bundle"]
    for name, layer in zip(names, layers.layers, strict=True):
        out.append(f"layer: {name}")
        out.extend(_sft_body(layer))
        out.append("end")
    for t in layers.allowed:
        out.append("allow: " + " ".join(layer.alphabet[s] for layer, s in zip(layers.layers, t, strict=True)))
    return "\n".join(out) + "\n"


def torus_to_text(config: TorusConfig) -> str:
    out = ["%torus", f"dims: {' '.join(str(n) for n in config.dims)}", f"alphabet: {' '.join(config.alphabet)}"]
    cells = config.cells
    if config.dim == 1:
        cells = cells.reshape(cells.shape[0], 1)
    width, height = cells.shape[:2]
    stacked = cells.reshape(width, height, -1)
    for k in range(stacked.shape[2]):
        if k > 0:
            out.append("---")
        for y in reversed(range(height)):
            out.append("row: " + " ".join(config.alphabet[int(stacked[x, y, k])] for x in range(width)))
    return "\n".join(out) + "\n"


def pattern_to_text(pattern: Pattern, alphabet: Alphabet) -> str:
    """A finite pattern as a `%pattern` file, one `(coords) = tok` cell per line."""
    out = ["%pattern", f"dim: {pattern.dim}", f"alphabet: {' '.join(alphabet)}"]
    out += [f"({','.join(str(c) for c in vec)}) = {alphabet[s]}" for vec, s in pattern.cells]
    return "\n".join(out) + "\n"


def parse_pattern(text: str, path: str | None = None) -> tuple[Pattern, Alphabet]:
    parser = LineParser(content_lines(text), path, "%pattern")
    number, value = parser.expect("dim")
    dim = parser.integer(number, value, "dim")
    number, value = parser.expect("alphabet")
    alphabet = parser.alphabet(number, value)
    cells = []
    while parser.peek() is not None:
        number, line = parser.next()
        match = _CELL.match(line)
        if match is None:
            raise parser.error(f"expected a (coords) = symbol cell, got {line!r}", number)
        vec = tuple(int(c) for c in match.group(1).split(","))
        if len(vec) != dim:
            raise parser.error(f"cell {vec} does not have {dim} coordinates", number)
        if match.group(2) not in alphabet:
            raise parser.error(f"unknown symbol {match.group(2)!r}", number)
        cells.append((vec, alphabet.index(match.group(2))))
    if not cells:
        raise parser.error("a pattern needs at least one cell")
    try:
        return Pattern(tuple(cells)), alphabet
    except (ValueError, SftError) as e:
        raise parser.error(str(e)) from None

