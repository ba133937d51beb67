"""
Core data model: alphabets, patterns, SFT specifications, Wang tilesets,
block codes, layer products and torus configurations.

Symbols are interned: every alphabet maps its tokens to dense indices, and all
patterns, rules and configurations store indices only.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from sftperiods.errors import AlphabetMismatchError, DimensionMismatchError

logger = logging.getLogger(__name__)

Vec = tuple[int, ...]


def _valid_token(token: str) -> bool:
    return bool(token) and not any(ch.isspace() for ch in token) and "=" not in token


class Alphabet:
    """An ordered set of distinct string tokens."""

    __slots__ = ("symbols", "_index")

    def __init__(self, symbols: Iterable[str]):
        symbols = tuple(symbols)
        if not symbols:
            raise ValueError("alphabet must not be empty")
        index: dict[str, int] = {}
        for i, token in enumerate(symbols):
            if not isinstance(token, str) or not _valid_token(token):
                raise ValueError(f"invalid symbol token {token!r}")
            if token in index:
                raise ValueError(f"duplicate symbol {token!r} in alphabet")
            index[token] = i
        self.symbols = symbols
        self._index = index

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self) -> Iterator[str]:
        return iter(self.symbols)

    def __getitem__(self, i: int) -> str:
        return self.symbols[i]

    def __contains__(self, token: object) -> bool:
        return token in self._index

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Alphabet) and self.symbols == other.symbols

    def __hash__(self) -> int:
        return hash(self.symbols)

    def __repr__(self) -> str:
        return f"Alphabet({list(self.symbols)!r})"

    def index(self, token: str) -> int:
        try:
            return self._index[token]
        except KeyError:
            raise AlphabetMismatchError(f"symbol {token!r} is not in the alphabet") from None


@dataclass(frozen=True)
class Pattern:
    """A finite pattern: a map from integer vectors to symbol indices."""

    cells: tuple[tuple[Vec, int], ...]

    def __post_init__(self):
        if not self.cells:
            raise ValueError("a pattern must have at least one cell")
        dim = len(self.cells[0][0])
        if dim < 1:
            raise ValueError("pattern cells must have dimension >= 1")
        seen = set()
        for vec, _ in self.cells:
            if len(vec) != dim:
                raise DimensionMismatchError(
                    f"pattern mixes dimensions {dim} and {len(vec)}"
                )
            if vec in seen:
                raise ValueError(f"pattern lists cell {vec} twice")
            seen.add(vec)
        object.__setattr__(self, "cells", tuple(sorted(self.cells)))

    @classmethod
    def from_mapping(cls, mapping: Mapping[Vec, int]) -> Pattern:
        return cls(tuple((tuple(v), int(s)) for v, s in mapping.items()))

    @property
    def dim(self) -> int:
        return len(self.cells[0][0])

    @property
    def support(self) -> tuple[Vec, ...]:
        return tuple(v for v, _ in self.cells)

    @property
    def symbols(self) -> tuple[int, ...]:
        return tuple(s for _, s in self.cells)

    def as_dict(self) -> dict[Vec, int]:
        return dict(self.cells)

    def translate(self, shift: Vec) -> Pattern:
        return Pattern(
            tuple(
                (tuple(a + b for a, b in zip(v, shift, strict=True)), s)
                for v, s in self.cells
            )
        )

    def normalized(self) -> Pattern:
        """Translate so that the coordinate-wise minimum of the support is the origin."""
        low = tuple(min(v[i] for v in self.support) for i in range(self.dim))
        return self.translate(tuple(-x for x in low))

    @property
    def extent(self) -> int:
        """Largest coordinate of the normalized support."""
        norm = self.normalized()
        return max(max(v) for v in norm.support)


class ShapeRule:
    """
    Forbidden tuples over one normalized shape.

    `projection` maps a global symbol to the local alphabet in which `forbidden`
    is written (None means identity). Layer products use it to lift each
    layer's rules without materializing the lifted patterns.
    """

    __slots__ = ("offsets", "forbidden", "projection", "local_size", "__dict__")

    def __init__(
        self,
        offsets: Sequence[Vec],
        forbidden: Iterable[tuple[int, ...]],
        local_size: int,
        projection: np.ndarray | None = None,
    ):
        self.offsets = tuple(tuple(o) for o in offsets)
        self.forbidden = frozenset(tuple(t) for t in forbidden)
        self.local_size = local_size
        self.projection = projection
        for t in self.forbidden:
            if len(t) != len(self.offsets):
                raise ValueError(
                    f"forbidden tuple {t} does not match shape of size {len(self.offsets)}"
                )

    @property
    def arity(self) -> int:
        return len(self.offsets)

    @cached_property
    def projection_list(self) -> list[int] | None:
        return None if self.projection is None else [int(x) for x in self.projection]

    def local(self, symbol: int) -> int:
        proj = self.projection_list
        return symbol if proj is None else proj[symbol]

    def forbids(self, symbols: Sequence[int]) -> bool:
        proj = self.projection_list
        if proj is None:
            return tuple(symbols) in self.forbidden
        return tuple(proj[s] for s in symbols) in self.forbidden

    def class_masks(self, global_size: int) -> list[int]:
        """Bitmask over global symbols for every local symbol."""
        masks = [0] * self.local_size
        proj = self.projection_list
        for s in range(global_size):
            w = s if proj is None else proj[s]
            masks[w] |= 1 << s
        return masks

    def completion_masks(self, global_size: int) -> dict[tuple[int, tuple[int, ...]], int]:
        """
        For (position j, local symbols at the other positions) the bitmask of
        global symbols forbidden at position j. Cached per global alphabet size.
        """
        cache = self.__dict__.setdefault("_completion_cache", {})
        if global_size in cache:
            return cache[global_size]
        classes = self.class_masks(global_size)
        table: dict[tuple[int, tuple[int, ...]], int] = {}
        for t in self.forbidden:
            for j in range(len(t)):
                key = (j, t[:j] + t[j + 1 :])
                table[key] = table.get(key, 0) | classes[t[j]]
        cache[global_size] = table
        return table

    def lifted_patterns(self, global_size: int) -> Iterator[Pattern]:
        """Forbidden patterns in the global alphabet (may be very many)."""
        if self.projection_list is None:
            for t in sorted(self.forbidden):
                yield Pattern(tuple(zip(self.offsets, t, strict=True)))
            return
        preimages: list[list[int]] = [[] for _ in range(self.local_size)]
        for s in range(global_size):
            preimages[self.projection_list[s]].append(s)
        for t in sorted(self.forbidden):
            for combo in itertools.product(*(preimages[w] for w in t)):
                yield Pattern(tuple(zip(self.offsets, combo, strict=True)))


class SftSpec:
    """
    A subshift of finite type: alphabet plus forbidden patterns in dimension `dim`.

    Forbidden patterns are stored normalized (support minimum at the origin) and
    grouped by shape into ShapeRule objects.
    """

    def __init__(
        self,
        dim: int,
        alphabet: Alphabet,
        forbidden: Iterable[Pattern] = (),
        *,
        rules: Iterable[ShapeRule] = (),
        name: str | None = None,
    ):
        if dim < 1:
            raise ValueError(f"dimension must be positive, got {dim}")
        self.dim = dim
        self.alphabet = alphabet
        self.name = name

        grouped: dict[tuple[Vec, ...], set[tuple[int, ...]]] = {}
        for pattern in forbidden:
            if pattern.dim != dim:
                raise DimensionMismatchError(
                    f"forbidden pattern of dimension {pattern.dim} in a {dim}-dimensional spec"
                )
            norm = pattern.normalized()
            for s in norm.symbols:
                if not 0 <= s < len(alphabet):
                    raise AlphabetMismatchError(
                        f"symbol index {s} out of range for alphabet of size {len(alphabet)}"
                    )
            grouped.setdefault(norm.support, set()).add(norm.symbols)

        own_rules = [
            ShapeRule(shape, tuples, len(alphabet))
            for shape, tuples in sorted(grouped.items())
        ]
        extra = list(rules)
        for rule in extra:
            if any(len(o) != dim for o in rule.offsets):
                raise DimensionMismatchError("rule shape dimension does not match spec")
            if rule.projection is not None and len(rule.projection) != len(alphabet):
                raise AlphabetMismatchError("rule projection does not cover the alphabet")
        self.rules: tuple[ShapeRule, ...] = tuple(own_rules + extra)

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        return (
            f"SftSpec{label}(dim={self.dim}, symbols={len(self.alphabet)}, "
            f"rules={len(self.rules)}, radius={self.radius})"
        )

    @cached_property
    def radius(self) -> int:
        extent = 0
        for rule in self.rules:
            if rule.forbidden:
                extent = max(extent, max(max(o) for o in rule.offsets))
        return extent

    @property
    def is_plain(self) -> bool:
        return all(rule.projection is None for rule in self.rules)

    def iter_forbidden(self) -> Iterator[Pattern]:
        for rule in self.rules:
            yield from rule.lifted_patterns(len(self.alphabet))

    @cached_property
    def forbidden(self) -> frozenset[Pattern]:
        """All forbidden patterns; lifted product rules are materialized here."""
        return frozenset(self.iter_forbidden())

    def forbidden_count(self) -> int:
        total = 0
        for rule in self.rules:
            if rule.projection_list is None:
                total += len(rule.forbidden)
            else:
                sizes = np.bincount(rule.projection, minlength=rule.local_size)
                total += sum(int(np.prod([sizes[w] for w in t])) for t in rule.forbidden)
        return total

    def flattened(self) -> SftSpec:
        """The same spec with every rule lifted to explicit patterns."""
        return SftSpec(self.dim, self.alphabet, self.iter_forbidden(), name=self.name)

    def symbol(self, token: str) -> int:
        return self.alphabet.index(token)


@dataclass(frozen=True)
class WangTile:
    name: str
    north: int
    east: int
    south: int
    west: int


@dataclass(frozen=True)
class TapeInfo:
    """Tape conventions recorded on tilesets compiled from Turing machines."""

    blank: str
    initial: str


@dataclass(frozen=True)
class WangTileset:
    colors: Alphabet
    tiles: tuple[WangTile, ...]
    tape: TapeInfo | None = None

    def __post_init__(self):
        names = set()
        for tile in self.tiles:
            if tile.name in names:
                raise ValueError(f"duplicate tile name {tile.name!r}")
            if not _valid_token(tile.name):
                raise ValueError(f"invalid tile name {tile.name!r}")
            names.add(tile.name)
            for c in (tile.north, tile.east, tile.south, tile.west):
                if not 0 <= c < len(self.colors):
                    raise AlphabetMismatchError(
                        f"tile {tile.name!r} uses color index {c} outside the palette"
                    )

    @classmethod
    def from_named(
        cls,
        tiles: Iterable[tuple[str, str, str, str, str]],
        colors: Iterable[str] | None = None,
        tape: TapeInfo | None = None,
    ) -> WangTileset:
        """Build from (name, north, east, south, west) color tokens."""
        tiles = list(tiles)
        if colors is None:
            seen: dict[str, None] = {}
            for _, *edges in tiles:
                for c in edges:
                    seen.setdefault(c, None)
            colors = list(seen)
        palette = Alphabet(colors)
        built = tuple(
            WangTile(name, palette.index(n), palette.index(e), palette.index(s), palette.index(w))
            for name, n, e, s, w in tiles
        )
        return cls(palette, built, tape)

    def __len__(self) -> int:
        return len(self.tiles)

    @property
    def names(self) -> list[str]:
        return [t.name for t in self.tiles]

    def edge_tokens(self, tile: WangTile) -> tuple[str, str, str, str]:
        return (
            self.colors[tile.north],
            self.colors[tile.east],
            self.colors[tile.south],
            self.colors[tile.west],
        )


class TorusConfig:
    """
    A filling of the fundamental domain n_1 x ... x n_d with wraparound.

    `cells[x_1, ..., x_d]` holds the symbol at coordinate (x_1, ..., x_d); the
    first coordinate is horizontal. Flattening in C order gives the
    lexicographic cell order used everywhere.
    """

    __slots__ = ("alphabet", "cells")

    def __init__(self, alphabet: Alphabet, cells: np.ndarray):
        cells = np.ascontiguousarray(cells, dtype=np.int64)
        if cells.ndim < 1 or cells.size == 0:
            raise ValueError("a torus configuration needs at least one cell")
        if cells.min() < 0 or cells.max() >= len(alphabet):
            raise AlphabetMismatchError("torus cell outside the alphabet")
        cells.setflags(write=False)
        self.alphabet = alphabet
        self.cells = cells

    @classmethod
    def from_flat(cls, alphabet: Alphabet, dims: Sequence[int], flat: Sequence[int]) -> TorusConfig:
        dims = tuple(int(n) for n in dims)
        if any(n < 1 for n in dims):
            raise ValueError(f"torus dimensions must be positive, got {dims}")
        return cls(alphabet, np.asarray(flat, dtype=np.int64).reshape(dims))

    @classmethod
    def from_rows(cls, alphabet: Alphabet, rows: Sequence[Sequence[str]]) -> TorusConfig:
        """Two-dimensional config from token rows, top row first."""
        height = len(rows)
        width = len(rows[0])
        grid = np.zeros((width, height), dtype=np.int64)
        for r, row in enumerate(rows):
            if len(row) != width:
                raise ValueError("ragged rows in torus configuration")
            for x, token in enumerate(row):
                grid[x, height - 1 - r] = alphabet.index(token)
        return cls(alphabet, grid)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(int(n) for n in self.cells.shape)

    @property
    def dim(self) -> int:
        return self.cells.ndim

    def __len__(self) -> int:
        return int(self.cells.size)

    def at(self, vec: Vec) -> int:
        idx = tuple(c % n for c, n in zip(vec, self.cells.shape, strict=True))
        return int(self.cells[idx])

    def token_at(self, vec: Vec) -> str:
        return self.alphabet[self.at(vec)]

    def translate(self, shift: Vec) -> TorusConfig:
        """The config c' with c'(z) = c(z + shift)."""
        moved = np.roll(self.cells, tuple(-s for s in shift), axis=tuple(range(self.dim)))
        return TorusConfig(self.alphabet, moved)

    def flat(self) -> tuple[int, ...]:
        return tuple(int(x) for x in self.cells.ravel())

    def rows(self) -> list[list[str]]:
        """Token rows, top row first (two-dimensional configs only)."""
        if self.dim == 1:
            return [[self.alphabet[int(s)] for s in self.cells]]
        if self.dim != 2:
            raise DimensionMismatchError("rows() needs a one or two dimensional config")
        width, height = self.cells.shape
        return [
            [self.alphabet[int(self.cells[x, y])] for x in range(width)]
            for y in reversed(range(height))
        ]

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, TorusConfig)
            and self.alphabet == other.alphabet
            and self.cells.shape == other.cells.shape
            and bool(np.array_equal(self.cells, other.cells))
        )

    def __hash__(self) -> int:
        return hash((self.cells.shape, self.cells.tobytes()))

    def __lt__(self, other: TorusConfig) -> bool:
        return (self.dims, self.flat()) < (other.dims, other.flat())

    def __repr__(self) -> str:
        return f"TorusConfig(dims={self.dims}, cells={self.flat()})"


@dataclass(frozen=True)
class BlockCode:
    """A sliding block code F(x)_z = table[x_{z+v_1}, ..., x_{z+v_k}]."""

    window: tuple[Vec, ...]
    table: Mapping[tuple[int, ...], int]
    source: Alphabet
    target: Alphabet
    default: int | None = None

    def __post_init__(self):
        if not self.window:
            raise ValueError("block code window must not be empty")
        dim = len(self.window[0])
        if any(len(v) != dim for v in self.window):
            raise DimensionMismatchError("block code window mixes dimensions")
        for key, value in self.table.items():
            if len(key) != len(self.window):
                raise ValueError(f"table key {key} does not match the window size")
            if not 0 <= value < len(self.target):
                raise AlphabetMismatchError(f"table output {value} outside target alphabet")
        if self.default is not None and not 0 <= self.default < len(self.target):
            raise AlphabetMismatchError("default output outside target alphabet")

    @property
    def dim(self) -> int:
        return len(self.window[0])


@dataclass(frozen=True)
class LayerProduct:
    """Layers sharing a dimension plus the symbol tuples allowed at one cell."""

    layers: tuple[SftSpec, ...]
    allowed: tuple[tuple[int, ...], ...]
    names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if not self.layers:
            raise ValueError("a layer product needs at least one layer")
        if not self.allowed:
            raise ValueError("the allowed superimposition set is empty")
        dims = {layer.dim for layer in self.layers}
        if len(dims) != 1:
            raise DimensionMismatchError(f"layers have different dimensions {sorted(dims)}")
        for t in self.allowed:
            if len(t) != len(self.layers):
                raise ValueError(f"allowed tuple {t} does not have one symbol per layer")
            for s, layer in zip(t, self.layers, strict=True):
                if not 0 <= s < len(layer.alphabet):
                    raise AlphabetMismatchError(f"allowed tuple {t} has an unknown symbol")
        if len(set(self.allowed)) != len(self.allowed):
            raise ValueError("allowed tuples must be distinct")
        if self.names and len(self.names) != len(self.layers):
            raise ValueError("one name per layer is required")

    @property
    def dim(self) -> int:
        return self.layers[0].dim
