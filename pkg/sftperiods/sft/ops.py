"""
Constructions on SFT specifications: Wang desugaring, layer products, block
codes, dimension lifting, unimodular coordinate changes and determinism checks.
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from sftperiods.errors import (
    AlphabetMismatchError,
    DimensionMismatchError,
    UnsupportedSftError,
)
from sftperiods.sft.model import (
    Alphabet,
    BlockCode,
    LayerProduct,
    Pattern,
    ShapeRule,
    SftSpec,
    TorusConfig,
    Vec,
    WangTileset,
)

logger = logging.getLogger(__name__)

EAST = (1, 0)
NORTH = (0, 1)
PRODUCT_SEPARATOR = "|"

# Largest alphabet for which check_deterministic builds its 2x2 block table,
# and the number of table entries built at once.
_MAX_DETERMINISM_ALPHABET = 192
_BLOCK_CHUNK = 1 << 23


def wang_to_sft(tiles: WangTileset) -> SftSpec:
    """Nearest-neighbour SFT whose symbols are the tiles, forbidding edge mismatches."""
    if not tiles.tiles:
        raise ValueError("cannot build an SFT from an empty tileset")
    size = len(tiles.tiles)
    horizontal = set()
    vertical = set()
    for i, left in enumerate(tiles.tiles):
        for j, right in enumerate(tiles.tiles):
            if left.east != right.west:
                horizontal.add((i, j))
            if left.north != right.south:
                vertical.add((i, j))
    rules = []
    if horizontal:
        rules.append(ShapeRule(((0, 0), EAST), horizontal, size))
    if vertical:
        rules.append(ShapeRule(((0, 0), NORTH), vertical, size))
    logger.debug(
        f"wang_to_sft: {size} tiles, {len(horizontal)} horizontal and "
        f"{len(vertical)} vertical forbidden dominoes"
    )
    return SftSpec(2, Alphabet(tiles.names), rules=rules)


def product_projections(layers: LayerProduct) -> list[np.ndarray]:
    """For each layer, the map from product symbol index to layer symbol index."""
    return [
        np.array([t[i] for t in layers.allowed], dtype=np.int64)
        for i in range(len(layers.layers))
    ]


def product_token(layers: LayerProduct, tokens: Sequence[str]) -> str:
    """Product symbol for one token per layer; not checked against the allowed tuples."""
    if len(tokens) != len(layers.layers):
        raise ValueError(f"{len(tokens)} tokens for {len(layers.layers)} layers")
    return PRODUCT_SEPARATOR.join(tokens)


def product(layers: LayerProduct, name: str | None = None) -> SftSpec:
    """
    Desugar a layer product into one SFT over the allowed tuples.

    Layer rules are lifted through the projections instead of being expanded,
    so the forbidden set stays implicit.
    """
    tokens = [
        product_token(layers, [layer.alphabet[s] for layer, s in zip(layers.layers, t, strict=True)])
        for t in layers.allowed
    ]
    rules = []
    for layer, proj in zip(layers.layers, product_projections(layers), strict=True):
        for rule in layer.rules:
            lifted = proj if rule.projection is None else rule.projection[proj]
            rules.append(ShapeRule(rule.offsets, rule.forbidden, rule.local_size, lifted))
    return SftSpec(layers.dim, Alphabet(tokens), rules=rules, name=name)


def project_config(config: TorusConfig, layers: LayerProduct, index: int) -> TorusConfig:
    """The layer-`index` component of a torus over the product alphabet."""
    proj = product_projections(layers)[index]
    return TorusConfig(layers.layers[index].alphabet, proj[config.cells])


def apply_block_code(code: BlockCode, config: TorusConfig) -> TorusConfig:
    """Image of a torus under a sliding block code, with wraparound."""
    if config.dim != code.dim:
        raise DimensionMismatchError(
            f"block code has dimension {code.dim}, config has dimension {config.dim}"
        )
    if config.alphabet != code.source:
        raise AlphabetMismatchError("config alphabet differs from the block code source")
    axes = tuple(range(config.dim))
    windows = np.stack(
        [np.roll(config.cells, tuple(-v for v in offset), axis=axes).ravel() for offset in code.window]
    )
    out = np.empty(windows.shape[1], dtype=np.int64)
    for z in range(windows.shape[1]):
        key = tuple(int(s) for s in windows[:, z])
        value = code.table.get(key, code.default)
        if value is None:
            position = tuple(int(c) for c in np.unravel_index(z, config.dims))
            raise ValueError(f"block code has no entry for {key} (at {position})")
        out[z] = value
    return TorusConfig(code.target, out.reshape(config.dims))


def lift_dimension(sft: SftSpec) -> SftSpec:
    """Add an axis along which every configuration is constant."""
    rules = [
        ShapeRule(
            tuple(offset + (0,) for offset in rule.offsets),
            rule.forbidden,
            rule.local_size,
            rule.projection,
        )
        for rule in sft.rules
    ]
    size = len(sft.alphabet)
    zero = (0,) * (sft.dim + 1)
    step = (0,) * sft.dim + (1,)
    unequal = {(a, b) for a in range(size) for b in range(size) if a != b}
    if unequal:
        rules.append(ShapeRule((zero, step), unequal, size))
    return SftSpec(sft.dim + 1, sft.alphabet, rules=rules, name=sft.name)


def _transform_vec(matrix: np.ndarray, vec: Vec) -> Vec:
    return tuple(int(x) for x in matrix @ np.asarray(vec, dtype=np.int64))


def _check_unimodular(matrix: np.ndarray, dim: int):
    if matrix.shape != (dim, dim):
        raise DimensionMismatchError(f"transform must be {dim}x{dim}, got {matrix.shape}")
    if round(abs(np.linalg.det(matrix))) != 1:
        raise ValueError("coordinate transform must be unimodular")


def transform_spec(sft: SftSpec, matrix: Sequence[Sequence[int]], name: str | None = None) -> SftSpec:
    """Apply v -> M v to every forbidden shape (M integer with det +-1)."""
    matrix = np.asarray(matrix, dtype=np.int64)
    _check_unimodular(matrix, sft.dim)
    rules = []
    for rule in sft.rules:
        moved = [_transform_vec(matrix, o) for o in rule.offsets]
        low = tuple(min(v[i] for v in moved) for i in range(sft.dim))
        moved = [tuple(a - b for a, b in zip(v, low, strict=True)) for v in moved]
        rules.append(ShapeRule(moved, rule.forbidden, rule.local_size, rule.projection))
    return SftSpec(sft.dim, sft.alphabet, rules=rules, name=name or sft.name)


def transform_pattern(pattern: Pattern, matrix: Sequence[Sequence[int]]) -> Pattern:
    matrix = np.asarray(matrix, dtype=np.int64)
    _check_unimodular(matrix, pattern.dim)
    return Pattern(tuple((_transform_vec(matrix, v), s) for v, s in pattern.cells))


def shear_matrix(k: int) -> list[list[int]]:
    return [[1, -k], [0, 1]]


def shear(sft: SftSpec, k: int) -> SftSpec:
    """(x, y) -> (x - k*y, y) in two dimensions."""
    if sft.dim != 2:
        raise DimensionMismatchError("shear is defined for two-dimensional specs")
    return transform_spec(sft, shear_matrix(k))


def permutation_matrix(perm: Sequence[int]) -> list[list[int]]:
    dim = len(perm)
    if sorted(perm) != list(range(dim)):
        raise ValueError(f"{perm} is not a permutation of the axes")
    return [[1 if perm[i] == j else 0 for j in range(dim)] for i in range(dim)]


def transpose(sft: SftSpec, perm: Sequence[int] | None = None) -> SftSpec:
    """Permute coordinates: new axis i is old axis perm[i]. Defaults to swapping x and y."""
    perm = tuple(perm) if perm is not None else tuple(reversed(range(sft.dim)))
    return transform_spec(sft, permutation_matrix(perm))


def reflection_matrix(dim: int, axis: int) -> list[list[int]]:
    return [[(-1 if i == axis else 1) if i == j else 0 for j in range(dim)] for i in range(dim)]


def reflect(sft: SftSpec, axis: int) -> SftSpec:
    return transform_spec(sft, reflection_matrix(sft.dim, axis))


def transpose_config(config: TorusConfig, perm: Sequence[int] | None = None) -> TorusConfig:
    perm = tuple(perm) if perm is not None else tuple(reversed(range(config.dim)))
    return TorusConfig(config.alphabet, config.cells.transpose(perm))


def reflect_config(config: TorusConfig, axis: int) -> TorusConfig:
    """c'(z) = c(z with coordinate `axis` negated)."""
    flipped = np.roll(np.flip(config.cells, axis=axis), 1, axis=axis)
    return TorusConfig(config.alphabet, flipped)


@dataclass(frozen=True)
class DeterminismReport:
    deterministic: bool
    # (a, b, completions) for the first context with two or more completions.
    counterexample: tuple[str, str, tuple[str, ...]] | None = None


_BLOCK = ((0, 0), (1, 0), (0, 1), (1, 1))

# Block axes (a, b, c, free) per mode; axes index _BLOCK.
_MODES = {
    "nw": (0, 3, 1, 2),
    "east": (0, 2, 1, 3),
}


def _admissible_blocks(sft: SftSpec, first: np.ndarray | None = None) -> np.ndarray:
    """
    Boolean table over 2x2 blocks (cells ordered as _BLOCK) with no forbidden
    pattern, for the symbols `first` at (0, 0) only.
    """
    size = len(sft.alphabet)
    first = np.arange(size) if first is None else first
    ok = np.ones((len(first),) + (size,) * 3, dtype=np.bool_)
    for rule in sft.rules:
        if not rule.forbidden:
            continue
        local = np.zeros((rule.local_size,) * rule.arity, dtype=np.bool_)
        for t in rule.forbidden:
            local[t] = True
        proj = rule.projection if rule.projection is not None else np.arange(size)
        lifted = local[np.ix_(*([proj] * rule.arity))]
        extent = tuple(max(o[i] for o in rule.offsets) for i in range(2))
        for tx in range(2 - extent[0]):
            for ty in range(2 - extent[1]):
                axes = [_BLOCK.index((o[0] + tx, o[1] + ty)) for o in rule.offsets]
                order = np.argsort(axes)
                part = lifted.transpose(order)
                if 0 in axes:
                    part = part[first]
                shape = [len(first) if ax == 0 else size if ax in axes else 1 for ax in range(4)]
                ok &= ~part.reshape(shape)
    return ok


def check_deterministic(sft: SftSpec, mode: str) -> DeterminismReport:
    """
    Check NW or East determinism of a radius-1 planar spec.

    NW: a at (x, y) and b at (x+1, y+1) leave at most one c at (x+1, y).
    East: a at (x, y) and b at (x, y+1) leave at most one c at (x+1, y).
    A value of c counts when some fourth symbol completes an admissible 2x2 block.
    The block table is built a few values of a at a time.
    """
    mode = mode.lower()
    if mode not in _MODES:
        raise ValueError(f"unknown determinism mode {mode!r}, expected 'nw' or 'east'")
    if sft.dim != 2:
        raise DimensionMismatchError("determinism is defined for two-dimensional specs")
    if sft.radius > 1:
        raise UnsupportedSftError(f"determinism check needs radius <= 1, got {sft.radius}")
    size = len(sft.alphabet)
    if size > _MAX_DETERMINISM_ALPHABET:
        raise UnsupportedSftError(
            f"alphabet of {size} symbols is too large for the block table"
        )
    a_ax, b_ax, c_ax, free_ax = _MODES[mode]
    # Remaining axes keep their relative order once `free_ax` is dropped.
    remaining = [ax for ax in range(4) if ax != free_ax]
    order = [remaining.index(a_ax), remaining.index(b_ax), remaining.index(c_ax)]
    step = max(1, _BLOCK_CHUNK // size**3)
    for start in range(0, size, step):
        first = np.arange(start, min(size, start + step))
        extendable = _admissible_blocks(sft, first).any(axis=free_ax)
        table = extendable.transpose(order)
        bad = np.argwhere(table.sum(axis=2) > 1)
        if bad.size == 0:
            continue
        a, b = int(first[bad[0][0]]), int(bad[0][1])
        completions = tuple(sft.alphabet[int(c)] for c in np.flatnonzero(table[a - start, b]))
        logger.info(
            f"check_deterministic({mode}): context ({sft.alphabet[a]}, {sft.alphabet[b]}) "
            f"has {len(completions)} completions"
        )
        return DeterminismReport(False, (sft.alphabet[a], sft.alphabet[b], completions))
    return DeterminismReport(True)
