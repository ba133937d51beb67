import logging
from dataclasses import dataclass

import numpy as np

from sftperiods.errors import AlphabetMismatchError, DimensionMismatchError
from sftperiods.sft.kernels import anchor_keys
from sftperiods.sft.model import Pattern, ShapeRule, SftSpec, TorusConfig, Vec

logger = logging.getLogger(__name__)

# Keys above this fall back to tuple lookups instead of int64 mixed radix.
_MAX_KEY = 2**62


@dataclass(frozen=True)
class Violation:
    """A forbidden pattern found at `position` (the anchor of rule `rule`)."""

    position: Vec
    rule: int
    offsets: tuple[Vec, ...]
    symbols: tuple[int, ...]

    @property
    def pattern(self) -> Pattern:
        return Pattern(tuple(zip(self.offsets, self.symbols, strict=True)))


def _check_compatible(config: TorusConfig, sft: SftSpec):
    if config.dim != sft.dim:
        raise DimensionMismatchError(
            f"config has dimension {config.dim}, spec has dimension {sft.dim}"
        )
    if config.alphabet != sft.alphabet:
        raise AlphabetMismatchError("config alphabet differs from the spec alphabet")


def _rule_projection(rule: ShapeRule, size: int) -> np.ndarray:
    if rule.projection is None:
        return np.arange(size, dtype=np.int64)
    return np.asarray(rule.projection, dtype=np.int64)


def _forbidden_keys(rule: ShapeRule) -> np.ndarray:
    keys = []
    for t in rule.forbidden:
        key = 0
        for w in t:
            key = key * rule.local_size + w
        keys.append(key)
    return np.array(sorted(keys), dtype=np.int64)


def _violating_anchors(config: TorusConfig, rule: ShapeRule) -> np.ndarray:
    if not rule.forbidden:
        return np.empty(0, dtype=np.int64)
    flat = config.cells.ravel()
    dims = np.asarray(config.dims, dtype=np.int64)
    if rule.local_size ** rule.arity < _MAX_KEY:
        offsets = np.asarray(rule.offsets, dtype=np.int64)
        keys = anchor_keys(
            flat, dims, offsets, _rule_projection(rule, len(config.alphabet)), rule.local_size
        )
        return np.flatnonzero(np.isin(keys, _forbidden_keys(rule)))
    hits = []
    for a, vec in enumerate(np.ndindex(*config.dims)):
        symbols = [config.at(tuple(v + o for v, o in zip(vec, off, strict=True))) for off in rule.offsets]
        if rule.forbids(symbols):
            hits.append(a)
    return np.array(hits, dtype=np.int64)


def is_locally_valid(config: TorusConfig, sft: SftSpec) -> list[Violation]:
    """
    Every occurrence of a forbidden pattern in the periodic extension of `config`.

    Positions are reported inside the fundamental domain; an empty list means
    the periodic configuration belongs to the subshift.
    """
    _check_compatible(config, sft)
    violations = []
    for index, rule in enumerate(sft.rules):
        for a in _violating_anchors(config, rule):
            position = tuple(int(c) for c in np.unravel_index(int(a), config.dims))
            symbols = tuple(
                config.at(tuple(p + o for p, o in zip(position, off, strict=True)))
                for off in rule.offsets
            )
            violations.append(Violation(position, index, rule.offsets, symbols))
    violations.sort(key=lambda v: (v.position, v.rule))
    return violations


def is_valid(config: TorusConfig, sft: SftSpec) -> bool:
    _check_compatible(config, sft)
    return all(_violating_anchors(config, rule).size == 0 for rule in sft.rules)


def pattern_occurs(small: Pattern, big: Pattern) -> list[Vec]:
    """All v with v + support(small) inside support(big) and matching symbols."""
    if small.dim != big.dim:
        raise DimensionMismatchError(
            f"pattern dimensions differ: {small.dim} and {big.dim}"
        )
    cells = big.as_dict()
    first, _ = small.cells[0]
    found = []
    for vec in cells:
        shift = tuple(b - s for b, s in zip(vec, first, strict=True))
        if all(
            cells.get(tuple(a + b for a, b in zip(v, shift, strict=True))) == s
            for v, s in small.cells
        ):
            found.append(shift)
    return sorted(found)


def pattern_violations(pattern: Pattern, sft: SftSpec) -> list[Violation]:
    """Forbidden patterns lying entirely inside a finite pattern (no wraparound)."""
    if pattern.dim != sft.dim:
        raise DimensionMismatchError(
            f"pattern has dimension {pattern.dim}, spec has dimension {sft.dim}"
        )
    cells = pattern.as_dict()
    violations = []
    for index, rule in enumerate(sft.rules):
        if not rule.forbidden:
            continue
        head = rule.offsets[0]
        for vec in cells:
            anchor = tuple(v - h for v, h in zip(vec, head, strict=True))
            symbols = []
            for off in rule.offsets:
                s = cells.get(tuple(a + o for a, o in zip(anchor, off, strict=True)))
                if s is None:
                    break
                symbols.append(s)
            else:
                if rule.forbids(symbols):
                    violations.append(Violation(anchor, index, rule.offsets, tuple(symbols)))
    violations.sort(key=lambda v: (v.position, v.rule))
    return violations


def is_admissible(pattern: Pattern, sft: SftSpec) -> bool:
    return not pattern_violations(pattern, sft)
