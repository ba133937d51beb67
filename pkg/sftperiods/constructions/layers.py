"""
Layers that turn an aperiodic base into rectangles of controlled size.

`breaker_layer` adds vertical breaker lines to a base, `counter_layer` runs a
base-k counter between breakers so that rows repeat after k^(p-1) steps when
breakers are p apart, and the sync layer T makes the column right of every
breaker in a row carry the same base symbol. `y_k` bundles the three.
"""

import logging
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from sftperiods.constructions.robinson import east_deterministic_base
from sftperiods.errors import DimensionMismatchError
from sftperiods.opentelemetry_config import get_tracer
from sftperiods.sft.model import Alphabet, LayerProduct, ShapeRule, SftSpec, TorusConfig
from sftperiods.sft.ops import EAST, NORTH, product, product_token, project_config

logger = logging.getLogger(__name__)
tracer = get_tracer("sftperiods.constructions")

BREAKER = "brk"
HORLINE = "horline"
CORNER = "corner"
MARKED, EMPTY = "h", "e"
CARRY = {MARKED: "carry.h", EMPTY: "carry.e"}
ROLES = ("bar", "gate", "copy")

_ORIGIN = (0, 0)


@dataclass(frozen=True)
class Transducer:
    """Letter-to-letter transducer over digits, deterministic and total."""

    k: int
    states: tuple[int, ...]
    edges: dict[tuple[int, int], tuple[int, int]]

    def __post_init__(self):
        for state in self.states:
            for digit in range(self.k):
                if (state, digit) not in self.edges:
                    raise ValueError(f"no edge from state {state} on digit {digit}")

    @classmethod
    def increment(cls, k: int) -> "Transducer":
        """State = incoming carry; reads a digit, writes digit + carry mod k."""
        if k < 2:
            raise ValueError(f"k must be at least 2, got {k}")
        edges = {
            (carry, a): (int(carry == 1 and a == k - 1), (a + carry) % k)
            for carry in (0, 1)
            for a in range(k)
        }
        return cls(k, (0, 1), edges)

    def step(self, state: int, digit: int) -> tuple[int, int]:
        return self.edges[(state, digit)]

    def run(self, digits: Sequence[int], state: int = 1) -> list[int]:
        """Least significant digit first."""
        out = []
        for a in digits:
            state, written = self.step(state, a)
            out.append(written)
        return out


@dataclass(frozen=True)
class LayerBundle(LayerProduct):
    """A layer product whose layers are addressed by name."""

    def layer(self, name: str) -> SftSpec:
        return self.layers[self.names.index(name)]

    def sft(self, name: str | None = None) -> SftSpec:
        return product(self, name)

    def project(self, config: TorusConfig, name: str) -> TorusConfig:
        return project_config(config, self, self.names.index(name))

    def assemble(self, cells: Sequence[Sequence[Sequence[str]]]) -> TorusConfig:
        """
        Torus over the product alphabet from one token per layer at each
        cell, indexed cells[x][y]. Raises AlphabetMismatchError on a tuple
        outside the allowed set.
        """
        alphabet = self.sft().alphabet
        grid = np.array(
            [[alphabet.index(product_token(self, tokens)) for tokens in column] for column in cells],
            dtype=np.int64,
        )
        return TorusConfig(alphabet, grid)


def _pair_rule(offset: tuple[int, int], size: int, forbidden: Callable[[int, int], bool]) -> ShapeRule:
    pairs = {(a, b) for a in range(size) for b in range(size) if forbidden(a, b)}
    return ShapeRule((_ORIGIN, offset), pairs, size)


def _lift(base: SftSpec, extra: int) -> list[ShapeRule]:
    """Base rules over an alphabet with `extra` new symbols first, all mapped to a spare local symbol."""
    rules = []
    for rule in base.rules:
        projection = np.array(
            [rule.local_size] * extra + [rule.local(s) for s in range(len(base.alphabet))],
            dtype=np.int64,
        )
        rules.append(ShapeRule(rule.offsets, rule.forbidden, rule.local_size + 1, projection))
    return rules


def _check_planar(base: SftSpec):
    if base.dim != 2:
        raise DimensionMismatchError(f"layers are built on two-dimensional bases, got dim {base.dim}")


def breaker_layer(base: SftSpec) -> SftSpec:
    """
    The base plus a breaker symbol. A breaker has only breakers above and
    below it, and two breakers are never horizontally adjacent. Base rules
    never see a breaker.
    """
    _check_planar(base)
    alphabet = Alphabet((BREAKER,) + base.alphabet.symbols)
    size = len(alphabet)
    rules = _lift(base, 1)
    rules.append(_pair_rule(NORTH, size, lambda b, u: (b == 0) != (u == 0)))
    rules.append(_pair_rule(EAST, size, lambda left, right: left == 0 and right == 0))
    return SftSpec(2, alphabet, rules=rules, name=f"breaker({base.name or 'base'})")


@dataclass(frozen=True)
class CounterSymbol:
    digit: int | None  # None on the carry column
    carry: int
    zero: int
    mark: str

    @property
    def token(self) -> str:
        if self.digit is None:
            return CARRY[self.mark]
        return f"d{self.digit}c{self.carry}z{self.zero}{self.mark}"


def counter_symbols(k: int) -> list[CounterSymbol]:
    """
    Digits with their incoming carry, a flag for "every digit from the carry
    column up to here is 0" and the row mark; then the two carry symbols.
    """
    out = []
    for a in range(k):
        for carry in (0, 1):
            for zero in ((0, 1) if a == 0 else (0,)):
                for mark in (MARKED, EMPTY):
                    out.append(CounterSymbol(a, carry, zero, mark))
    out += [CounterSymbol(None, 1, 0, MARKED), CounterSymbol(None, 1, 0, EMPTY)]
    return out


def counter_layer(k: int) -> SftSpec:
    """
    Base-k counter, least significant digit next to the carry column on its
    left. Every row holds the previous row plus one; the row whose value is
    zero is marked, with the mark shared by the whole row.
    """
    transducer = Transducer.increment(k)
    symbols = counter_symbols(k)
    size = len(symbols)

    def horizontal(i: int, j: int) -> bool:
        left, right = symbols[i], symbols[j]
        if left.mark != right.mark:
            return True
        if left.digit is None and right.digit is None:
            return True
        if right.digit is not None:
            if left.digit is None:
                carry, zero = 1, int(right.digit == 0)
            else:
                carry = transducer.step(left.carry, left.digit)[0]
                zero = int(right.digit == 0 and left.zero == 1)
            return (right.carry, right.zero) != (carry, zero)
        return left.zero != int(left.mark == MARKED)

    def vertical(i: int, j: int) -> bool:
        below, above = symbols[i], symbols[j]
        if below.digit is None or above.digit is None:
            return (below.digit is None) != (above.digit is None)
        return above.digit != transducer.step(below.carry, below.digit)[1]

    rules = [_pair_rule(EAST, size, horizontal), _pair_rule(NORTH, size, vertical)]
    return SftSpec(2, Alphabet(s.token for s in symbols), rules=rules, name=f"counter({k})")


def decode_counter_row(tokens: Sequence[str], k: int) -> int | None:
    """Value of the digits right of the first carry symbol, or None without one."""
    symbols = {s.token: s for s in counter_symbols(k)}
    row = [symbols[t] for t in tokens]
    starts = [i for i, s in enumerate(row) if s.digit is None]
    if not starts:
        return None
    value, scale = 0, 1
    i = starts[0] + 1
    while row[i % len(row)].digit is not None:
        value += row[i % len(row)].digit * scale
        scale *= k
        i += 1
    return value


def sync_layer(tokens: Iterable[str]) -> SftSpec:
    """
    One base symbol per row, constant along the row, with a bar on breaker
    cells, a gate right after each bar and copies up to the next bar.
    """
    tokens = list(tokens)
    symbols = [(role, w) for w in tokens for role in ROLES]
    size = len(symbols)

    def horizontal(i: int, j: int) -> bool:
        (left, wl), (right, wr) = symbols[i], symbols[j]
        if wl != wr:
            return True
        if left == "bar":
            return right != "gate"
        return right not in ("copy", "bar")

    rules = [_pair_rule(EAST, size, horizontal)]
    return SftSpec(2, Alphabet(f"{role}.{w}" for role, w in symbols), rules=rules, name="sync")


def y_k(k: int, base: SftSpec | None = None) -> LayerBundle:
    """
    Breaker layer A, counter C_k and sync layer T over the same cells.

    Breakers carry the carry column and the bar; white cells carry digits,
    with the gate of T recording the white symbol right of a breaker.
    """
    if base is None:
        base = east_deterministic_base()
    _check_planar(base)
    with tracer.start_as_current_span("y_k") as span:
        span.set_attribute("counter.k", k)
        a_layer = breaker_layer(base)
        c_layer = counter_layer(k)
        t_layer = sync_layer(base.alphabet)
        whites = list(base.alphabet)
        digits = [c_layer.symbol(s.token) for s in counter_symbols(k) if s.digit is not None]
        brk = a_layer.symbol(BREAKER)
        allowed = []
        for mark in (MARKED, EMPTY):
            for w in whites:
                allowed.append((brk, c_layer.symbol(CARRY[mark]), t_layer.symbol(f"bar.{w}")))
        for u in whites:
            white = a_layer.symbol(u)
            for digit in digits:
                allowed.append((white, digit, t_layer.symbol(f"gate.{u}")))
                for w in whites:
                    allowed.append((white, digit, t_layer.symbol(f"copy.{w}")))
        span.set_attribute("bundle.allowed", len(allowed))
        logger.info(f"y_k({k}): {len(allowed)} superimposed symbols over {len(whites)} base symbols")
        return LayerBundle((a_layer, c_layer, t_layer), tuple(allowed), ("A", "C", "T"))


def grid_layer(base: SftSpec) -> SftSpec:
    """
    The base plus breaker, horline and corner symbols drawing a grid of
    squares: breakers stack vertically between corners, horlines run
    horizontally between corners, and corners join the two.
    """
    _check_planar(base)
    alphabet = Alphabet((BREAKER, HORLINE, CORNER) + base.alphabet.symbols)
    brk, hor, cor = 0, 1, 2
    size = len(alphabet)

    def vertical(b: int, u: int) -> bool:
        return (
            (b == brk and u not in (brk, cor))
            or (u == brk and b not in (brk, cor))
            or (b == cor and u != brk)
            or (u == cor and b != brk)
        )

    def horizontal(left: int, right: int) -> bool:
        return (
            (left == hor and right not in (hor, cor))
            or (right == hor and left not in (hor, cor))
            or (left == cor and right != hor)
            or (right == cor and left != hor)
        )

    rules = _lift(base, 3)
    rules.append(_pair_rule(NORTH, size, vertical))
    rules.append(_pair_rule(EAST, size, horizontal))
    return SftSpec(2, alphabet, rules=rules, name=f"grid({base.name or 'base'})")


def skeleton_cells(k: int, p: int, background: TorusConfig) -> list[list[tuple[str, str, str]]]:
    """
    A, C and T tokens of one y_k rectangle, indexed cells[x][y]: a breaker
    column, then p - 1 white columns repeating `background`, for k^(p-1)
    rows with row y counting y.

    `background` is p - 1 columns wide and its height divides k^(p-1); base
    rules only ever see its interior, never the wrap around the breaker.
    """
    if p < 2:
        raise ValueError(f"rectangles are at least 2 wide, got {p}")
    height = k ** (p - 1)
    width, repeat = background.dims
    if width != p - 1 or height % repeat:
        raise ValueError(
            f"background of dims {background.dims} does not fit a {p} x {height} rectangle"
        )
    symbols = {(s.digit, s.carry, s.zero, s.mark): s.token for s in counter_symbols(k)}
    cells: list[list[tuple[str, str, str]]] = [[] for _ in range(p)]
    for y in range(height):
        mark = MARKED if y == 0 else EMPTY
        gate = background.token_at((0, y))
        cells[0].append((BREAKER, CARRY[mark], f"bar.{gate}"))
        carry, zero = 1, 1
        for x in range(1, p):
            digit = (y // k ** (x - 1)) % k
            zero = int(zero == 1 and digit == 0)
            role = "gate" if x == 1 else "copy"
            token = symbols[(digit, carry, zero, mark)]
            cells[x].append((background.token_at((x - 1, y)), token, f"{role}.{gate}"))
            carry = int(carry == 1 and digit == k - 1)
    return cells
