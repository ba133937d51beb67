"""
Nondeterministic Turing machines with bounded runs.

A run starts with the head on cell 0 of a tape of `w` cells holding the input
followed by blanks. Each snapshot is one configuration; the run ends when a
halting state is reached, when no transition applies, when the head would
leave the tape, or after `t` snapshots.
"""

import logging
import re
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from enum import Enum

from sftperiods.errors import SpecParseError
from sftperiods.opentelemetry_config import get_tracer
from sftperiods.sft.textio import LineParser, content_lines, directive

logger = logging.getLogger(__name__)
tracer = get_tracer("sftperiods.tm")

MOVES = {"L": -1, "S": 0, "R": 1}

# State and symbol names end up inside tile names and edge colors.
_NAME = re.compile(r"^[A-Za-z0-9_.+-]+$")
_DELTA = re.compile(r"^(\S+)\s+(\S+)\s*->\s*(\S+)\s+(\S+)\s+(\S+)$")


@dataclass(frozen=True)
class Transition:
    state: str
    read: str
    next_state: str
    write: str
    move: str

    def __str__(self) -> str:
        return f"{self.state} {self.read} -> {self.next_state} {self.write} {self.move}"


@dataclass(frozen=True)
class TmSpec:
    states: tuple[str, ...]
    tape: tuple[str, ...]
    blank: str
    input: tuple[str, ...]
    initial: str
    halting: frozenset[str]
    delta: tuple[Transition, ...]
    name: str | None = None

    def __post_init__(self):
        for token in self.states + self.tape:
            if not _NAME.match(token):
                raise ValueError(f"invalid state or symbol name {token!r}")
        if len(set(self.states)) != len(self.states):
            raise ValueError("duplicate state")
        if len(set(self.tape)) != len(self.tape):
            raise ValueError("duplicate tape symbol")
        if self.blank not in self.tape:
            raise ValueError(f"blank {self.blank!r} is not a tape symbol")
        for a in self.input:
            if a not in self.tape:
                raise ValueError(f"input symbol {a!r} is not a tape symbol")
            if a == self.blank:
                raise ValueError("the blank cannot be an input symbol")
        if self.initial not in self.states:
            raise ValueError(f"initial state {self.initial!r} is not declared")
        for h in self.halting:
            if h not in self.states:
                raise ValueError(f"halting state {h!r} is not declared")
        for tr in self.delta:
            for q in (tr.state, tr.next_state):
                if q not in self.states:
                    raise ValueError(f"undeclared state {q!r} in {tr}")
            for a in (tr.read, tr.write):
                if a not in self.tape:
                    raise ValueError(f"undeclared symbol {a!r} in {tr}")
            if tr.move not in MOVES:
                raise ValueError(f"move must be L, R or S in {tr}")
            if tr.state in self.halting:
                raise ValueError(f"transition from halting state {tr.state!r}")

    def branches(self, state: str, symbol: str) -> list[tuple[int, Transition]]:
        """Applicable transitions with their declaration index."""
        return [
            (i, tr) for i, tr in enumerate(self.delta) if tr.state == state and tr.read == symbol
        ]

    @property
    def is_deterministic(self) -> bool:
        keys = [(tr.state, tr.read) for tr in self.delta]
        return len(keys) == len(set(keys))


def parse_tm(text: str, path: str | None = None) -> TmSpec:
    """
    Parse the `%tm` format: states:, tape:, blank:, input:, initial:, halting:
    in this order, then `delta: q a -> q' a' L|R|S` lines.
    """
    parser = LineParser(content_lines(text), path, "%tm")
    name = None
    item = parser.peek()
    if item is not None and item[1].startswith("name:"):
        name = parser.next()[1].partition(":")[2].strip() or None
    fields = {}
    numbers = {}
    for key in ("states", "tape", "blank", "input", "initial", "halting"):
        numbers[key], fields[key] = parser.expect(key)
    states = tuple(fields["states"].split())
    tape = tuple(fields["tape"].split())
    for key in ("states", "tape"):
        if not fields[key]:
            raise parser.error(f"{key}: must not be empty", numbers[key])
    for key in ("blank", "initial"):
        if len(fields[key].split()) != 1:
            raise parser.error(f"{key}: takes exactly one name", numbers[key])
    for token, where in (
        [(fields["initial"], "initial")] + [(h, "halting") for h in fields["halting"].split()]
    ):
        if token not in states:
            raise parser.error(f"undeclared state {token!r}", numbers[where])
    for token, where in (
        [(fields["blank"], "blank")] + [(a, "input") for a in fields["input"].split()]
    ):
        if token not in tape:
            raise parser.error(f"undeclared symbol {token!r}", numbers[where])

    halting = frozenset(fields["halting"].split())
    delta = []
    while parser.peek() is not None:
        number, line = parser.peek()
        parsed = directive(line)
        if parsed is None or parsed[0] != "delta":
            break
        parser.next()
        match = _DELTA.match(parsed[1])
        if match is None:
            raise parser.error(f"malformed transition {parsed[1]!r}", number)
        q, a, q2, a2, move = match.groups()
        for state in (q, q2):
            if state not in states:
                raise parser.error(f"undeclared state {state!r}", number)
        for symbol in (a, a2):
            if symbol not in tape:
                raise parser.error(f"undeclared symbol {symbol!r}", number)
        if move not in MOVES:
            raise parser.error(f"move must be L, R or S, got {move!r}", number)
        if q in halting:
            raise parser.error(f"transition from halting state {q!r}", number)
        delta.append(Transition(q, a, q2, a2, move))
    item = parser.peek()
    if item is not None:
        raise parser.error(f"unknown directive {item[1]!r}", item[0])
    try:
        return TmSpec(
            states,
            tape,
            fields["blank"],
            tuple(fields["input"].split()),
            fields["initial"],
            halting,
            tuple(delta),
            name,
        )
    except ValueError as e:
        raise SpecParseError(str(e), None, path) from None


def tm_to_text(tm: TmSpec) -> str:
    out = ["%tm"]
    if tm.name:
        out.append(f"name: {tm.name}")
    out += [
        f"states: {' '.join(tm.states)}",
        f"tape: {' '.join(tm.tape)}",
        f"blank: {tm.blank}",
        f"input: {' '.join(tm.input)}",
        f"initial: {tm.initial}",
        f"halting: {' '.join(sorted(tm.halting))}",
    ]
    out += [f"delta: {tr}" for tr in tm.delta]
    return "\n".join(out) + "\n"


class Outcome(str, Enum):
    HALTED = "halted"
    CUT = "cut"
    STUCK = "stuck"
    KILLED = "killed"


@dataclass(frozen=True)
class Snapshot:
    tape: tuple[str, ...]
    head: int
    state: str
    # Declaration index of the transition taken from here; None on the last snapshot.
    transition: int | None = None


@dataclass
class RunWitness:
    snapshots: list[Snapshot] = field(default_factory=list)
    outcome: Outcome = Outcome.CUT

    @property
    def accepted(self) -> bool:
        return self.outcome is Outcome.HALTED

    @property
    def choices(self) -> tuple[int, ...]:
        return tuple(s.transition for s in self.snapshots if s.transition is not None)

    def __len__(self) -> int:
        return len(self.snapshots)


def initial_tape(tm: TmSpec, word: Sequence[str], w: int) -> tuple[str, ...]:
    word = tuple(word)
    if len(word) > w:
        raise ValueError(f"input of length {len(word)} does not fit on {w} cells")
    for a in word:
        if a not in tm.input:
            raise ValueError(f"{a!r} is not an input symbol")
    return word + (tm.blank,) * (w - len(word))


def _runs(tm: TmSpec, start: Snapshot, t: int) -> Iterator[RunWitness]:
    stack: list[list[Snapshot] | RunWitness] = [[start]]
    while stack:
        path = stack.pop()
        if isinstance(path, RunWitness):
            yield path
            continue
        here = path[-1]
        if here.state in tm.halting:
            yield RunWitness(path, Outcome.HALTED)
            continue
        if len(path) >= t:
            yield RunWitness(path, Outcome.CUT)
            continue
        branches = tm.branches(here.state, here.tape[here.head])
        if not branches:
            yield RunWitness(path, Outcome.STUCK)
            continue
        children = []
        for index, tr in branches:
            taken = Snapshot(here.tape, here.head, here.state, index)
            head = here.head + MOVES[tr.move]
            if not 0 <= head < len(here.tape):
                children.append(RunWitness(path[:-1] + [taken], Outcome.KILLED))
                continue
            tape = here.tape[: here.head] + (tr.write,) + here.tape[here.head + 1 :]
            children.append(path[:-1] + [taken, Snapshot(tape, head, tr.next_state)])
        # Reversed so the first declared transition is explored first.
        stack.extend(reversed(children))


def run_bounded(tm: TmSpec, word: Sequence[str], t: int, w: int) -> list[RunWitness]:
    """
    Every run of at most `t` snapshots on `w` tape cells, depth first with
    transitions in declaration order.
    """
    if t < 1 or w < 1:
        raise ValueError(f"t and w must be positive, got t={t} w={w}")
    start = Snapshot(initial_tape(tm, word, w), 0, tm.initial)
    with tracer.start_as_current_span("run_bounded") as span:
        span.set_attribute("tm.t", t)
        span.set_attribute("tm.w", w)
        runs = []
        for item in _runs(tm, start, t):
            runs.append(item)
        span.set_attribute("tm.runs", len(runs))
        logger.debug(f"run_bounded: {len(runs)} runs, {sum(r.accepted for r in runs)} accepted")
        return runs


def count_accepting(tm: TmSpec, word: Sequence[str], t: int, w: int) -> int:
    return sum(1 for run in run_bounded(tm, word, t, w) if run.accepted)


def accepting_run(tm: TmSpec, word: Sequence[str], t: int, w: int) -> RunWitness | None:
    """The first accepted run in the order of run_bounded, without listing the others."""
    if t < 1 or w < 1:
        raise ValueError(f"t and w must be positive, got t={t} w={w}")
    start = Snapshot(initial_tape(tm, word, w), 0, tm.initial)
    return next((run for run in _runs(tm, start, t) if run.accepted), None)


def reachable_heads(tm: TmSpec, word: Sequence[str], t: int, w: int) -> set[int]:
    """
    Head positions of every snapshot reachable within `t` snapshots on `w`
    cells. Breadth first over distinct configurations, so branches that meet
    again are explored once.
    """
    if t < 1 or w < 1:
        raise ValueError(f"t and w must be positive, got t={t} w={w}")
    start = (initial_tape(tm, word, w), 0, tm.initial)
    seen = {start}
    frontier = [start]
    for _ in range(t - 1):
        following = []
        for tape, head, state in frontier:
            if state in tm.halting:
                continue
            for _, tr in tm.branches(state, tape[head]):
                moved = head + MOVES[tr.move]
                if not 0 <= moved < w:
                    continue
                config = (tape[:head] + (tr.write,) + tape[head + 1 :], moved, tr.next_state)
                if config not in seen:
                    seen.add(config)
                    following.append(config)
        if not following:
            break
        frontier = following
    return {head for _, head, _ in seen}
