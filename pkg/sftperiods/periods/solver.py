"""
Backtracking search for valid fillings of finite periodic domains.

A domain is a finite set of cells (a torus, the fundamental domain of a
lattice, or a strip of the plane modulo one period) together with the
placements of every forbidden shape inside it. The solver assigns symbols in
increasing cell order, values ascending, so solutions come out in
lexicographic order. Domains are int bitmasks; when a placement has a single
unassigned cell left, the symbols completing a forbidden tuple are struck from
that cell's domain, and singleton domains are assigned at once.
"""

import logging
from collections.abc import Iterator
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from sftperiods.errors import BudgetExhausted
from sftperiods.opentelemetry_config import get_tracer
from sftperiods.periods.budget import SearchMeter
from sftperiods.periods.lattice import PeriodGroup
from sftperiods.sft.model import SftSpec, Vec

logger = logging.getLogger(__name__)
tracer = get_tracer("sftperiods.solver")

Placement = tuple[int, tuple[int, ...]]

_RESTORE_DOMAIN = 0
_UNASSIGN = 1
_RELEASE = 2


class SearchDomain:
    """Cells in a fixed order plus a rule of which placements lie inside."""

    cells: list[Vec]

    @property
    def size(self) -> int:
        return len(self.cells)

    def placements(self, sft: SftSpec) -> list[Placement]:
        raise NotImplementedError


class LatticeDomain(SearchDomain):
    """Z^d modulo a full-rank lattice; cells are the pivot box in lexicographic order."""

    def __init__(self, group: PeriodGroup):
        if not group.is_full_rank:
            raise ValueError(f"lattice {group} is not of full rank")
        self.group = group
        self.cells = list(group.box())
        self._index = {v: i for i, v in enumerate(self.cells)}

    @classmethod
    def torus(cls, dims) -> "LatticeDomain":
        return cls(PeriodGroup.torus(dims))

    def cell_of(self, vec: Vec) -> int:
        return self._index[self.group.reduce(vec)]

    def placements(self, sft: SftSpec) -> list[Placement]:
        out = []
        for index, rule in enumerate(sft.rules):
            if not rule.forbidden:
                continue
            for anchor in self.cells:
                out.append(
                    (
                        index,
                        tuple(
                            self.cell_of(tuple(a + o for a, o in zip(anchor, off, strict=True)))
                            for off in rule.offsets
                        ),
                    )
                )
        return out


class StripDomain(SearchDomain):
    """
    The strip 0 <= -n*x + m*y < 4*r*m*blocks modulo the period (m, n).

    Cells are listed x-major, y ascending, with x in [0, m). For blocks=2 the
    first 4r cells of each column are the lower strip and the next 4r its copy
    shifted by (0, 4r).
    """

    def __init__(self, m: int, n: int, r: int, blocks: int = 1):
        if m < 1 or m < abs(n):
            raise ValueError(f"strip needs m >= |n| and m >= 1, got ({m}, {n})")
        self.m = m
        self.n = n
        self.r = max(1, r)
        self.blocks = blocks
        self.band = 4 * self.r
        self.cells = [
            (x, self.floor_y(x) + k) for x in range(m) for k in range(self.band * blocks)
        ]
        self._index = {v: i for i, v in enumerate(self.cells)}

    def floor_y(self, x: int) -> int:
        """Lowest y of column x inside the strip."""
        return -((-self.n * x) // self.m)

    def canonical(self, vec: Vec) -> Vec:
        x, y = vec
        q = x // self.m
        return (x - q * self.m, y - q * self.n)

    def cell_of(self, vec: Vec) -> int | None:
        return self._index.get(self.canonical(vec))

    def lower(self) -> list[int]:
        stride = self.band * self.blocks
        return [x * stride + k for x in range(self.m) for k in range(self.band)]

    def upper(self) -> list[int]:
        stride = self.band * self.blocks
        return [x * stride + self.band + k for x in range(self.m) for k in range(self.band)]

    def placements(self, sft: SftSpec) -> list[Placement]:
        out = []
        slack = self.band + 2 * abs(self.n) + 2
        for index, rule in enumerate(sft.rules):
            if not rule.forbidden:
                continue
            for x in range(self.m):
                base = self.floor_y(x)
                for y in range(base - slack, base + self.band * self.blocks + slack):
                    cells = [self.cell_of((x + ox, y + oy)) for ox, oy in rule.offsets]
                    if all(c is not None for c in cells):
                        out.append((index, tuple(cells)))
        return out


@dataclass
class _Subtree:
    solutions: list[tuple[int, tuple[int, ...]]] = field(default_factory=list)
    nodes: int = 0
    exhausted: bool = False


class TilingSolver:
    """Enumerates valid fillings of one domain; `fixed` pins cells to symbols."""

    def __init__(self, sft: SftSpec, domain: SearchDomain, fixed: dict[int, int] | None = None):
        self.sft = sft
        self.domain = domain
        self.fixed = dict(fixed or {})
        self.symbols = len(sft.alphabet)
        self.full = (1 << self.symbols) - 1
        self.p_rule: list[int] = []
        self.p_cells: list[tuple[int, ...]] = []
        self.p_distinct: list[tuple[int, ...]] = []
        self.cell_places: list[list[int]] = [[] for _ in range(domain.size)]
        for rule_index, cells in domain.placements(sft):
            p = len(self.p_rule)
            distinct = tuple(dict.fromkeys(cells))
            self.p_rule.append(rule_index)
            self.p_cells.append(cells)
            self.p_distinct.append(distinct)
            for c in distinct:
                self.cell_places[c].append(p)
        self.projections = [rule.projection_list for rule in sft.rules]
        self.completions = [rule.completion_masks(self.symbols) for rule in sft.rules]

    # -- state ---------------------------------------------------------------

    def _fresh(self) -> "_State":
        return _State(self)

    def _root(self, fixed: dict[int, int] | None = None) -> "_State | None":
        state = self._fresh()
        for p, distinct in enumerate(self.p_distinct):
            if len(distinct) == 1 and not state.filter_unary(p):
                return None
        pins = self.fixed if fixed is None else {**self.fixed, **fixed}
        for cell, symbol in sorted(pins.items()):
            if not state.assign(cell, symbol):
                return None
        state.trail.clear()
        return state

    # -- search --------------------------------------------------------------

    def solutions(
        self, meter: SearchMeter, threads: int = 1, fixed: dict[int, int] | None = None
    ) -> Iterator[tuple[int, ...]]:
        """Valid fillings in lexicographic order; raises BudgetExhausted when the meter runs out."""
        state = self._root(fixed)
        if state is None:
            return
        first = state.next_cell(0)
        if first is None:
            yield tuple(state.val)
            return
        if threads > 1:
            yield from self._threaded(state, first, meter, threads, fixed)
            return
        yield from state.dfs(first, meter, stamps=None)

    def count(self, meter: SearchMeter, threads: int = 1) -> int:
        return sum(1 for _ in self.solutions(meter, threads))

    def first(self, meter: SearchMeter) -> tuple[int, ...] | None:
        return next(iter(self.solutions(meter)), None)

    def _run_subtree(
        self, cell: int, value: int, meter: SearchMeter, fixed: dict[int, int] | None
    ) -> _Subtree:
        result = _Subtree()
        with tracer.start_as_current_span("solver.subtree") as span:
            span.set_attribute("solver.cell", cell)
            span.set_attribute("solver.value", value)
            state = self._root(fixed)
            local = meter
            if state is not None and state.assign(cell, value):
                nxt = state.next_cell(cell + 1)
                try:
                    if nxt is None:
                        result.solutions.append((0, tuple(state.val)))
                    else:
                        for _ in state.dfs(nxt, local, stamps=result.solutions):
                            pass
                except BudgetExhausted:
                    result.exhausted = True
            result.nodes = local.nodes
            span.set_attribute("search.nodes", result.nodes)
        return result

    def _threaded(self, state: "_State", cell: int, meter: SearchMeter, threads: int, fixed):
        values = [v for v in range(self.symbols) if (state.dom[cell] >> v) & 1]
        remaining = meter.remaining
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [
                pool.submit(self._run_subtree, cell, v, meter.child(remaining), fixed) for v in values
            ]
            results = [f.result() for f in futures]
        # Replay the sequential node count so output does not depend on `threads`.
        for result in results:
            meter.consume(1, "solver")
            base = meter.nodes
            for stamp, solution in result.solutions:
                if base + stamp > meter.max_nodes:
                    raise meter.exhausted("solver")
                yield solution
            if result.exhausted:
                meter.nodes = meter.max_nodes
                raise meter.exhausted("solver")
            meter.consume(result.nodes, "solver")


class _State:
    __slots__ = ("solver", "dom", "val", "cnt", "trail")

    def __init__(self, solver: TilingSolver):
        self.solver = solver
        self.dom = [solver.full] * solver.domain.size
        self.val = [-1] * solver.domain.size
        self.cnt = [len(d) for d in solver.p_distinct]
        self.trail: list[tuple[int, int, int]] = []

    def next_cell(self, start: int) -> int | None:
        val = self.val
        for c in range(start, len(val)):
            if val[c] < 0:
                return c
        return None

    def undo(self, mark: int):
        trail = self.trail
        while len(trail) > mark:
            kind, a, b = trail.pop()
            if kind == _RESTORE_DOMAIN:
                self.dom[a] = b
            elif kind == _UNASSIGN:
                self.val[a] = -1
            else:
                self.cnt[a] += 1

    def _allowed_by_testing(self, p: int, u: int) -> int:
        """Values of u consistent with placement p, testing each candidate."""
        solver = self.solver
        rule = solver.sft.rules[solver.p_rule[p]]
        cells = solver.p_cells[p]
        allowed = 0
        mask = self.dom[u]
        while mask:
            low = mask & -mask
            mask ^= low
            v = low.bit_length() - 1
            symbols = [v if c == u else self.val[c] for c in cells]
            if not rule.forbids(symbols):
                allowed |= low
        return allowed

    def filter_unary(self, p: int) -> bool:
        u = self.solver.p_distinct[p][0]
        nd = self.dom[u] & self._allowed_by_testing(p, u)
        self.dom[u] = nd
        return nd != 0

    def _allowed(self, p: int) -> tuple[int, int]:
        solver = self.solver
        distinct = solver.p_distinct[p]
        u = next(c for c in distinct if self.val[c] < 0)
        cells = solver.p_cells[p]
        if len(distinct) != len(cells):
            return u, self._allowed_by_testing(p, u)
        rule = solver.p_rule[p]
        proj = solver.projections[rule]
        j = cells.index(u)
        if proj is None:
            others = tuple(self.val[c] for i, c in enumerate(cells) if i != j)
        else:
            others = tuple(proj[self.val[c]] for i, c in enumerate(cells) if i != j)
        forbidden = solver.completions[rule].get((j, others), 0)
        return u, solver.full & ~forbidden

    def assign(self, cell: int, value: int) -> bool:
        solver = self.solver
        dom, val, cnt, trail = self.dom, self.val, self.cnt, self.trail
        queue = [(cell, value)]
        while queue:
            c, v = queue.pop()
            if val[c] >= 0:
                if val[c] != v:
                    return False
                continue
            if not (dom[c] >> v) & 1:
                return False
            trail.append((_RESTORE_DOMAIN, c, dom[c]))
            dom[c] = 1 << v
            trail.append((_UNASSIGN, c, 0))
            val[c] = v
            for p in solver.cell_places[c]:
                trail.append((_RELEASE, p, 0))
                cnt[p] -= 1
                if cnt[p] != 1:
                    continue
                u, allowed = self._allowed(p)
                nd = dom[u] & allowed
                if nd == dom[u]:
                    continue
                if nd == 0:
                    return False
                trail.append((_RESTORE_DOMAIN, u, dom[u]))
                dom[u] = nd
                if nd & (nd - 1) == 0:
                    queue.append((u, nd.bit_length() - 1))
        return True

    def dfs(self, first: int, meter: SearchMeter, stamps: list | None) -> Iterator[tuple[int, ...]]:
        """
        Iterative depth-first search from the current state.

        With `stamps`, each solution is also recorded with the node count at
        which it was found.
        """
        stack = [[first, self.dom[first], len(self.trail)]]
        while stack:
            frame = stack[-1]
            cell, remaining, mark = frame
            self.undo(mark)
            if not remaining:
                stack.pop()
                continue
            low = remaining & -remaining
            frame[1] = remaining ^ low
            meter.tick("solver")
            if not self.assign(cell, low.bit_length() - 1):
                continue
            nxt = self.next_cell(cell + 1)
            if nxt is None:
                solution = tuple(self.val)
                if stamps is not None:
                    stamps.append((meter.nodes, solution))
                yield solution
                continue
            stack.append([nxt, self.dom[nxt], len(self.trail)])
        self.undo(0)
