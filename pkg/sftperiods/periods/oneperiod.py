"""
1-periods: configurations whose period lattice is generated by one vector.

Such a configuration with period (m, n) is a bi-infinite walk of the (m, n) strip graph
that is eventually a cycle on both sides without being a single cycle, and
that visits, for each prime p dividing gcd(m, n), a strip that is not
(m/p, n/p)-periodic.
"""

import logging
import math
from collections import deque
from collections.abc import Sequence
from dataclasses import dataclass

import networkx as nx
import numpy as np

from sftperiods.errors import BudgetExhausted, DimensionMismatchError
from sftperiods.opentelemetry_config import get_tracer
from sftperiods.periods.budget import SearchBudget, SearchMeter, Verdict, WitnessReport
from sftperiods.periods.lattice import prime_factors
from sftperiods.periods.strip import (
    StripGraph,
    build_strip_graph,
    closed_walk,
    nontrivial_components,
    walk_to_window,
)
from sftperiods.sft.model import Pattern, SftSpec
from sftperiods.sft.ops import (
    permutation_matrix,
    reflection_matrix,
    transform_pattern,
    transform_spec,
)

logger = logging.getLogger(__name__)
tracer = get_tracer("sftperiods.oneperiod")


def normalize_direction(m: int, n: int) -> tuple[np.ndarray, tuple[int, int]]:
    """
    A unimodular M and (m', n') = +-M (m, n) with m' >= n' >= 0.

    The spec must be transformed by M too; witnesses map back through M^-1.
    """
    if (m, n) == (0, 0):
        raise ValueError("the period (0, 0) is not allowed")
    matrix = np.eye(2, dtype=np.int64)
    if abs(n) > abs(m):
        swap = np.asarray(permutation_matrix((1, 0)), dtype=np.int64)
        matrix = swap @ matrix
        m, n = n, m
    if m < 0:
        m, n = -m, -n
    if n < 0:
        mirror = np.asarray(reflection_matrix(2, 0), dtype=np.int64)
        matrix = mirror @ matrix
        m, n = m, -n
    return matrix, (m, n)


@dataclass
class OnePeriodWitness:
    """
    An eventually periodic walk: `lead` repeated forever to the left, then
    `bridge`, then `tail` repeated forever to the right.
    """

    strips: StripGraph
    lead: list[int]
    bridge: list[int]
    tail: list[int]
    transform: np.ndarray
    period: tuple[int, int]

    def walk(self) -> list[int]:
        """u_0 ... u_k with u_i = u_0 closing the lead and u_k = u_j closing the tail."""
        return self.lead + [self.lead[0]] + self.bridge + self.tail + [self.tail[0]]

    def window(self, repeats: int = 2) -> Pattern:
        """A finite piece of the configuration, in the original coordinates."""
        # The lead cycle closes on lead[0] before the bridge leaves it.
        sequence = self.lead * repeats + [self.lead[0]] + self.bridge + self.tail * repeats
        pattern = walk_to_window(self.strips, sequence, repeats=repeats)
        inverse = np.rint(np.linalg.inv(self.transform)).astype(np.int64)
        return transform_pattern(pattern, inverse.tolist())


def vertex_masks(strips: StripGraph) -> tuple[list[int], int]:
    """Per vertex, the bit set of primes p for which it is not (m/p, n/p)-periodic."""
    primes = prime_factors(math.gcd(strips.m, strips.n))
    masks = []
    for v in range(len(strips.vertices)):
        mask = 0
        for bit, p in enumerate(primes):
            if not strips.is_periodic(v, (strips.m // p, strips.n // p)):
                mask |= 1 << bit
        masks.append(mask)
    return masks, (1 << len(primes)) - 1


def satisfies_path_conditions(walk: Sequence[int], masks: Sequence[int], full: int) -> bool:
    """
    The four path conditions on u_0 ... u_k: u_i = u_0 for some 0 < i < k;
    u_{i+1} != u_1; u_j = u_k for some i <= j < k; every prime bit is set by
    some u_l.
    """
    k = len(walk) - 1
    union = 0
    for u in walk:
        union |= masks[u]
    if union != full:
        return False
    for i in range(1, k):
        if walk[i] != walk[0] or walk[i + 1] == walk[1]:
            continue
        if any(walk[j] == walk[k] for j in range(i, k)):
            return True
    return False


# Phases of a walk u_0 ... u_k read left to right: i not yet fixed, i fixed
# but j not yet fixed, both fixed (the state then remembers u_j).
_BEFORE_I, _BEFORE_J, _CLOSING = 0, 1, 2


def one_period_by_walks(strips: StripGraph, max_length: int) -> list[int] | None:
    """
    Shortest walk u_0 ... u_k with k <= `max_length` meeting the path conditions.

    Breadth first over (vertex, phase, u_j, prime bits) for each choice of
    u_0 and u_1. Independent of the component analysis `one_period` uses, so
    the two can be checked against each other.
    """
    masks, full = vertex_masks(strips)
    graph = strips.graph
    best: list[int] | None = None
    for u0 in sorted(graph.nodes()):
        for u1 in sorted(graph.successors(u0)):
            start = (u1, _BEFORE_I, -1, masks[u0] | masks[u1])
            parent: dict[tuple[int, int, int, int], tuple[int, int, int, int] | None] = {start: None}
            frontier = [start]
            found = None
            for _ in range(max_length - 1):
                if found is not None or not frontier:
                    break
                following = []
                for state in frontier:
                    v, phase, anchor, mask = state
                    for w in sorted(graph.successors(v)):
                        bits = mask | masks[w]
                        moves = []
                        if phase == _BEFORE_I:
                            moves.append((w, _BEFORE_I, -1, bits))
                            if v == u0 and w != u1:
                                moves.append((w, _BEFORE_J, -1, bits))
                                moves.append((w, _CLOSING, u0, bits))
                        elif phase == _BEFORE_J:
                            moves.append((w, _BEFORE_J, -1, bits))
                            moves.append((w, _CLOSING, v, bits))
                        else:
                            moves.append((w, _CLOSING, anchor, bits))
                        for nxt in moves:
                            if nxt in parent:
                                continue
                            parent[nxt] = state
                            following.append(nxt)
                            if nxt[1] == _CLOSING and nxt[0] == nxt[2] and nxt[3] == full:
                                found = nxt
                                break
                        if found is not None:
                            break
                    if found is not None:
                        break
                frontier = following
            if found is None:
                continue
            walk = []
            here = found
            while here is not None:
                walk.append(here[0])
                here = parent[here]
            walk.append(u0)
            walk.reverse()
            if best is None or len(walk) < len(best):
                best = walk
    return best


def _closed_walk_from(graph: nx.DiGraph, start: int, first: int, stops: Sequence[int]) -> list[int]:
    """Closed walk start -> first -> ... visiting `stops` ... -> start, without the final start."""
    walk = [start]
    here = first
    for stop in list(stops) + [start]:
        path = nx.shortest_path(graph, here, stop)
        walk.extend(path[:-1])
        here = stop
    return walk


def _rich_witness(strips, components, masks, full):
    graph = strips.graph
    for component in components:
        members = set(component)
        edges = sum(1 for a in component for b in graph.successors(a) if b in members)
        if edges <= len(component):
            continue
        union = 0
        for v in component:
            union |= masks[v]
        if union != full:
            continue
        for a in component:
            succ = sorted(b for b in graph.successors(a) if b in members)
            if len(succ) < 2:
                continue
            s1, s2 = succ[0], succ[1]
            lead = _closed_walk_from(graph, a, s1, component)
            bridge = nx.shortest_path(graph, s2, a)[:-1]
            return lead, bridge, list(lead)
    return None


def _chain_witness(strips, components, masks, full):
    """
    A walk leaving one nontrivial component for a different one. Breadth
    first over (vertex, prime bits seen) so the bits collected on the way
    count toward the full mask.
    """
    graph = strips.graph
    owner = {v: i for i, component in enumerate(components) for v in component}
    comp_masks = []
    for component in components:
        mask = 0
        for v in component:
            mask |= masks[v]
        comp_masks.append(mask)
    for source, component in enumerate(components):
        parent: dict[tuple[int, int], tuple[int, int] | None] = {}
        origin: dict[tuple[int, int], int] = {}
        queue: deque[tuple[int, int]] = deque()
        for a in component:
            for b in sorted(graph.successors(a)):
                state = (b, comp_masks[source] | masks[b])
                if owner.get(b) == source or state in parent:
                    continue
                parent[state] = None
                origin[state] = a
                queue.append(state)
        while queue:
            state = queue.popleft()
            v, mask = state
            target = owner.get(v)
            if target is not None and mask | comp_masks[target] == full:
                path = []
                here: tuple[int, int] | None = state
                while here is not None:
                    path.append(here[0])
                    first = here
                    here = parent[here]
                path.reverse()
                a = origin[first]
                lead = closed_walk(graph, [a] + [u for u in component if u != a])
                tail = closed_walk(graph, [v] + [u for u in components[target] if u != v])
                return lead, path[:-1], tail
            for w in sorted(graph.successors(v)):
                nxt = (w, mask | masks[w])
                if nxt not in parent:
                    parent[nxt] = state
                    queue.append(nxt)
    return None


def one_period(
    sft: SftSpec, m: int, n: int, budget: SearchBudget, mutual_cycles: bool = False
) -> WitnessReport:
    """
    Decide whether (m, n) is a 1-period of some configuration.

    With `mutual_cycles`, only walks whose two cycles lie in one strongly
    connected component are accepted.
    """
    if sft.dim != 2:
        raise DimensionMismatchError("1-periods are defined for two-dimensional specs")
    matrix, (mm, nn) = normalize_direction(m, n)
    oriented = transform_spec(sft, matrix.tolist())
    with tracer.start_as_current_span("one_period") as span:
        span.set_attribute("period", f"{m},{n}")
        span.set_attribute("mutual_cycles", mutual_cycles)
        meter = SearchMeter(budget)
        try:
            strips = build_strip_graph(oriented, mm, nn, meter)
        except BudgetExhausted as e:
            return WitnessReport.unknown(e, f"1-period ({m},{n})")
        masks, full = vertex_masks(strips)
        components = nontrivial_components(strips.graph)
        found = _rich_witness(strips, components, masks, full)
        if found is None and not mutual_cycles:
            found = _chain_witness(strips, components, masks, full)
        span.set_attribute("strip.vertices", len(strips.vertices))
        if found is None:
            span.set_attribute("search.verdict", Verdict.NO.value)
            return WitnessReport(
                Verdict.NO,
                None,
                meter.stats(),
                f"strip graph ({mm},{nn}) has no admissible eventually periodic walk",
            )
        lead, bridge, tail = found
        witness = OnePeriodWitness(strips, lead, bridge, tail, matrix, (m, n))
        if not satisfies_path_conditions(witness.walk(), masks, full):
            raise AssertionError(f"constructed walk {witness.walk()} fails the path conditions")
        span.set_attribute("search.verdict", Verdict.YES.value)
        logger.info(f"1-period ({m},{n}): walk of length {len(witness.walk())}")
        return WitnessReport(Verdict.YES, witness, meter.stats(), f"walk {witness.walk()}")
