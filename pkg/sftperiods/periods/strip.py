"""
Strip graphs.

For a period (m, n) with m >= |n|, configurations having (m, n) as a period
are the bi-infinite walks of a finite graph: vertices are the admissible
(m, n)-periodic fillings of the strip 0 <= -n*x + m*y < 4rm, and P -> P' is an
edge when P with P' stacked 4r rows above it is admissible.
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from sftperiods.errors import DimensionMismatchError, VertexCapExceeded
from sftperiods.opentelemetry_config import get_tracer
from sftperiods.periods.budget import SATURATED, SearchBudget, SearchMeter
from sftperiods.periods.solver import StripDomain, TilingSolver
from sftperiods.sft.model import Pattern, SftSpec, TorusConfig

logger = logging.getLogger(__name__)
tracer = get_tracer("sftperiods.strip")

Strip = tuple[int, ...]


def strip_radius(sft: SftSpec) -> int:
    return max(1, sft.radius)


@dataclass
class StripGraph:
    sft: SftSpec
    m: int
    n: int
    r: int
    domain: StripDomain
    vertices: list[Strip]
    graph: nx.DiGraph = field(repr=False)

    @property
    def edges(self) -> list[tuple[int, int]]:
        return sorted(self.graph.edges())

    def is_periodic(self, vertex: int, shift: tuple[int, int]) -> bool:
        """Whether the strip filling is invariant under translation by `shift`."""
        pattern = self.vertices[vertex]
        for i, (x, y) in enumerate(self.domain.cells):
            other = self.domain.cell_of((x + shift[0], y + shift[1]))
            if other is None or pattern[other] != pattern[i]:
                return False
        return True

    def label(self, vertex: int) -> str:
        return " ".join(self.sft.alphabet[s] for s in self.vertices[vertex])

    def to_dot(self) -> str:
        """DOT text; each vertex is labelled by its flattened strip pattern."""
        export = nx.DiGraph(name=f"strip_{self.m}_{self.n}")
        for v in range(len(self.vertices)):
            export.add_node(f"v{v}", label=f'"{self.label(v)}"')
        for a, b in self.edges:
            export.add_edge(f"v{a}", f"v{b}")
        return nx.nx_pydot.to_pydot(export).to_string()

    def band_rows(self, vertex: int) -> np.ndarray:
        """Horizontal strips only: the filling as an (m, 4r) array."""
        if self.n != 0:
            raise ValueError("band_rows needs a horizontal strip")
        return np.asarray(self.vertices[vertex], dtype=np.int64).reshape(self.m, 4 * self.r)


def vertical_companion_bound(sft: SftSpec, m: int) -> int:
    """|alphabet|^(4rm), the bound on a companion vertical period; saturates."""
    if m < 1:
        raise ValueError(f"m must be positive, got {m}")
    exponent = 4 * strip_radius(sft) * m
    size = len(sft.alphabet)
    if size == 1:
        return 1
    if exponent > 63:
        return SATURATED
    return min(size**exponent, SATURATED)


def build_strip_graph(
    sft: SftSpec,
    m: int,
    n: int,
    budget: SearchBudget | SearchMeter,
    max_vertices: int | None = None,
) -> StripGraph:
    """Build the strip graph for (m, n). Raises BudgetExhausted past `max_vertices` or the node budget."""
    if sft.dim != 2:
        raise DimensionMismatchError("strip graphs are defined for two-dimensional specs")
    if (m, n) == (0, 0):
        raise ValueError("the period (0, 0) is not allowed")
    if m < abs(n):
        raise ValueError(f"strip graphs need m >= |n|, got ({m}, {n})")
    meter = budget if isinstance(budget, SearchMeter) else SearchMeter(budget)
    r = strip_radius(sft)
    with tracer.start_as_current_span("build_strip_graph") as span:
        span.set_attribute("strip.m", m)
        span.set_attribute("strip.n", n)
        strip = StripDomain(m, n, r, blocks=1)
        vertices: list[Strip] = []
        for solution in TilingSolver(sft, strip).solutions(meter):
            vertices.append(solution)
            if max_vertices is not None and len(vertices) > max_vertices:
                raise VertexCapExceeded(
                    f"strip graph ({m},{n}) has more than {max_vertices} vertices",
                    nodes=meter.nodes,
                    seconds=meter.elapsed,
                )
        index = {v: i for i, v in enumerate(vertices)}
        double = StripDomain(m, n, r, blocks=2)
        lower, upper = double.lower(), double.upper()
        glue = TilingSolver(sft, double)
        graph = nx.DiGraph()
        graph.add_nodes_from(range(len(vertices)))
        for i, vertex in enumerate(vertices):
            with tracer.start_as_current_span("strip_graph.successors"):
                pins = dict(zip(lower, vertex, strict=True))
                for solution in glue.solutions(meter, fixed=pins):
                    graph.add_edge(i, index[tuple(solution[c] for c in upper)])
            logger.debug(f"strip graph progress: vertex {i + 1}/{len(vertices)}")
        span.set_attribute("strip.vertices", len(vertices))
        span.set_attribute("strip.edges", graph.number_of_edges())
        logger.info(
            f"strip graph ({m},{n}): {len(vertices)} vertices, "
            f"{graph.number_of_edges()} edges, {meter.nodes} nodes"
        )
        return StripGraph(sft, m, n, r, strip, vertices, graph)


def nontrivial_components(graph: nx.DiGraph) -> list[list[int]]:
    """Strongly connected components carrying a cycle, each sorted, in order of least vertex."""
    found = []
    for component in nx.strongly_connected_components(graph):
        members = sorted(component)
        if len(members) > 1 or graph.has_edge(members[0], members[0]):
            found.append(members)
    return sorted(found)


def closed_walk(graph: nx.DiGraph, through: Sequence[int]) -> list[int]:
    """
    A closed walk visiting every vertex of `through` in order (same component).

    Returned as the vertex sequence without repeating the start at the end.
    """
    stops = list(dict.fromkeys(through))
    if len(stops) == 1:
        start = stops[0]
        if graph.has_edge(start, start):
            return [start]
        nxt = min(s for s in graph.successors(start) if nx.has_path(graph, s, start))
        return [start] + nx.shortest_path(graph, nxt, start)[:-1]
    walk: list[int] = []
    for a, b in zip(stops, stops[1:] + stops[:1], strict=True):
        walk.extend(nx.shortest_path(graph, a, b)[:-1])
    return walk


def walk_to_torus(strips: StripGraph, walk: Sequence[int]) -> TorusConfig:
    """Stack the strips of a closed walk of the (m, 0) strip graph into an m x (4r * len(walk)) torus."""
    if strips.n != 0:
        raise ValueError("walk_to_torus needs a horizontal strip graph")
    band = 4 * strips.r
    cells = np.empty((strips.m, band * len(walk)), dtype=np.int64)
    for i, vertex in enumerate(walk):
        cells[:, i * band : (i + 1) * band] = strips.band_rows(vertex)
    return TorusConfig(strips.sft.alphabet, cells)


def walk_to_window(strips: StripGraph, walk: Sequence[int], repeats: int = 2) -> Pattern:
    """
    The finite pattern of a walk: strip i lifted by (0, 4r*i), each repeated
    `repeats` times along the period (m, n).
    """
    band = 4 * strips.r
    cells = {}
    for i, vertex in enumerate(walk):
        for (x, y), symbol in zip(strips.domain.cells, strips.vertices[vertex], strict=True):
            for k in range(repeats):
                cells[(x + k * strips.m, y + k * strips.n + i * band)] = symbol
    return Pattern.from_mapping(cells)
