import logging

import numpy as np

from sftperiods.config import config
from sftperiods.errors import BudgetExhausted, DimensionMismatchError, VertexCapExceeded
from sftperiods.opentelemetry_config import get_tracer
from sftperiods.periods.budget import SATURATED, SearchBudget, SearchMeter, Verdict, WitnessReport
from sftperiods.periods.lattice import divisors, prime_factors
from sftperiods.periods.search import enumerate_torus
from sftperiods.periods.strip import (
    build_strip_graph,
    closed_walk,
    nontrivial_components,
    strip_radius,
    vertical_companion_bound,
    walk_to_torus,
)
from sftperiods.sft.kernels import fixing_translations
from sftperiods.sft.model import SftSpec, TorusConfig

logger = logging.getLogger(__name__)
tracer = get_tracer("sftperiods.horizontal")

METHODS = ("auto", "graph", "torus")


def least_horizontal_period(config: TorusConfig) -> int:
    """Least k > 0 with (k, 0, ..., 0) a period of the torus."""
    dims = np.asarray(config.dims, dtype=np.int64)
    fixed = fixing_translations(config.cells.ravel(), dims)
    stride = int(np.prod(config.dims[1:]))
    width = config.dims[0]
    return next(k for k in divisors(width) if k == width or fixed[k * stride])


def torus_height_bound(sft: SftSpec, n: int) -> int:
    """
    Heights up to which a torus search is exhaustive for horizontal period n:
    4r times a closed walk through one vertex per prime factor of n.
    """
    vertices = vertical_companion_bound(sft, n)
    factor = 4 * strip_radius(sft) * max(1, len(prime_factors(n)))
    if vertices >= SATURATED // factor:
        return SATURATED
    return vertices * factor


def _by_graph(sft: SftSpec, n: int, meter: SearchMeter, max_vertices: int | None) -> WitnessReport:
    strips = build_strip_graph(sft, n, 0, meter, max_vertices=max_vertices)
    primes = prime_factors(n)
    for component in nontrivial_components(strips.graph):
        required = []
        for p in primes:
            witness = next((v for v in component if not strips.is_periodic(v, (n // p, 0))), None)
            if witness is None:
                break
            required.append(witness)
        else:
            walk = closed_walk(strips.graph, required or [component[0]])
            torus = walk_to_torus(strips, walk)
            size = len(strips.vertices)
            detail = f"closed walk of length {len(walk)} in strip graph ({n},0) ({size} vertices)"
            logger.info(f"horizontal period {n}: {detail}")
            return WitnessReport(Verdict.YES, torus, meter.stats(), detail)
    return WitnessReport(
        Verdict.NO,
        None,
        meter.stats(),
        f"no cycle of strip graph ({n},0) reaches least period {n} ({len(strips.vertices)} vertices)",
    )


def _by_torus(sft: SftSpec, n: int, meter: SearchMeter) -> WitnessReport:
    bound = torus_height_bound(sft, n)
    limit = min(bound, meter.budget.max_vertical)
    for height in range(1, limit + 1):
        with tracer.start_as_current_span("torus_search.height") as span:
            span.set_attribute("torus.height", height)
            for torus in enumerate_torus(sft, (n, height), meter):
                if least_horizontal_period(torus) == n:
                    return WitnessReport(
                        Verdict.YES, torus, meter.stats(), f"torus {n}x{height} found by direct search"
                    )
        logger.debug(f"horizontal torus search progress: height {height}/{limit}")
    if limit == bound:
        return WitnessReport(Verdict.NO, None, meter.stats(), f"all heights up to {bound} searched")
    return WitnessReport(
        Verdict.UNKNOWN,
        None,
        meter.stats(),
        f"heights up to {limit} searched, exhaustive bound is {bound}",
    )


def horizontal_period(
    sft: SftSpec, n: int, budget: SearchBudget, method: str = "auto"
) -> WitnessReport:
    """
    Decide whether some configuration has least horizontal period n.

    "graph" looks for a cycle of the (n, 0) strip graph that is not (n/p)-periodic for any
    prime p dividing n; "torus" searches n x h tori for h up to the height
    bound clamped by budget.max_vertical; "auto" builds the graph unless it
    exceeds strip_graph.max_vertices and then falls back to tori.
    """
    if sft.dim != 2:
        raise DimensionMismatchError("horizontal periods are defined for two-dimensional specs")
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}, expected one of {METHODS}")
    with tracer.start_as_current_span("horizontal_period") as span:
        span.set_attribute("period", n)
        span.set_attribute("method", method)
        meter = SearchMeter(budget)
        try:
            if method == "torus":
                report = _by_torus(sft, n, meter)
            elif method == "graph":
                report = _by_graph(sft, n, meter, None)
            else:
                cap = int(config.get("strip_graph.max_vertices", 1024))
                try:
                    report = _by_graph(sft, n, meter, cap)
                except VertexCapExceeded as e:
                    logger.info(f"{e.message}; falling back to torus search")
                    report = _by_torus(sft, n, meter)
        except BudgetExhausted as e:
            report = WitnessReport.unknown(e, f"horizontal period {n}")
        span.set_attribute("search.verdict", report.verdict.value)
        span.set_attribute("search.nodes", report.stats.nodes)
        return report
