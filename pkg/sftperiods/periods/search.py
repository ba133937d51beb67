import logging
from collections.abc import Iterator, Sequence

import numpy as np

from sftperiods.errors import DimensionMismatchError
from sftperiods.opentelemetry_config import get_tracer
from sftperiods.periods.budget import SearchBudget, SearchMeter
from sftperiods.periods.lattice import PeriodGroup
from sftperiods.periods.solver import LatticeDomain, TilingSolver
from sftperiods.sft.model import BlockCode, SftSpec, TorusConfig
from sftperiods.sft.ops import apply_block_code

logger = logging.getLogger(__name__)
tracer = get_tracer("sftperiods.search")


def _meter(budget: SearchBudget | SearchMeter) -> SearchMeter:
    return budget if isinstance(budget, SearchMeter) else SearchMeter(budget)


def enumerate_torus(
    sft: SftSpec,
    dims: Sequence[int],
    budget: SearchBudget | SearchMeter,
    threads: int | None = None,
) -> Iterator[TorusConfig]:
    """
    Valid torus configurations of the given dims, in lexicographic cell order.

    Raises BudgetExhausted after the configs found so far if the budget runs out.
    """
    dims = tuple(int(n) for n in dims)
    if len(dims) != sft.dim:
        raise DimensionMismatchError(f"{len(dims)} torus dims for a {sft.dim}-dimensional spec")
    if any(n < 1 for n in dims):
        raise ValueError(f"torus dims must be positive, got {dims}")
    meter = _meter(budget)
    threads = threads or meter.budget.threads
    solver = TilingSolver(sft, LatticeDomain.torus(dims))
    logger.debug(f"enumerate_torus: dims={dims} placements={len(solver.p_rule)} threads={threads}")
    for flat in solver.solutions(meter, threads):
        yield TorusConfig.from_flat(sft.alphabet, dims, flat)


def enumerate_lattice(
    sft: SftSpec, group: PeriodGroup, budget: SearchBudget | SearchMeter
) -> Iterator[tuple[int, ...]]:
    """Valid fillings of Z^d / group, one symbol per box cell."""
    if group.dim != sft.dim:
        raise DimensionMismatchError(f"lattice of dimension {group.dim} for a {sft.dim}-dimensional spec")
    meter = _meter(budget)
    yield from TilingSolver(sft, LatticeDomain(group)).solutions(meter, meter.budget.threads)


def count_lattice(sft: SftSpec, group: PeriodGroup, budget: SearchBudget | SearchMeter) -> int:
    return sum(1 for _ in enumerate_lattice(sft, group, budget))


def lattice_to_torus(sft: SftSpec, group: PeriodGroup, filling: Sequence[int]) -> TorusConfig:
    """Spread a filling of Z^d / group over the smallest axis-aligned torus it tiles."""
    domain = LatticeDomain(group)
    dims = group.torus_dims()
    cells = np.empty(dims, dtype=np.int64)
    for vec in np.ndindex(*dims):
        cells[vec] = filling[domain.cell_of(vec)]
    return TorusConfig(sft.alphabet, cells)


def sofic_projection(
    sft: SftSpec,
    code: BlockCode,
    dims: Sequence[int],
    budget: SearchBudget | SearchMeter,
) -> list[TorusConfig]:
    """Distinct images under `code` of the valid tori of the given dims, sorted."""
    with tracer.start_as_current_span("sofic_projection") as span:
        images = {apply_block_code(code, config) for config in enumerate_torus(sft, dims, budget)}
        span.set_attribute("sofic.images", len(images))
        return sorted(images)
