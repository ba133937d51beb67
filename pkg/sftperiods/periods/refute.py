"""
Bounded refutation of lattice periods.

Whether some configuration is invariant under a given full-rank lattice is
co-recursively enumerable: enumerate the fillings of the fundamental domain,
then strike out every filling containing a forbidden pattern as the patterns
arrive. Here the stream is consumed up to the budget.
"""

import itertools
import logging
from collections.abc import Iterable, Iterator
from dataclasses import dataclass

from sftperiods.errors import AlphabetMismatchError, BudgetExhausted, DimensionMismatchError
from sftperiods.opentelemetry_config import get_tracer
from sftperiods.periods.budget import SearchBudget, SearchMeter, Verdict, WitnessReport
from sftperiods.periods.lattice import PeriodGroup
from sftperiods.periods.search import enumerate_lattice, lattice_to_torus
from sftperiods.sft.model import Alphabet, Pattern, SftSpec, TorusConfig
from sftperiods.sft.validity import is_locally_valid

logger = logging.getLogger(__name__)
tracer = get_tracer("sftperiods.refute")


@dataclass
class ForbiddenStream:
    """Forbidden patterns arriving one at a time, possibly without end."""

    alphabet: Alphabet
    dim: int
    patterns: Iterable[Pattern]

    def __iter__(self) -> Iterator[Pattern]:
        for pattern in self.patterns:
            if pattern.dim != self.dim:
                raise DimensionMismatchError(
                    f"streamed pattern of dimension {pattern.dim}, expected {self.dim}"
                )
            if any(not 0 <= s < len(self.alphabet) for s in pattern.symbols):
                raise AlphabetMismatchError("streamed pattern uses a symbol outside the alphabet")
            yield pattern

    @classmethod
    def of(cls, sft: SftSpec) -> "ForbiddenStream":
        return cls(sft.alphabet, sft.dim, sft.iter_forbidden())


def _check_group(group: PeriodGroup, dim: int):
    if group.dim != dim:
        raise DimensionMismatchError(f"lattice of dimension {group.dim} for a {dim}-dimensional source")
    if not group.is_full_rank:
        raise ValueError(f"lattice {group} must have rank {dim}")


def _from_spec(sft: SftSpec, group: PeriodGroup, meter: SearchMeter) -> WitnessReport:
    for filling in enumerate_lattice(sft, group, meter):
        witness = lattice_to_torus(sft, group, filling)
        return WitnessReport(Verdict.YES, witness, meter.stats(), f"filling invariant under {group}")
    return WitnessReport(Verdict.NO, None, meter.stats(), f"every filling of Z^{sft.dim}/{group} is refuted")


def _from_stream(stream: ForbiddenStream, group: PeriodGroup, meter: SearchMeter) -> WitnessReport:
    carrier = SftSpec(stream.dim, stream.alphabet)
    cells = sum(1 for _ in group.box())
    survivors: list[TorusConfig] = []
    for filling in itertools.product(range(len(stream.alphabet)), repeat=cells):
        meter.tick("refute.fillings")
        survivors.append(lattice_to_torus(carrier, group, filling))
    consumed = 0
    for pattern in stream:
        consumed += 1
        rule = SftSpec(stream.dim, stream.alphabet, [pattern])
        kept = []
        for config in survivors:
            meter.tick("refute.patterns")
            if not is_locally_valid(config, rule):
                kept.append(config)
        survivors = kept
        if not survivors:
            return WitnessReport(
                Verdict.NO, None, meter.stats(), f"all fillings refuted after {consumed} patterns"
            )
    return WitnessReport(
        Verdict.YES,
        survivors[0],
        meter.stats(),
        f"{len(survivors)} fillings survive the whole stream of {consumed} patterns",
    )


def bounded_lattice_refute(
    source: SftSpec | ForbiddenStream, group: PeriodGroup, budget: SearchBudget
) -> WitnessReport:
    """
    Decide whether some configuration has every vector of `group` as a period.

    No is certain once every filling is refuted; Yes needs a filling that
    survives a finite stream to its end; a budget cut with survivors left is
    Unknown.
    """
    _check_group(group, source.dim)
    with tracer.start_as_current_span("bounded_lattice_refute") as span:
        span.set_attribute("lattice", str(group))
        span.set_attribute("lattice.index", group.index or 0)
        meter = SearchMeter(budget)
        try:
            if isinstance(source, SftSpec):
                report = _from_spec(source, group, meter)
            else:
                report = _from_stream(source, group, meter)
        except BudgetExhausted as e:
            report = WitnessReport.unknown(e, f"lattice {group}")
        span.set_attribute("search.verdict", report.verdict.value)
        span.set_attribute("search.nodes", report.stats.nodes)
        logger.info(f"lattice {group}: {report.verdict.value} ({report.detail})")
        return report
