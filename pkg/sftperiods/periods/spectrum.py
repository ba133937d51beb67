import logging
from collections.abc import Iterable

from sftperiods.opentelemetry_config import get_tracer
from sftperiods.periods.budget import SearchBudget, Verdict, WitnessReport
from sftperiods.periods.horizontal import horizontal_period
from sftperiods.periods.strong import strong_period_exists
from sftperiods.sft.model import SftSpec

logger = logging.getLogger(__name__)
tracer = get_tracer("sftperiods.spectrum")

KINDS = ("strong", "horizontal")


def period_spectrum(
    sft: SftSpec, kind: str, periods: Iterable[int], budget: SearchBudget
) -> dict[int, WitnessReport]:
    """Run one decision per period; each gets the full budget."""
    if kind not in KINDS:
        raise ValueError(f"unknown period kind {kind!r}, expected one of {KINDS}")
    decide = strong_period_exists if kind == "strong" else horizontal_period
    reports: dict[int, WitnessReport] = {}
    with tracer.start_as_current_span("period_spectrum") as span:
        span.set_attribute("kind", kind)
        for p in sorted(set(periods)):
            reports[p] = decide(sft, p, budget)
            logger.debug(f"spectrum progress: {kind} {p} -> {reports[p].verdict.value}")
        found = [p for p, r in reports.items() if r.verdict is Verdict.YES]
        span.set_attribute("spectrum.size", len(found))
        logger.info(f"{kind} periods in range: {found}")
    return reports
