"""
Strong periods: configurations whose period lattice is exactly p Z^d.

On the p^d torus these are the fillings fixed by no translation other than 0.
"""

import logging

import numpy as np

from sftperiods.errors import BudgetExhausted, SftError
from sftperiods.opentelemetry_config import get_tracer
from sftperiods.periods.budget import SearchBudget, SearchMeter, Verdict, WitnessReport
from sftperiods.periods.lattice import superlattices_of_scaled
from sftperiods.periods.search import count_lattice, enumerate_torus
from sftperiods.sft.kernels import fixing_translations, is_lex_min
from sftperiods.sft.model import SftSpec, TorusConfig

logger = logging.getLogger(__name__)
tracer = get_tracer("sftperiods.strong")


def _check_period(p: int):
    if p < 1:
        raise ValueError(f"period must be positive, got {p}")


def has_trivial_stabilizer(config: TorusConfig) -> bool:
    dims = np.asarray(config.dims, dtype=np.int64)
    return int(fixing_translations(config.cells.ravel(), dims).sum()) == 1


def strong_period_exists(sft: SftSpec, p: int, budget: SearchBudget) -> WitnessReport:
    _check_period(p)
    with tracer.start_as_current_span("strong_period_exists") as span:
        span.set_attribute("sft.dim", sft.dim)
        span.set_attribute("period", p)
        meter = SearchMeter(budget)
        try:
            for config in enumerate_torus(sft, (p,) * sft.dim, meter):
                if has_trivial_stabilizer(config):
                    logger.info(f"strong period {p}: witness found after {meter.nodes} nodes")
                    span.set_attribute("search.verdict", Verdict.YES.value)
                    return WitnessReport(Verdict.YES, config, meter.stats())
        except BudgetExhausted as e:
            span.set_attribute("search.verdict", Verdict.UNKNOWN.value)
            return WitnessReport.unknown(e, f"strong period {p}")
        span.set_attribute("search.verdict", Verdict.NO.value)
        span.set_attribute("search.nodes", meter.nodes)
        return WitnessReport(Verdict.NO, None, meter.stats(), f"no {p}-torus has a trivial stabilizer")


def count_strong(sft: SftSpec, p: int, budget: SearchBudget) -> int:
    """
    Number of orbits of points with period lattice exactly p Z^d.

    Counted twice, as (trivial-stabilizer tori) / p^d and as the number of
    trivial-stabilizer tori that are smallest among their translates; a
    disagreement raises SftError. Budget exhaustion propagates.
    """
    _check_period(p)
    with tracer.start_as_current_span("count_strong") as span:
        span.set_attribute("sft.dim", sft.dim)
        span.set_attribute("period", p)
        meter = SearchMeter(budget)
        trivial = 0
        minimal = 0
        dims = np.asarray((p,) * sft.dim, dtype=np.int64)
        for config in enumerate_torus(sft, (p,) * sft.dim, meter):
            flat = config.cells.ravel()
            if int(fixing_translations(flat, dims).sum()) != 1:
                continue
            trivial += 1
            if is_lex_min(flat, dims):
                minimal += 1
        volume = p**sft.dim
        if trivial % volume or trivial // volume != minimal:
            raise SftError(
                f"counting modes disagree for p={p}: {trivial} trivial-stabilizer tori, "
                f"{minimal} lexicographic minima"
            )
        span.set_attribute("search.nodes", meter.nodes)
        span.set_attribute("count", minimal)
        logger.info(f"count_strong(p={p}) = {minimal} ({trivial} tori, {meter.nodes} nodes)")
        return minimal


def count_strong_inclusion_exclusion(sft: SftSpec, p: int, budget: SearchBudget) -> int:
    """
    The same count via Moebius inversion over the lattices containing p Z^d.

    Fix(L) counts fillings of Z^d / L; the points with lattice exactly L are
    Fix(L) minus those of every strictly larger lattice.
    """
    _check_period(p)
    meter = SearchMeter(budget)
    lattices = superlattices_of_scaled(p, sft.dim)
    exact: dict = {}
    for group in lattices:
        fixed = count_lattice(sft, group, meter)
        larger = sum(
            exact[other] for other in exact if other != group and group.is_subgroup_of(other)
        )
        exact[group] = fixed - larger
    scaled = lattices[-1]
    volume = p**sft.dim
    if exact[scaled] % volume:
        raise SftError(f"{exact[scaled]} points of exact lattice {scaled} do not split into orbits")
    return exact[scaled] // volume
