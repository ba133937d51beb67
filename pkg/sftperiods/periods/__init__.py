from .budget import SearchBudget, Verdict, WitnessReport
from .horizontal import METHODS, horizontal_period, least_horizontal_period
from .lattice import PeriodGroup, stabilizer
from .oneperiod import normalize_direction, one_period
from .refute import bounded_lattice_refute
from .spectrum import KINDS, period_spectrum
from .strip import build_strip_graph
from .strong import count_strong, count_strong_inclusion_exclusion, strong_period_exists

__all__ = [
    "KINDS",
    "METHODS",
    "PeriodGroup",
    "SearchBudget",
    "Verdict",
    "WitnessReport",
    "bounded_lattice_refute",
    "build_strip_graph",
    "count_strong",
    "count_strong_inclusion_exclusion",
    "horizontal_period",
    "least_horizontal_period",
    "normalize_direction",
    "one_period",
    "period_spectrum",
    "stabilizer",
    "strong_period_exists",
]
