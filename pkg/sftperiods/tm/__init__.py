from .compiler import compile_tm, count_rectangle_tilings, run_rows
from .machine import (
    RunWitness,
    TmSpec,
    accepting_run,
    count_accepting,
    parse_tm,
    reachable_heads,
    run_bounded,
    tm_to_text,
)
from .period_sft import check_space_exact, period_witness, tm_period_bundle, tm_period_sft
from .unary import encode_unary

__all__ = [
    "RunWitness",
    "TmSpec",
    "accepting_run",
    "check_space_exact",
    "compile_tm",
    "count_accepting",
    "count_rectangle_tilings",
    "encode_unary",
    "parse_tm",
    "period_witness",
    "reachable_heads",
    "run_bounded",
    "run_rows",
    "tm_period_bundle",
    "tm_period_sft",
    "tm_to_text",
]
