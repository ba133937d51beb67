"""
sftctl: decide, count and construct periodic points from the command line.

Exit codes: 0 for yes (or success), 1 for no, 2 for unknown, 64 for usage
errors and 65 for malformed input files. Verdict lines go to stdout, logs to
stderr.
"""

import argparse
import logging
import sys
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ValidationError

from sftperiods import __version__
from sftperiods.config import config
from sftperiods.constructions import (
    counter_layer,
    east_deterministic_base,
    grid_layer,
    kari_nw,
    robinson,
    y_k,
)
from sftperiods.errors import BudgetExhausted, SftError, SpecParseError
from sftperiods.opentelemetry_config import (
    get_tracer,
    setup_log_sampling,
    setup_telemetry,
    shutdown_telemetry,
)
from sftperiods.periods import (
    KINDS,
    METHODS,
    PeriodGroup,
    SearchBudget,
    Verdict,
    WitnessReport,
    bounded_lattice_refute,
    build_strip_graph,
    count_strong,
    count_strong_inclusion_exclusion,
    horizontal_period,
    least_horizontal_period,
    normalize_direction,
    one_period,
    period_spectrum,
    stabilizer,
    strong_period_exists,
)
from sftperiods.render import FORMATS, render
from sftperiods.sft import (
    LayerProduct,
    SftSpec,
    WangTileset,
    bundle_to_text,
    check_deterministic,
    is_admissible,
    is_valid,
    parse_pattern,
    parse_spec_file,
    parse_torus,
    pattern_to_text,
    product,
    sft_to_text,
    torus_to_text,
    transform_spec,
    wang_to_sft,
    wang_to_text,
)
from sftperiods.tm import (
    compile_tm,
    count_accepting,
    count_rectangle_tilings,
    parse_tm,
    tm_period_bundle,
)

logger = logging.getLogger(__name__)
tracer = get_tracer("sftperiods.cli")

EXIT_YES, EXIT_NO, EXIT_UNKNOWN = 0, 1, 2
EXIT_USAGE, EXIT_PARSE = 64, 65

VERDICT_EXIT = {Verdict.YES: EXIT_YES, Verdict.NO: EXIT_NO, Verdict.UNKNOWN: EXIT_UNKNOWN}

PERIOD_KINDS = ("strong", "horizontal", "one")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


class UsageError(SftError):
    """Arguments that parse but do not make sense together."""


class ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class CommandConfig(BaseModel):
    """Settings shared by every subcommand, validated before anything runs."""

    command: str
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"]
    timing: bool = False
    budget: SearchBudget

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "CommandConfig":
        level = args.log_level or config.get("observability.log_level", "WARNING")
        return cls(
            command=args.command,
            log_level=str(level).upper(),
            timing=args.timing,
            budget=SearchBudget.from_config(
                max_nodes=args.max_nodes,
                max_seconds=args.max_seconds,
                max_vertical=args.max_vertical,
                threads=args.threads,
            ),
        )


def _vector(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(c) for c in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}") from None


def load_sft(path: str) -> SftSpec:
    """Any spec file as an SftSpec: Wang tilesets and bundles are converted."""
    spec = parse_spec_file(path)
    if isinstance(spec, WangTileset):
        return wang_to_sft(spec)
    if isinstance(spec, LayerProduct):
        return product(spec, Path(path).stem)
    return spec


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _emit(data: str | bytes, output: str | None):
    if output is None:
        if isinstance(data, bytes):
            sys.stdout.buffer.write(data)
        else:
            sys.stdout.write(data)
        return
    if isinstance(data, bytes):
        Path(output).write_bytes(data)
    else:
        Path(output).write_text(data, encoding="utf-8")
    logger.info(f"wrote {output}")


def _report(cfg: CommandConfig, report: WitnessReport) -> int:
    print(report.summary(cfg.timing))
    if report.detail:
        print(f"detail: {report.detail}")
    return VERDICT_EXIT[report.verdict]


def _witness_text(kind: str, report: WitnessReport, sft: SftSpec) -> str:
    if kind == "one":
        return pattern_to_text(report.witness.window(), sft.alphabet)
    return torus_to_text(report.witness)


def verify_witness(sft: SftSpec, kind: str, path: str, p: int | None, vector: Sequence[int] | None) -> str | None:
    """None when the witness file checks out, otherwise the reason it does not."""
    text = _read(path)
    if kind == "one":
        pattern, alphabet = parse_pattern(text, path)
        if alphabet != sft.alphabet:
            return "witness alphabet differs from the spec"
        if not is_admissible(pattern, sft):
            return "window contains a forbidden pattern"
        cells = pattern.as_dict()
        for vec, s in pattern.cells:
            shifted = tuple(a + b for a, b in zip(vec, vector, strict=True))
            if shifted in cells and cells[shifted] != s:
                return f"window is not invariant under {tuple(vector)} at {vec}"
        return None
    torus = parse_torus(text, path)
    if torus.alphabet != sft.alphabet:
        return "witness alphabet differs from the spec"
    if torus.dim != sft.dim:
        return f"witness is {torus.dim}-dimensional, spec is {sft.dim}-dimensional"
    if not is_valid(torus, sft):
        return "torus contains a forbidden pattern"
    if kind == "strong":
        found = stabilizer(torus)
        if found != PeriodGroup.scaled(p, sft.dim):
            return f"period lattice is {found}, not {p}Z^{sft.dim}"
        return None
    least = least_horizontal_period(torus)
    if least != p:
        return f"least horizontal period is {least}, not {p}"
    return None


def cmd_periods(cfg: CommandConfig, args: argparse.Namespace) -> int:
    sft = load_sft(args.spec)
    if args.kind == "one":
        if args.vector is None or len(args.vector) != 2:
            raise UsageError("1-periods need --vector m,n")
    elif args.p is None or args.p < 1:
        raise UsageError(f"{args.kind} periods need a positive --p")
    if args.verify:
        reason = verify_witness(sft, args.kind, args.verify, args.p, args.vector)
        if reason is None:
            print("verified")
            return EXIT_YES
        print(f"rejected: {reason}")
        return EXIT_NO
    if args.kind == "strong":
        report = strong_period_exists(sft, args.p, cfg.budget)
    elif args.kind == "horizontal":
        report = horizontal_period(sft, args.p, cfg.budget, method=args.method)
    else:
        m, n = args.vector
        report = one_period(sft, m, n, cfg.budget, mutual_cycles=args.mutual_cycles)
    code = _report(cfg, report)
    if report.verdict is Verdict.YES and args.witness:
        _emit(_witness_text(args.kind, report, sft), args.witness)
    return code


def cmd_count(cfg: CommandConfig, args: argparse.Namespace) -> int:
    sft = load_sft(args.spec)
    counter = count_strong_inclusion_exclusion if args.inclusion_exclusion else count_strong
    try:
        total = counter(sft, args.p, cfg.budget)
    except BudgetExhausted as e:
        print(f"verdict={Verdict.UNKNOWN.value} nodes={e.nodes}")
        print(f"detail: {e.message}")
        return EXIT_UNKNOWN
    print(total)
    return EXIT_YES


def _construction(name: str) -> str:
    kind, _, arg = name.partition(":")
    if kind in ("counter", "yk"):
        if not arg.isdigit() or int(arg) < 2:
            raise UsageError(f"{kind} needs an integer k >= 2, as in {kind}:2")
        k = int(arg)
        if kind == "counter":
            return sft_to_text(counter_layer(k))
        return bundle_to_text(y_k(k))
    if arg:
        raise UsageError(f"{kind} takes no argument")
    builders: dict[str, Callable[[], str]] = {
        "robinson": lambda: wang_to_text(robinson()),
        "kari-nw": lambda: wang_to_text(kari_nw()),
        "east": lambda: sft_to_text(east_deterministic_base()),
        "grid": lambda: sft_to_text(grid_layer(east_deterministic_base())),
    }
    if kind not in builders:
        raise UsageError(
            f"unknown construction {name!r}, expected one of "
            f"{sorted(builders) + ['counter:K', 'yk:K']}"
        )
    return builders[kind]()


def cmd_construct(cfg: CommandConfig, args: argparse.Namespace) -> int:
    _emit(_construction(args.name), args.output)
    return EXIT_YES


def cmd_render(cfg: CommandConfig, args: argparse.Namespace) -> int:
    torus = parse_torus(_read(args.witness), args.witness)
    _emit(render(torus, args.format, args.cell_size), args.output)
    return EXIT_YES


def cmd_stripgraph(cfg: CommandConfig, args: argparse.Namespace) -> int:
    sft = load_sft(args.spec)
    matrix, (m, n) = normalize_direction(args.m, args.n)
    oriented = transform_spec(sft, matrix.tolist())
    try:
        strips = build_strip_graph(oriented, m, n, cfg.budget)
    except BudgetExhausted as e:
        print(f"verdict={Verdict.UNKNOWN.value} nodes={e.nodes}")
        print(f"detail: {e.message}")
        return EXIT_UNKNOWN
    _emit(strips.to_dot(), args.output)
    return EXIT_YES


def cmd_compile_tm(cfg: CommandConfig, args: argparse.Namespace) -> int:
    tm = parse_tm(_read(args.tm), args.tm)
    if args.count:
        w, t = args.count
        word = args.input.split()
        tilings = count_rectangle_tilings(compile_tm(tm), w, t, word)
        runs = count_accepting(tm, word, t, w)
        print(f"tilings={tilings} accepting_runs={runs}")
        return EXIT_YES if tilings == runs else EXIT_NO
    if args.period_sft is not None:
        base = load_sft(args.base) if args.base else None
        _emit(bundle_to_text(tm_period_bundle(tm, args.period_sft, base)), args.output)
        return EXIT_YES
    _emit(wang_to_text(compile_tm(tm)), args.output)
    return EXIT_YES


def cmd_check_det(cfg: CommandConfig, args: argparse.Namespace) -> int:
    report = check_deterministic(load_sft(args.spec), args.mode)
    if report.deterministic:
        print(f"{args.mode}-deterministic")
        return EXIT_YES
    print(f"not {args.mode}-deterministic: {report.counterexample}")
    return EXIT_NO


def cmd_refute_lattice(cfg: CommandConfig, args: argparse.Namespace) -> int:
    sft = load_sft(args.spec)
    group = PeriodGroup.generated_by(args.vector, sft.dim)
    report = bounded_lattice_refute(sft, group, cfg.budget)
    code = _report(cfg, report)
    if report.verdict is Verdict.YES and args.witness:
        _emit(torus_to_text(report.witness), args.witness)
    return code


def cmd_spectrum(cfg: CommandConfig, args: argparse.Namespace) -> int:
    if args.start < 1 or args.stop < args.start:
        raise UsageError(f"bad period range {args.start}..{args.stop}")
    reports = period_spectrum(load_sft(args.spec), args.kind, range(args.start, args.stop + 1), cfg.budget)
    for p, report in reports.items():
        print(f"{p} {report.summary(cfg.timing)}")
    return EXIT_YES


COMMANDS: dict[str, Callable[[CommandConfig, argparse.Namespace], int]] = {
    "periods": cmd_periods,
    "count": cmd_count,
    "construct": cmd_construct,
    "render": cmd_render,
    "stripgraph": cmd_stripgraph,
    "compile-tm": cmd_compile_tm,
    "check-det": cmd_check_det,
    "refute-lattice": cmd_refute_lattice,
    "spectrum": cmd_spectrum,
}


def build_parser() -> ArgumentParser:
    common = ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=None, help="Worker threads for torus search")
    common.add_argument("--timing", action="store_true", help="Append wall-clock seconds to verdicts")
    common.add_argument("--max-nodes", type=int, default=None, help="Search node budget")
    common.add_argument("--max-seconds", type=float, default=None, help="Wall-clock budget")
    common.add_argument("--max-vertical", type=int, default=None, help="Cap on companion vertical periods")
    common.add_argument("--log-level", type=str.upper, choices=LOG_LEVELS, default=None)

    parser = ArgumentParser(prog="sftctl", description="Periodic points of subshifts of finite type")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("periods", parents=[common], help="Decide one period")
    p.add_argument("kind", choices=PERIOD_KINDS)
    p.add_argument("spec")
    p.add_argument("--p", type=int, default=None, help="Period for strong and horizontal")
    p.add_argument("--vector", type=_vector, default=None, help="m,n for 1-periods")
    p.add_argument("--method", choices=METHODS, default="auto")
    p.add_argument("--mutual-cycles", action="store_true")
    p.add_argument("--witness", default=None, help="Write the witness of a yes here")
    p.add_argument("--verify", default=None, help="Check a witness file instead of searching")

    p = sub.add_parser("count", parents=[common], help="Count orbits with strong period p")
    p.add_argument("spec")
    p.add_argument("p", type=int)
    p.add_argument("--inclusion-exclusion", action="store_true")

    p = sub.add_parser("construct", parents=[common], help="Print a built-in construction")
    p.add_argument("name", help="robinson, kari-nw, east, grid, counter:K or yk:K")
    p.add_argument("-o", "--output", default=None)

    p = sub.add_parser("render", parents=[common], help="Draw a torus witness")
    p.add_argument("witness")
    p.add_argument("--format", choices=FORMATS, default="svg")
    p.add_argument("--cell-size", type=int, default=None)
    p.add_argument("-o", "--output", default=None)

    p = sub.add_parser("stripgraph", parents=[common], help="Write the strip graph as DOT")
    p.add_argument("spec")
    p.add_argument("m", type=int)
    p.add_argument("n", type=int)
    p.add_argument("-o", "--output", default=None)

    p = sub.add_parser("compile-tm", parents=[common], help="Compile a machine to Wang tiles")
    p.add_argument("tm")
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--count", type=int, nargs=2, metavar=("W", "T"), default=None)
    p.add_argument("--input", default="", help="Space separated input word for --count")
    p.add_argument("--period-sft", type=int, default=None, metavar="K")
    p.add_argument("--base", default=None, help="Base spec for --period-sft")

    p = sub.add_parser("check-det", parents=[common], help="Test NW or east determinism")
    p.add_argument("spec")
    p.add_argument("mode", choices=("nw", "east"))

    p = sub.add_parser("refute-lattice", parents=[common], help="Search fillings of a period lattice")
    p.add_argument("spec")
    p.add_argument("--vector", type=_vector, action="append", required=True)
    p.add_argument("--witness", default=None)

    p = sub.add_parser("spectrum", parents=[common], help="Decide a range of periods")
    p.add_argument("kind", choices=KINDS)
    p.add_argument("spec")
    p.add_argument("start", type=int)
    p.add_argument("stop", type=int)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = CommandConfig.from_args(args)
    except ValidationError as e:
        print(f"sftctl: invalid settings: {e}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(
        level=cfg.log_level,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    setup_log_sampling(
        ["sftperiods.periods.horizontal", "sftperiods.periods.strip", "sftperiods.periods.spectrum"]
    )
    setup_telemetry("sftctl")
    try:
        with tracer.start_as_current_span(f"cli.{cfg.command}"):
            return COMMANDS[cfg.command](cfg, args)
    except SpecParseError as e:
        print(f"sftctl: {e}", file=sys.stderr)
        return EXIT_PARSE
    except (UsageError, SftError, ValueError, OSError) as e:
        print(f"sftctl: {e}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        shutdown_telemetry()


if __name__ == "__main__":
    sys.exit(main())
