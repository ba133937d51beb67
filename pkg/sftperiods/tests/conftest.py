import os

import pytest
from opentelemetry import trace
from opentelemetry.sdk.trace import TracerProvider
from opentelemetry.sdk.trace.export import SimpleSpanProcessor
from opentelemetry.sdk.trace.export.in_memory_span_exporter import InMemorySpanExporter

# The global provider can only be set once per process, and it must be in
# place before sftperiods modules create their tracers.
_EXPORTER = InMemorySpanExporter()
_PROVIDER = TracerProvider()
_PROVIDER.add_span_processor(SimpleSpanProcessor(_EXPORTER))
trace.set_tracer_provider(_PROVIDER)

from sftperiods.periods.budget import SearchBudget  # noqa: E402
from sftperiods.sft.model import Alphabet, Pattern, SftSpec  # noqa: E402
from sftperiods.tm.machine import parse_tm  # noqa: E402


def pytest_collection_modifyitems(config, items):
    if os.environ.get("SFT_RUN_SLOW") == "1":
        return
    skip = pytest.mark.skip(reason="set SFT_RUN_SLOW=1 to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(autouse=True)
def mock_opentelemetry():
    """Collect spans in memory instead of exporting them."""
    _EXPORTER.clear()
    yield _EXPORTER
    _EXPORTER.clear()


@pytest.fixture
def spans(mock_opentelemetry):
    return mock_opentelemetry


@pytest.fixture
def budget():
    return SearchBudget(max_nodes=2_000_000, max_seconds=60.0, max_vertical=16, threads=1)


def pairs(alphabet, offset, bad):
    """Forbidden two-cell patterns (origin, offset) for the token pairs in `bad`."""
    return [
        Pattern((((0,) * len(offset), alphabet.index(a)), (tuple(offset), alphabet.index(b))))
        for a, b in bad
    ]


def random_spec(rng, index):
    """Two letters; each neighbour pair in three directions is forbidden with probability 0.3."""
    ab = Alphabet(["a", "b"])
    forbidden = []
    for offset in ((1, 0), (0, 1), (1, 1)):
        bad = [(a, b) for a in "ab" for b in "ab" if rng.random() < 0.3]
        forbidden += pairs(ab, offset, bad)
    return SftSpec(2, ab, forbidden, name=f"random{index}")


@pytest.fixture
def full_shift_1d():
    return SftSpec(1, Alphabet(["0", "1"]), name="full2")


@pytest.fixture
def golden_mean():
    ab = Alphabet(["0", "1"])
    return SftSpec(1, ab, pairs(ab, (1,), [("1", "1")]), name="golden")


@pytest.fixture
def full_shift_2d():
    return SftSpec(2, Alphabet(["a", "b"]), name="full2x2")


@pytest.fixture
def constant_2d():
    """Neighbours agree in both directions, so only constant configurations."""
    ab = Alphabet(["a", "b"])
    bad = [("a", "b"), ("b", "a")]
    return SftSpec(2, ab, pairs(ab, (1, 0), bad) + pairs(ab, (0, 1), bad), name="constant")


@pytest.fixture
def alternating_rows():
    """Horizontal neighbours differ; rows are abab... or baba... independently."""
    ab = Alphabet(["a", "b"])
    return SftSpec(2, ab, pairs(ab, (1, 0), [("a", "a"), ("b", "b")]), name="alternating")


EVEN_ONES = """%tm
name: even
states: e o acc
tape: 1 B
blank: B
input: 1
initial: e
halting: acc
delta: e 1 -> o 1 R
delta: o 1 -> e 1 R
delta: e B -> acc B S
"""

# Writes x on blanks moving right and may stop on any blank; the stop line is doubled.
GUESS = """%tm
name: guess
states: s acc
tape: B x
blank: B
input: x
initial: s
halting: acc
delta: s B -> acc x S
delta: s B -> acc x S
delta: s B -> s x R
delta: s x -> s x R
"""

BOUNCE = """%tm
name: bounce
states: q0 q1 q2 acc
tape: 1 B
blank: B
input: 1
initial: q0
halting: acc
delta: q0 1 -> q0 1 R
delta: q0 B -> q1 B L
delta: q1 1 -> q2 B L
delta: q2 1 -> acc 1 S
delta: q1 1 -> acc 1 S
"""

# Steps off the west end of the tape at once.
FALL_OFF = """%tm
states: q acc
tape: 1 B
blank: B
input: 1
initial: q
halting: acc
delta: q 1 -> acc 1 L
delta: q B -> acc B L
"""

# Never moves: idles on its cell or accepts by erasing a 1.
LOOP = """%tm
name: loop
states: q acc
tape: 1 B
blank: B
input: 1
initial: q
halting: acc
delta: q 1 -> q 1 S
delta: q 1 -> acc B S
delta: q B -> q B S
"""

MACHINES = {"even": EVEN_ONES, "guess": GUESS, "bounce": BOUNCE, "fall": FALL_OFF, "loop": LOOP}


@pytest.fixture
def even_tm():
    return parse_tm(EVEN_ONES)


@pytest.fixture(params=sorted(MACHINES))
def any_tm(request):
    return parse_tm(MACHINES[request.param])
