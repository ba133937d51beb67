import logging
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from pydantic import BaseModel, Field

from sftperiods.config import config
from sftperiods.errors import BudgetExhausted

logger = logging.getLogger(__name__)

# Stand-in for bounds that overflow int64.
SATURATED = 2**63 - 1

# Wall-clock checks happen once per this many nodes.
_CLOCK_EVERY = 1024


class Verdict(str, Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


class SearchBudget(BaseModel):
    max_nodes: int = Field(..., gt=0, description="Search nodes before giving up")
    max_seconds: float = Field(..., gt=0, description="Wall-clock limit in seconds")
    max_vertical: int = Field(..., gt=0, description="Cap on companion vertical periods")
    threads: int = Field(1, gt=0, description="Worker threads for torus search")

    @classmethod
    def from_config(cls, **overrides) -> "SearchBudget":
        """Defaults from config.yml and SFT_* variables; None overrides are ignored."""
        values = {
            "max_nodes": config.get("solver.max_nodes", 2_000_000),
            "max_seconds": config.get("solver.max_seconds", 120.0),
            "max_vertical": config.get("solver.max_vertical", 64),
            "threads": config.get("solver.threads", 1),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


@dataclass
class SearchStats:
    nodes: int = 0
    seconds: float = 0.0


class SearchMeter:
    """
    Node and time accounting shared by every solver run of one decision.

    `tick` raises BudgetExhausted once the node budget or the deadline is passed.
    """

    def __init__(self, budget: SearchBudget, max_nodes: int | None = None):
        self.budget = budget
        self.max_nodes = budget.max_nodes if max_nodes is None else max_nodes
        self.nodes = 0
        self.started = time.monotonic()
        self.deadline = self.started + budget.max_seconds

    @property
    def remaining(self) -> int:
        return max(0, self.max_nodes - self.nodes)

    @property
    def elapsed(self) -> float:
        return time.monotonic() - self.started

    def exhausted(self, what: str) -> BudgetExhausted:
        return BudgetExhausted(
            f"budget exhausted during {what} after {self.nodes} nodes",
            nodes=self.nodes,
            seconds=self.elapsed,
        )

    def tick(self, what: str = "search"):
        self.nodes += 1
        if self.nodes > self.max_nodes:
            raise self.exhausted(what)
        if self.nodes % _CLOCK_EVERY == 0 and time.monotonic() > self.deadline:
            raise self.exhausted(what)

    def child(self, max_nodes: int) -> "SearchMeter":
        """A fresh counter sharing this meter's deadline."""
        meter = SearchMeter(self.budget, max_nodes=max_nodes)
        meter.started = self.started
        meter.deadline = self.deadline
        return meter

    def consume(self, nodes: int, what: str = "search"):
        self.nodes += nodes
        if self.nodes > self.max_nodes or time.monotonic() > self.deadline:
            raise self.exhausted(what)

    def stats(self) -> SearchStats:
        return SearchStats(self.nodes, self.elapsed)


@dataclass
class WitnessReport:
    """Outcome of a decision procedure. YES carries a re-checkable witness."""

    verdict: Verdict
    witness: Any = None
    stats: SearchStats = field(default_factory=SearchStats)
    detail: str = ""

    def __post_init__(self):
        if self.verdict is Verdict.YES and self.witness is None:
            raise ValueError("a YES report needs a witness")

    def summary(self, timing: bool = False) -> str:
        line = f"verdict={self.verdict.value} nodes={self.stats.nodes}"
        if timing:
            line += f" seconds={self.stats.seconds:.3f}"
        return line

    @classmethod
    def unknown(cls, error: BudgetExhausted, detail: str = "") -> "WitnessReport":
        logger.warning(f"{error.message}; reporting unknown")
        return cls(Verdict.UNKNOWN, None, SearchStats(error.nodes, error.seconds), detail or error.message)
