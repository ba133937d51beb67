import itertools
import logging
import os

from opentelemetry import trace
from opentelemetry.sdk.resources import Resource
from opentelemetry.sdk.trace import TracerProvider
from opentelemetry.sdk.trace.export import BatchSpanProcessor
from opentelemetry.sdk.trace.sampling import (
    Decision,
    ParentBased,
    Sampler,
    SamplingResult,
    TraceIdRatioBased,
)
from opentelemetry.trace import SpanKind
from opentelemetry.util.types import Attributes

from sftperiods.config import config

# Spans emitted once per search subtree or strip-graph vertex.
NOISY_SPANS = {
    "solver.subtree",
    "strip_graph.successors",
    "torus_search.height",
}

# Verdict-carrying spans, always kept.
PRIORITY_SPANS = {
    "strong_period_exists",
    "count_strong",
    "horizontal_period",
    "one_period",
    "bounded_lattice_refute",
    "count_rectangle_tilings",
}


class DispatchingSampler(Sampler):
    """
    Dispatches to one of two samplers based on the span name.
    Throttles the per-subtree spans of large searches even if a parent is sampled.
    """

    def __init__(
        self,
        target_spans: set[str],
        low_rate_sampler: Sampler,
        default_sampler: Sampler,
    ):
        self._target_spans = target_spans
        self._low_rate_sampler = low_rate_sampler
        self._default_sampler = default_sampler

    def should_sample(
        self,
        parent_context,
        trace_id: int,
        name: str,
        kind: SpanKind = None,
        attributes: Attributes = None,
        links=None,
        trace_state=None,
    ) -> SamplingResult:
        if name in PRIORITY_SPANS:
            return SamplingResult(Decision.RECORD_AND_SAMPLE, attributes, trace_state)

        if name in self._target_spans:
            return self._low_rate_sampler.should_sample(
                parent_context, trace_id, name, kind, attributes, links, trace_state
            )

        return self._default_sampler.should_sample(
            parent_context, trace_id, name, kind, attributes, links, trace_state
        )

    def get_description(self) -> str:
        return "DispatchingSampler"


_TRACER_PROVIDER = None


def setup_telemetry(service_name: str):
    """
    Configures and sets the global TracerProvider.

    The OTLP exporter is attached only when OTEL_EXPORTER_OTLP_ENDPOINT is set,
    so command-line runs stay offline by default.
    """
    global _TRACER_PROVIDER
    if _TRACER_PROVIDER is not None:
        return _TRACER_PROVIDER

    resource = Resource.create(attributes={"service.name": service_name})
    sampling_rate = config.get("observability.sampling_rate", 1.0)

    dispatching_sampler = DispatchingSampler(
        target_spans=NOISY_SPANS,
        low_rate_sampler=TraceIdRatioBased(sampling_rate),
        default_sampler=TraceIdRatioBased(1.0),
    )
    sampler = ParentBased(
        root=dispatching_sampler,
        remote_parent_sampled=dispatching_sampler,
        remote_parent_not_sampled=dispatching_sampler,
        local_parent_sampled=dispatching_sampler,
        local_parent_not_sampled=dispatching_sampler,
    )

    provider = TracerProvider(sampler=sampler, resource=resource)

    endpoint = os.environ.get("OTEL_EXPORTER_OTLP_ENDPOINT")
    if endpoint and os.environ.get("DISABLE_OTEL_EXPORTER") != "true":
        from opentelemetry.exporter.otlp.proto.http.trace_exporter import (
            OTLPSpanExporter,
        )

        processor = BatchSpanProcessor(
            OTLPSpanExporter(endpoint=endpoint),
            export_timeout_millis=5000,
            schedule_delay_millis=5000,
        )
        provider.add_span_processor(processor)

    trace.set_tracer_provider(provider)
    _TRACER_PROVIDER = provider
    return provider


def shutdown_telemetry(timeout_millis: int = 3000):
    """Flush and shut down the tracer provider (called on CLI exit)."""
    global _TRACER_PROVIDER
    if _TRACER_PROVIDER is not None:
        try:
            _TRACER_PROVIDER.force_flush(timeout_millis=timeout_millis)
        except Exception:
            pass  # Best-effort; don't block exit
        try:
            _TRACER_PROVIDER.shutdown()
        except Exception:
            pass
        _TRACER_PROVIDER = None


def get_tracer(service_name: str):
    """
    Returns a tracer from the globally configured provider.

    Telemetry is set up lazily so that tests can install their own provider first.
    """
    if _TRACER_PROVIDER is None and not isinstance(
        trace.get_tracer_provider(), TracerProvider
    ):
        setup_telemetry(service_name)
    return trace.get_tracer(service_name)


class SamplingLogFilter(logging.Filter):
    """
    Keeps one in every N records whose message matches a noisy pattern.

    Counting instead of random sampling keeps command-line output reproducible.
    """

    def __init__(self, noisy_patterns: set[str], every_n: int):
        """
        Args:
            noisy_patterns: Substrings identifying chatty progress messages
            every_n: Keep the first record and then one in every `every_n`
        """
        super().__init__()
        if every_n < 1:
            raise ValueError(f"every_n must be positive, got {every_n}")
        self.noisy_patterns = noisy_patterns
        self.every_n = every_n
        self._counter = itertools.count()

    def filter(self, record: logging.LogRecord) -> bool:
        message = record.getMessage()
        for pattern in self.noisy_patterns:
            if pattern in message:
                return next(self._counter) % self.every_n == 0
        return True


def setup_log_sampling(logger_names: list[str] | None = None):
    """
    Attaches a SamplingLogFilter for solver progress messages.

    Args:
        logger_names: Loggers to filter (None for the root logger)
    """
    every_n = int(config.get("observability.log_every_n", 50))
    sampling_filter = SamplingLogFilter({"progress:"}, every_n)

    if logger_names is None:
        logger_names = [None]

    for logger_name in logger_names:
        logging.getLogger(logger_name).addFilter(sampling_filter)

    return sampling_filter
