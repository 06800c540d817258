"""
OpenTelemetry tracing configuration for shrinkage computations.
"""
import functools
import logging
import sys

from opentelemetry import trace
from opentelemetry.sdk.trace import TracerProvider
from opentelemetry.sdk.trace.export import ConsoleSpanExporter, SimpleSpanProcessor

logger = logging.getLogger(__name__)

TRACER_NAME = "shrinkpath"


class TracingConfig:
    """Configure span export for the command-line run."""

    def __init__(self, enabled: bool = False):
        """
        Initialize tracing configuration.

        Args:
            enabled: Export finished spans to standard error
        """
        self.enabled = enabled
        self.is_configured = False

    def configure(self):
        """
        Install a tracer provider with a console exporter.

        Spans stay no-ops when tracing is disabled.
        """
        if not self.enabled:
            logger.debug("Tracing disabled")
            return

        try:
            provider = TracerProvider()
            provider.add_span_processor(SimpleSpanProcessor(ConsoleSpanExporter(out=sys.stderr)))
            trace.set_tracer_provider(provider)

            self.is_configured = True
            logger.info("OpenTelemetry tracing configured with console exporter")

        except Exception as e:
            logger.error(f"Failed to configure tracing: {e}")
            logger.warning("Run will continue without tracing")

    def get_tracer(self, name: str = TRACER_NAME):
        """
        Get a tracer instance for manual instrumentation.

        Args:
            name: Tracer name

        Returns:
            Tracer instance
        """
        return trace.get_tracer(name)


def get_tracer(name: str = TRACER_NAME):
    """Tracer that follows whatever provider is installed later."""
    return trace.get_tracer(name)


def instrument_function(tracer, span_name: str):
    """
    Decorator to instrument a function with tracing.

    Args:
        tracer: OpenTelemetry tracer instance
        span_name: Name for the trace span
    """
    def decorator(func):
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            with tracer.start_as_current_span(span_name):
                return func(*args, **kwargs)

        return wrapper

    return decorator
