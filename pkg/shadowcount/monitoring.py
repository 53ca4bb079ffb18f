"""
Monitoring and observability utilities for shadowcount.

Besides timings, the collector tracks how many shadow leaves are alive at any
instant versus how many were ever built, which is what separates the
discard-as-you-go Inverse-TS schedule from building a whole shadow up front.
"""
import sys
import time
import logging
from threading import Lock
from typing import Any, Callable, Dict, Iterator, Optional, TypeVar, cast
from functools import wraps
from contextlib import contextmanager

import psutil
from opentelemetry import trace
from opentelemetry.sdk.trace import TracerProvider


logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

F = TypeVar("F", bound=Callable[..., Any])


class MetricsCollector:
    """Collect and track estimator and shadow-storage metrics."""

    def __init__(self) -> None:
        self._lock = Lock()
        self.reset()

    def reset(self) -> None:
        """Zero every counter."""
        with self._lock:
            self.metrics = {
                "estimator_runs": 0,
                "estimator_failures": 0,
                "shadows_built": 0,
                "shadow_leaves_built": 0,
                "shadow_leaves_live": 0,
                "peak_live_leaves": 0,
                "samples_drawn": 0,
                "clique_hits": 0,
                "response_times": [],
            }

    def increment_counter(self, metric_name: str, value: int = 1) -> None:
        """Increment a counter metric."""
        with self._lock:
            if metric_name in self.metrics:
                self.metrics[metric_name] += value
            else:
                logger.warning(f"Unknown metric: {metric_name}")

    def shadow_built(self, leaf_count: int) -> None:
        """Record a freshly built shadow that is now held in memory."""
        with self._lock:
            self.metrics["shadows_built"] += 1
            self.metrics["shadow_leaves_built"] += leaf_count
            self.metrics["shadow_leaves_live"] += leaf_count
            self.metrics["peak_live_leaves"] = max(
                self.metrics["peak_live_leaves"], self.metrics["shadow_leaves_live"]
            )

    def shadow_released(self, leaf_count: int) -> None:
        """Record that a shadow has been discarded."""
        with self._lock:
            self.metrics["shadow_leaves_live"] -= leaf_count

    def storage_ratio(self) -> float:
        """Peak instantaneous leaves over cumulative leaves built (0 when nothing was built)."""
        with self._lock:
            built = self.metrics["shadow_leaves_built"]
            if built == 0:
                return 0.0
            return self.metrics["peak_live_leaves"] / built

    def record_response_time(self, response_time: float) -> None:
        """Record a response time measurement."""
        with self._lock:
            self.metrics["response_times"].append(response_time)
            # Keep only last 1000 measurements
            if len(self.metrics["response_times"]) > 1000:
                self.metrics["response_times"] = self.metrics["response_times"][-1000:]

    def get_metrics(self) -> Dict[str, Any]:
        """Get current metrics snapshot."""
        with self._lock:
            metrics = dict(self.metrics)
            metrics["response_times"] = list(self.metrics["response_times"])

        if metrics["response_times"]:
            metrics["avg_response_time"] = sum(metrics["response_times"]) / len(metrics["response_times"])
            metrics["max_response_time"] = max(metrics["response_times"])

        metrics["storage_ratio"] = self.storage_ratio()
        return metrics


class TracingSetup:
    """Setup tracing with OpenTelemetry."""

    def __init__(self, service_name: str = "shadowcount") -> None:
        self.service_name = service_name
        self.tracer_provider: Optional[TracerProvider] = None
        self.tracer: Optional[trace.Tracer] = None

    def setup_tracing(self) -> None:
        """Install a tracer provider and keep a tracer for the service."""
        try:
            self.tracer_provider = TracerProvider()
            trace.set_tracer_provider(self.tracer_provider)
            self.tracer = trace.get_tracer(self.service_name)
            logger.info(f"Tracing setup completed for service: {self.service_name}")
        except Exception as e:
            logger.error(f"Failed to setup tracing: {e}")

    def get_tracer(self) -> Optional[trace.Tracer]:
        """Get the tracer instance."""
        return self.tracer


# Global instances
metrics_collector = MetricsCollector()
tracing_setup = TracingSetup()


def monitor_performance(func: F) -> F:
    """Decorator to time estimator-level calls and count failures."""
    @wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        start_time = time.perf_counter()
        metrics_collector.increment_counter("estimator_runs")

        try:
            return func(*args, **kwargs)
        except Exception as e:
            metrics_collector.increment_counter("estimator_failures")
            logger.error(f"Error in {func.__name__}: {e}")
            raise
        finally:
            metrics_collector.record_response_time(time.perf_counter() - start_time)

    return cast(F, wrapper)


@contextmanager
def trace_operation(
    operation_name: str, attributes: Optional[Dict[str, Any]] = None
) -> Iterator[Optional[trace.Span]]:
    """Context manager for tracing operations; a no-op until tracing is set up."""
    tracer = tracing_setup.get_tracer()
    if not tracer:
        yield None
        return

    with tracer.start_as_current_span(operation_name) as span:
        if attributes:
            for key, value in attributes.items():
                span.set_attribute(key, value)

        try:
            yield span
        except Exception as e:
            span.record_exception(e)
            span.set_status(trace.Status(trace.StatusCode.ERROR, str(e)))
            raise


def setup_monitoring(level: str = "INFO", enable_tracing: bool = False) -> None:
    """Configure logging on standard error and, optionally, tracing."""
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format=LOG_FORMAT,
        handlers=[logging.StreamHandler(sys.stderr)],
        force=True,
    )

    if enable_tracing:
        tracing_setup.setup_tracing()

    logger.debug("Monitoring setup completed")


def resource_snapshot() -> Dict[str, Any]:
    """Current process memory and CPU figures."""
    try:
        process = psutil.Process()
        memory = process.memory_info()
        return {
            "rss_mb": memory.rss / 1024 / 1024,
            "cpu_percent": process.cpu_percent(interval=None),
            "timestamp": time.time(),
        }
    except Exception as e:
        logger.error(f"Failed to read process resources: {e}")
        return {"error": str(e), "timestamp": time.time()}
