from __future__ import annotations

from prometheus_client import Counter, Histogram
from paraproducts.prom import REGISTRY

from adapters.metrics.base import Metrics, RunStatus

# -----------------------------------------------------------------------------
# Experiment-level metrics
# -----------------------------------------------------------------------------
experiment_duration_seconds = Histogram(
    "experiment_duration_seconds",
    "Wall time (s) of each experiment suite",
    ["experiment"],
    buckets=(0.1, 0.5, 1, 2, 5, 10, 30, 60, 120, 300, 600),
    registry=REGISTRY,
)

experiment_runs_total = Counter(
    "experiment_runs_total",
    "Count of experiment runs labeled by experiment and status",
    ["experiment", "status"],
    registry=REGISTRY,
)

# -----------------------------------------------------------------------------
# Invariant checks
# -----------------------------------------------------------------------------
invariant_checks_total = Counter(
    "invariant_checks_total",
    "Count of asserted invariant checks labeled by check and ok",
    ["check", "ok"],
    registry=REGISTRY,
)

# -----------------------------------------------------------------------------
# Cache
# -----------------------------------------------------------------------------
cache_events_total = Counter(
    "cache_events_total",
    "Experiment cache hit/miss events",
    ["hit"],
    registry=REGISTRY,
)

# -----------------------------------------------------------------------------
# Power iteration
# -----------------------------------------------------------------------------
power_iterations_total = Counter(
    "power_iterations_total",
    "Power iterations spent, labeled by certification of the kept estimate",
    ["certification"],
    registry=REGISTRY,
)


class PrometheusMetrics(Metrics):
    def observe_experiment_duration(self, *, experiment: str, seconds: float) -> None:
        experiment_duration_seconds.labels(experiment=experiment).observe(float(seconds))

    def inc_experiment_run(self, *, experiment: str, status: RunStatus) -> None:
        experiment_runs_total.labels(experiment=experiment, status=status).inc()

    def inc_invariant_check(self, *, check: str, ok: bool) -> None:
        invariant_checks_total.labels(check=check, ok=("true" if ok else "false")).inc()

    def inc_cache_event(self, *, hit: bool) -> None:
        cache_events_total.labels(hit=("true" if hit else "false")).inc()

    def inc_power_iterations(self, *, certification: str, count: int) -> None:
        power_iterations_total.labels(certification=certification).inc(int(count))


# -----------------------------------------------------------------------------
# Label priming to keep exported files stable
# -----------------------------------------------------------------------------
for hit in ("true", "false"):
    cache_events_total.labels(hit=hit).inc(0)

for certification in ("exact", "lower-bound", "heuristic"):
    power_iterations_total.labels(certification=certification).inc(0)
