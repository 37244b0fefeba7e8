from __future__ import annotations

from adapters.metrics.base import Metrics, RunStatus


class NoOpMetrics(Metrics):
    def observe_experiment_duration(self, *, experiment: str, seconds: float) -> None:
        return

    def inc_experiment_run(self, *, experiment: str, status: RunStatus) -> None:
        return

    def inc_invariant_check(self, *, check: str, ok: bool) -> None:
        return

    def inc_cache_event(self, *, hit: bool) -> None:
        return

    def inc_power_iterations(self, *, certification: str, count: int) -> None:
        return
