from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Literal

RunStatus = Literal["ok", "violation", "error"]


class Metrics(ABC):
    @abstractmethod
    def observe_experiment_duration(self, *, experiment: str, seconds: float) -> None: ...

    @abstractmethod
    def inc_experiment_run(self, *, experiment: str, status: RunStatus) -> None: ...

    @abstractmethod
    def inc_invariant_check(self, *, check: str, ok: bool) -> None: ...

    @abstractmethod
    def inc_cache_event(self, *, hit: bool) -> None: ...

    @abstractmethod
    def inc_power_iterations(self, *, certification: str, count: int) -> None: ...
