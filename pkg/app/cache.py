from __future__ import annotations

import logging
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, Optional

from pydantic import ValidationError

from adapters.metrics.base import Metrics
from adapters.metrics.noop import NoOpMetrics
from app.schemas import ExperimentRecord

log = logging.getLogger(__name__)


class ExperimentCache:
    """
    Content-addressed on-disk cache of experiment records, one JSON file per
    key. Writes go through a temp file and os.replace, so readers only ever
    see complete entries and concurrent puts of one key leave one of them.
    """

    def __init__(
        self,
        directory: str | Path,
        version: str,
        metrics: Optional[Metrics] = None,
    ) -> None:
        self.directory = Path(directory)
        self.version = version
        self.metrics = metrics or NoOpMetrics()
        self.enabled = True
        try:
            self.directory.mkdir(parents=True, exist_ok=True)
            if not os.access(self.directory, os.W_OK):
                raise PermissionError(f"{self.directory} is not writable")
        except OSError as exc:
            log.warning(
                "cache directory unusable; caching disabled",
                extra={"cache_dir": str(self.directory), "error": str(exc)},
            )
            self.enabled = False

    def _path(self, key: str) -> Path:
        return self.directory / f"{key}.json"

    def get(self, experiment: str, parameters: Dict[str, Any]) -> Optional[ExperimentRecord]:
        """Return the cached record, or None on miss, stale version or corruption."""
        if not self.enabled:
            return None
        key = ExperimentRecord.key_for(experiment, parameters)
        path = self._path(key)
        if not path.exists():
            self.metrics.inc_cache_event(hit=False)
            return None
        try:
            record = ExperimentRecord.model_validate_json(path.read_text(encoding="utf-8"))
        except (OSError, ValidationError) as exc:
            log.warning(
                "corrupt cache entry ignored; recomputing",
                extra={"path": str(path), "error": str(exc)},
            )
            self.metrics.inc_cache_event(hit=False)
            return None

        if (
            record.version != self.version
            or record.experiment != experiment
            or record.parameters != parameters
        ):
            self.metrics.inc_cache_event(hit=False)
            return None

        self.metrics.inc_cache_event(hit=True)
        return record

    def put(self, record: ExperimentRecord) -> None:
        if not self.enabled:
            return
        path = self._path(record.cache_key)
        try:
            fd, tmp = tempfile.mkstemp(dir=self.directory, prefix=".tmp-", suffix=".json")
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(record.model_dump_json())
            os.replace(tmp, path)
        except OSError as exc:
            log.warning(
                "cache write failed; caching disabled",
                extra={"path": str(path), "error": str(exc)},
            )
            self.enabled = False
