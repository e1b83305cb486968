from __future__ import annotations

import logging
import time
from contextlib import contextmanager
from typing import Dict, Iterator


class StageTimer:
    """Accumulates wall-clock time per pipeline stage and logs one snapshot."""

    def __init__(self, event: str = "synthesis_stage_timings") -> None:
        self._event = event
        self._metrics: Dict[str, Dict[str, float]] = {}
        self._logger = logging.getLogger(__name__)

    @contextmanager
    def track_time(self, stage: str) -> Iterator[None]:
        start = time.perf_counter()
        try:
            yield
        finally:
            elapsed = time.perf_counter() - start
            bucket = self._metrics.setdefault(stage, {"count": 0.0, "total": 0.0, "max": 0.0})
            bucket["count"] += 1.0
            bucket["total"] += elapsed
            bucket["max"] = max(bucket["max"], elapsed)

    def totals(self) -> Dict[str, float]:
        return {stage: values["total"] for stage, values in self._metrics.items()}

    def flush(self) -> Dict[str, float]:
        if not self._metrics:
            return {}
        snapshot = self.totals()
        self._logger.info(self._event, extra={"metrics": snapshot})
        self._metrics.clear()
        return snapshot


class NullTimer(StageTimer):
    @contextmanager
    def track_time(self, stage: str) -> Iterator[None]:
        yield

    def flush(self) -> Dict[str, float]:
        return {}
