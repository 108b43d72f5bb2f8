"""실행 중 수치 지표 수집 (카운터, 게이지, 히스토그램)."""

import logging
import threading
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

logger = logging.getLogger(__name__)


@dataclass
class CounterMetric:
    """누적 카운터."""

    name: str
    value: int = 0
    tags: Dict[str, str] = field(default_factory=dict)


@dataclass
class GaugeMetric:
    """최근 값."""

    name: str
    value: float
    tags: Dict[str, str] = field(default_factory=dict)


@dataclass
class HistogramMetric:
    """값 분포 (최근 max_samples개 유지)."""

    name: str
    values: List[float] = field(default_factory=list)
    tags: Dict[str, str] = field(default_factory=dict)
    max_samples: int = 1000

    def add_value(self, value: float) -> None:
        self.values.append(value)
        if len(self.values) > self.max_samples:
            self.values.pop(0)

    @property
    def count(self) -> int:
        return len(self.values)

    @property
    def sum(self) -> float:
        return float(np.sum(self.values)) if self.values else 0.0

    @property
    def avg(self) -> float:
        return self.sum / self.count if self.count > 0 else 0.0

    def percentile(self, p: float) -> float:
        """백분위수 계산."""
        if not self.values:
            return 0.0
        return float(np.percentile(self.values, p))

    def summary(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "count": self.count,
            "sum": self.sum,
            "avg": self.avg,
            "min": min(self.values) if self.values else 0.0,
            "max": max(self.values) if self.values else 0.0,
            "p50": self.percentile(50),
            "p95": self.percentile(95),
            "tags": self.tags,
        }


class MetricsCollector:
    """스레드 안전 지표 수집기 (스윕 작업자 스레드가 공유)."""

    def __init__(self) -> None:
        self._lock = threading.RLock()
        self._counters: Dict[str, CounterMetric] = {}
        self._gauges: Dict[str, GaugeMetric] = {}
        self._histograms: Dict[str, HistogramMetric] = {}

    def increment_counter(
        self, name: str, value: int = 1, tags: Optional[Dict[str, str]] = None
    ) -> None:
        tags = tags or {}
        key = self._make_key(name, tags)
        with self._lock:
            if key not in self._counters:
                self._counters[key] = CounterMetric(name=name, tags=tags)
            self._counters[key].value += value

    def set_gauge(
        self, name: str, value: float, tags: Optional[Dict[str, str]] = None
    ) -> None:
        tags = tags or {}
        with self._lock:
            self._gauges[self._make_key(name, tags)] = GaugeMetric(name, value, tags)

    def record_histogram(
        self, name: str, value: float, tags: Optional[Dict[str, str]] = None
    ) -> None:
        tags = tags or {}
        key = self._make_key(name, tags)
        with self._lock:
            if key not in self._histograms:
                self._histograms[key] = HistogramMetric(name=name, tags=tags)
            self._histograms[key].add_value(value)

    def get_counter(
        self, name: str, tags: Optional[Dict[str, str]] = None
    ) -> Optional[CounterMetric]:
        with self._lock:
            return self._counters.get(self._make_key(name, tags or {}))

    def get_histogram(
        self, name: str, tags: Optional[Dict[str, str]] = None
    ) -> Optional[HistogramMetric]:
        with self._lock:
            return self._histograms.get(self._make_key(name, tags or {}))

    def get_all_metrics(self) -> Dict[str, Any]:
        with self._lock:
            return {
                "counters": {k: v.value for k, v in self._counters.items()},
                "gauges": {k: v.value for k, v in self._gauges.items()},
                "histograms": {k: v.summary() for k, v in self._histograms.items()},
            }

    def reset_metrics(self) -> None:
        with self._lock:
            self._counters.clear()
            self._gauges.clear()
            self._histograms.clear()
            logger.debug("All metrics have been reset")

    def _make_key(self, name: str, tags: Dict[str, str]) -> str:
        if not tags:
            return name
        tag_parts = [f"{k}: {v}" for k, v in sorted(tags.items())]
        return f"{name}|{','.join(tag_parts)}"


_metrics_collector: Optional[MetricsCollector] = None


def get_metrics_collector() -> MetricsCollector:
    """전역 지표 수집기 인스턴스 반환."""
    global _metrics_collector
    if _metrics_collector is None:
        _metrics_collector = MetricsCollector()
    return _metrics_collector
