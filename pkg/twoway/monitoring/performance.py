"""계산 단계별 실행 시간 측정."""

import functools
import logging
import time
from contextlib import contextmanager
from typing import Any, Callable, Dict, Iterator, Optional, ParamSpec, TypeVar

from .metrics import MetricsCollector, get_metrics_collector

logger = logging.getLogger(__name__)

P = ParamSpec("P")
T = TypeVar("T")


class PerformanceMonitor:
    """성능 모니터링 클래스."""

    def __init__(self, metrics_collector: Optional[MetricsCollector] = None):
        self.metrics = metrics_collector or get_metrics_collector()

    @contextmanager
    def timer(self, name: str, tags: Optional[Dict[str, str]] = None) -> Iterator[None]:
        """컨텍스트 매니저로 실행 시간 측정."""
        start = time.perf_counter()
        try:
            yield
        finally:
            duration_ms = (time.perf_counter() - start) * 1000
            self.metrics.record_histogram(f"{name}.duration", duration_ms, tags)
            logger.debug(f"Timer '{name}' completed in {duration_ms:.2f}ms")

    def timed(self, name: Optional[str] = None, tags: Optional[Dict[str, str]] = None):
        """함수 실행 시간을 측정하는 데코레이터."""

        def decorator(func: Callable[P, T]) -> Callable[P, T]:
            metric_name = name or f"function.{func.__module__}.{func.__name__}"

            @functools.wraps(func)
            def wrapper(*args: P.args, **kwargs: P.kwargs) -> T:
                with self.timer(metric_name, tags):
                    return func(*args, **kwargs)

            return wrapper

        return decorator

    def record_iteration(
        self, name: str, iterations: int, converged: bool, final_increment: float
    ) -> None:
        """반복 해법의 반복 횟수와 수렴 여부 기록."""
        tags = {"converged": str(converged).lower()}
        self.metrics.record_histogram(f"{name}.iterations", float(iterations), tags)
        self.metrics.increment_counter(f"{name}.runs", 1, tags)
        self.metrics.set_gauge(f"{name}.final_increment", final_increment)

    def get_performance_summary(self) -> Dict[str, Any]:
        """시간·반복 관련 지표 요약."""
        all_metrics = self.metrics.get_all_metrics()
        return {
            category: {
                key: value
                for key, value in all_metrics[category].items()
                if any(word in key for word in ("duration", "iterations", "runs"))
            }
            for category in ("histograms", "counters")
        }


_performance_monitor: Optional[PerformanceMonitor] = None


def get_performance_monitor() -> PerformanceMonitor:
    """전역 성능 모니터 인스턴스 반환."""
    global _performance_monitor
    if _performance_monitor is None:
        _performance_monitor = PerformanceMonitor()
    return _performance_monitor


def timed(name: Optional[str] = None, tags: Optional[Dict[str, str]] = None):
    """함수 실행 시간 측정 데코레이터."""
    return get_performance_monitor().timed(name, tags)
