"""모니터링 패키지"""

from .metrics import MetricsCollector, get_metrics_collector
from .performance import PerformanceMonitor, get_performance_monitor, timed

__all__ = [
    "MetricsCollector",
    "get_metrics_collector",
    "PerformanceMonitor",
    "get_performance_monitor",
    "timed",
]
