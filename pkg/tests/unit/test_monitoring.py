"""지표 수집기와 성능 모니터 테스트"""

import threading

import pytest

from twoway.monitoring import MetricsCollector, PerformanceMonitor


@pytest.fixture
def collector():
    return MetricsCollector()


class TestMetricsCollector:
    """카운터, 게이지, 히스토그램"""

    def test_counter_with_tags(self, collector):
        collector.increment_counter("runs", tags={"converged": "true"})
        collector.increment_counter("runs", 2, tags={"converged": "true"})
        collector.increment_counter("runs")
        assert collector.get_counter("runs", {"converged": "true"}).value == 3
        assert collector.get_counter("runs").value == 1

    def test_histogram_summary(self, collector):
        for value in (1.0, 2.0, 3.0, 4.0):
            collector.record_histogram("duration", value)
        summary = collector.get_histogram("duration").summary()
        assert summary["count"] == 4
        assert summary["avg"] == pytest.approx(2.5)
        assert summary["min"] == 1.0 and summary["max"] == 4.0

    def test_thread_safety(self, collector):
        def work():
            for _ in range(500):
                collector.increment_counter("shared")

        threads = [threading.Thread(target=work) for _ in range(4)]
        for thread in threads:
            thread.start()
        for thread in threads:
            thread.join()
        assert collector.get_counter("shared").value == 2000

    def test_reset(self, collector):
        collector.set_gauge("final_increment", 1e-12)
        collector.reset_metrics()
        assert collector.get_all_metrics() == {"counters": {}, "gauges": {}, "histograms": {}}


class TestPerformanceMonitor:
    """시간 측정과 반복 기록"""

    def test_timed_decorator(self, collector):
        monitor = PerformanceMonitor(collector)

        @monitor.timed("stage")
        def stage(x):
            return 2 * x

        assert stage(3) == 6
        assert collector.get_histogram("stage.duration").count == 1

    def test_record_iteration_summary(self, collector):
        monitor = PerformanceMonitor(collector)
        monitor.record_iteration("solver.neumann", 12, True, 5e-11)
        summary = monitor.get_performance_summary()
        assert summary["counters"] == {"solver.neumann.runs|converged: true": 1}
        histogram = summary["histograms"]["solver.neumann.iterations|converged: true"]
        assert histogram["max"] == 12.0
        assert collector.get_all_metrics()["gauges"]["solver.neumann.final_increment"] == 5e-11
