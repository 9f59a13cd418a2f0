"""
性能监控
记录各阶段的耗时、内存变化和吞吐量
"""

import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Iterator, List

import psutil

from utils.logger import LoggerMixin


@dataclass
class StagePerformance:
    """单个阶段的性能数据"""
    operation: str
    items: int
    execution_time: float = 0.0
    memory_start_mb: float = 0.0
    memory_end_mb: float = 0.0
    extra: Dict[str, Any] = field(default_factory=dict)

    @property
    def throughput(self) -> float:
        """每秒处理的条目数"""
        return self.items / self.execution_time if self.execution_time > 0 else 0.0

    @property
    def memory_delta_mb(self) -> float:
        return self.memory_end_mb - self.memory_start_mb

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['throughput'] = self.throughput
        return data


class PerformanceMonitor(LoggerMixin):
    """性能监控器"""

    def __init__(self):
        self.history: List[StagePerformance] = []
        self._process = psutil.Process()

    def _rss_mb(self) -> float:
        return self._process.memory_info().rss / 1024 / 1024

    @contextmanager
    def measure(self, operation: str, items: int = 0) -> Iterator[StagePerformance]:
        """
        测量一个阶段

        Args:
            operation: 阶段名称
            items: 处理条目数（可在块内通过返回对象修改）
        """
        record = StagePerformance(operation, items, memory_start_mb=self._rss_mb())
        start_time = time.perf_counter()
        try:
            yield record
        finally:
            record.execution_time = time.perf_counter() - start_time
            record.memory_end_mb = self._rss_mb()
            self.history.append(record)
            self.logger.log_performance(operation, record.execution_time, items=record.items,
                                        throughput=f"{record.throughput:.1f}/s",
                                        memory_delta_mb=f"{record.memory_delta_mb:.1f}")

    def summary(self) -> List[Dict[str, Any]]:
        return [record.to_dict() for record in self.history]


def system_info() -> Dict[str, Any]:
    """运行环境概况（核数、内存）"""
    memory = psutil.virtual_memory()
    return {
        'logical_cpus': psutil.cpu_count(logical=True),
        'physical_cpus': psutil.cpu_count(logical=False),
        'memory_total_mb': round(memory.total / 1024 / 1024),
        'memory_available_mb': round(memory.available / 1024 / 1024),
    }
