"""
批处理系统
把大批量的独立计算（候选对距离、跨划分匹配）分块交给进程池，结果按提交顺序返回
"""

import itertools
from collections import deque
from concurrent.futures import Future, ProcessPoolExecutor
from typing import Any, Callable, Deque, Iterable, Iterator, List, Optional, Sequence, Tuple, TypeVar

from utils.exceptions import validate_parameter
from utils.logger import LoggerMixin


T = TypeVar("T")
R = TypeVar("R")


def chunked(items: Iterable[T], chunk_size: int) -> Iterator[List[T]]:
    """把可迭代对象切成固定大小的块"""
    iterator = iter(items)
    while True:
        chunk = list(itertools.islice(iterator, chunk_size))
        if not chunk:
            return
        yield chunk


class ChunkedExecutor(LoggerMixin):
    """
    分块执行器

    workers == 1 时在当前进程内顺序执行，不触碰模块级状态；否则使用进程池。
    在途任务数受限，块结果严格按提交顺序产出，输出与工作进程数无关。
    """

    def __init__(self, workers: int = 1, chunk_size: int = 2048,
                 initializer: Optional[Callable[..., None]] = None,
                 initargs: Sequence[Any] = ()):
        """
        初始化分块执行器

        Args:
            workers: 工作进程数
            chunk_size: 每块的元素数
            initializer: 进程池工作进程的初始化函数；串行模式不调用，状态由 func 自带
            initargs: 初始化函数参数
        """
        validate_parameter(workers, "workers", lambda v: isinstance(v, int) and v >= 1, ">= 1 的整数")
        validate_parameter(chunk_size, "chunk_size", lambda v: isinstance(v, int) and v >= 1, ">= 1 的整数")
        self.workers = workers
        self.chunk_size = chunk_size
        self.initializer = initializer
        self.initargs = tuple(initargs)

        # 处理状态
        self.submitted_chunks = 0
        self.completed_chunks = 0

    def map(self, func: Callable[[List[T]], R], items: Iterable[T]) -> Iterator[R]:
        """
        对每个块调用 func(块)，按顺序产出结果

        Args:
            func: 可调用对象；进程池模式下需为可pickle的模块级函数
            items: 待处理元素
        """
        chunks = chunked(items, self.chunk_size)
        if self.workers == 1:
            yield from self._map_inline(func, chunks)
        else:
            yield from self._map_parallel(func, chunks)

    def _map_inline(self, func, chunks) -> Iterator[R]:
        for chunk in chunks:
            self.submitted_chunks += 1
            result = func(chunk)
            self.completed_chunks += 1
            yield result

    def _map_parallel(self, func, chunks) -> Iterator[R]:
        max_in_flight = self.workers * 2
        pending: Deque[Tuple[int, Future]] = deque()

        with ProcessPoolExecutor(max_workers=self.workers, initializer=self.initializer,
                                 initargs=self.initargs) as executor:
            for chunk in chunks:
                pending.append((self.submitted_chunks, executor.submit(func, chunk)))
                self.submitted_chunks += 1
                if len(pending) >= max_in_flight:
                    yield self._collect(pending.popleft())
            while pending:
                yield self._collect(pending.popleft())

        self.logger.debug(f"并行处理完成 - 进程: {self.workers}, 块: {self.completed_chunks}")

    def _collect(self, entry: Tuple[int, Future]):
        index, future = entry
        try:
            result = future.result()
        except Exception as e:
            self.logger.error(f"处理块 {index} 失败", exception=e)
            raise
        self.completed_chunks += 1
        return result


def default_workers() -> int:
    """默认工作进程数：可用逻辑核数"""
    import psutil
    return max(1, psutil.cpu_count(logical=True) or 1)
