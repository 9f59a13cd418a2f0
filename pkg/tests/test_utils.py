"""
工具模块测试
批处理、性能监控、异常退出码和日志
"""

import logging
import sys
import tempfile
import unittest
from pathlib import Path

# 添加项目根目录到路径
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from data_structures.union_find import PositionUnionFind, UnionFind
from utils.batch_processor import ChunkedExecutor, chunked, default_workers
from utils.exceptions import (EXIT_INPUT_ERROR, EXIT_INTERNAL_ERROR, ConfigurationError, MalformedRowError,
                              OutputExistsError, ParameterError, get_exception_handler)
from utils.logger import ROOT_LOGGER_NAME, get_logger, setup_global_logger
from utils.performance_monitor import PerformanceMonitor, system_info


def _square_sum(chunk):
    return sum(x * x for x in chunk)


class TestUnionFind(unittest.TestCase):
    """并查集测试"""

    def test_union_and_groups(self):
        """测试合并与分量"""
        uf = UnionFind(5)
        self.assertTrue(uf.union(0, 3))
        self.assertFalse(uf.union(3, 0))
        uf.union(3, 4)
        self.assertEqual(uf.component_count, 3)
        self.assertEqual(sorted(uf.groups().values()), [[0, 3, 4], [1], [2]])

    def test_long_chain(self):
        """测试长链不触发递归上限"""
        uf = PositionUnionFind.from_pairs(50000, ((i, i + 1) for i in range(49999)))
        self.assertEqual(uf.find(49999), uf.find(0))
        self.assertEqual(len(uf.clusters()), 1)

    def test_clusters_order(self):
        """测试簇按最小位置排序并忽略单例"""
        uf = PositionUnionFind.from_pairs(6, [(5, 2), (1, 4)])
        self.assertEqual(uf.clusters(), [(1, 4), (2, 5)])
        self.assertEqual(len(uf.clusters(min_size=1)), 4)


class TestBatchProcessor(unittest.TestCase):
    """批处理测试"""

    def test_chunked(self):
        """测试分块"""
        self.assertEqual(list(chunked(range(7), 3)), [[0, 1, 2], [3, 4, 5], [6]])
        self.assertEqual(list(chunked([], 3)), [])

    def test_order_independent_of_workers(self):
        """测试结果顺序与进程数无关"""
        items = list(range(1000))
        serial = list(ChunkedExecutor(1, 64).map(_square_sum, items))
        parallel = list(ChunkedExecutor(2, 64).map(_square_sum, items))
        self.assertEqual(serial, parallel)
        self.assertEqual(sum(serial), sum(x * x for x in items))

    def test_invalid_parameters(self):
        """测试非法进程数和块大小"""
        with self.assertRaises(ParameterError):
            ChunkedExecutor(0)
        with self.assertRaises(ParameterError):
            ChunkedExecutor(1, chunk_size=0)

    def test_default_workers(self):
        """测试默认进程数"""
        self.assertGreaterEqual(default_workers(), 1)


class TestPerformanceMonitor(unittest.TestCase):
    """性能监控测试"""

    def test_measure(self):
        """测试阶段记录"""
        monitor = PerformanceMonitor()
        with monitor.measure("stage", 10) as record:
            record.items = 20
        summary = monitor.summary()
        self.assertEqual(len(summary), 1)
        self.assertEqual(summary[0]['items'], 20)
        self.assertGreaterEqual(summary[0]['execution_time'], 0.0)

    def test_system_info(self):
        """测试运行环境信息"""
        info = system_info()
        self.assertGreaterEqual(info['logical_cpus'], 1)
        self.assertGreater(info['memory_total_mb'], 0)


class TestExceptionHandler(unittest.TestCase):
    """异常退出码测试"""

    def test_exit_codes(self):
        """测试输入错误为 1，其余为 2"""
        handler = get_exception_handler()
        for error in (ConfigurationError("x"), MalformedRowError("f.csv", 3, "bad"),
                      OutputExistsError("out.md"), FileNotFoundError("f")):
            self.assertEqual(handler.exit_code(error), EXIT_INPUT_ERROR)
        self.assertEqual(handler.exit_code(RuntimeError("boom")), EXIT_INTERNAL_ERROR)

    def test_row_details(self):
        """测试行号信息"""
        error = MalformedRowError("f.csv", 3, "bad")
        self.assertEqual(error.details['row'], 3)
        self.assertIn("第3行", error.message)


class TestLogger(unittest.TestCase):
    """日志测试"""

    def tearDown(self):
        setup_global_logger(level="WARNING")

    def test_file_handlers(self):
        """测试日志文件写出"""
        with tempfile.TemporaryDirectory() as tmp:
            setup_global_logger(tmp, "INFO")
            get_logger("LogCheck").info("写入日志文件")
            for handler in logging.getLogger(ROOT_LOGGER_NAME).handlers:
                handler.flush()
            logs = list(Path(tmp).glob(f"{ROOT_LOGGER_NAME}_*.log"))
            self.assertTrue(logs)
            self.assertIn("写入日志文件", "".join(p.read_text(encoding="utf-8") for p in logs))
            setup_global_logger(level="WARNING")

    def test_child_names(self):
        """测试子日志器挂在根日志器之下"""
        self.assertEqual(get_logger("LogCheck").logger.name, f"{ROOT_LOGGER_NAME}.LogCheck")


if __name__ == '__main__':
    unittest.main()
