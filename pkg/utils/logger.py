"""
日志系统模块
提供统一的日志记录功能，控制台输出到stderr，可选按日期写入日志文件
"""

import functools
import logging
import sys
import time
import traceback
from datetime import datetime
from pathlib import Path
from typing import Optional, Union


ROOT_LOGGER_NAME = "CorpusAudit"

_LEVEL_MAP = {
    "DEBUG": logging.DEBUG,
    "INFO": logging.INFO,
    "WARNING": logging.WARNING,
    "ERROR": logging.ERROR,
    "CRITICAL": logging.CRITICAL
}

_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(filename)s:%(lineno)d - %(message)s'


class AuditLogger:
    """语料审计系统日志管理器"""

    def __init__(self, name: str = ROOT_LOGGER_NAME,
                 log_dir: Optional[Union[str, Path]] = None):
        """
        初始化日志管理器

        Args:
            name: 日志器名称（子日志器挂在 CorpusAudit 之下）
            log_dir: 日志文件目录，None 表示只输出到控制台
        """
        self.name = name
        self.log_dir = Path(log_dir) if log_dir else None

        self.logger = logging.getLogger(name)

        # 只有根日志器挂处理器，子日志器向上传播
        if name == ROOT_LOGGER_NAME and not self.logger.handlers:
            self.logger.setLevel(logging.INFO)
            self._setup_handlers()

    def _setup_handlers(self):
        """设置日志处理器"""
        formatter = logging.Formatter(_FORMAT)

        # 控制台处理器，stdout留给命令行输出
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(logging.WARNING)
        console_handler.setFormatter(formatter)
        self.logger.addHandler(console_handler)

        if self.log_dir is None:
            return

        self.log_dir.mkdir(parents=True, exist_ok=True)
        stamp = datetime.now().strftime('%Y%m%d')

        # 文件处理器 - 所有日志
        file_handler = logging.FileHandler(self.log_dir / f"{self.name}_{stamp}.log", encoding='utf-8')
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(formatter)
        self.logger.addHandler(file_handler)

        # 错误文件处理器 - 只记录错误
        error_handler = logging.FileHandler(self.log_dir / f"{self.name}_errors_{stamp}.log",
                                            encoding='utf-8')
        error_handler.setLevel(logging.ERROR)
        error_handler.setFormatter(formatter)
        self.logger.addHandler(error_handler)

    def set_console_level(self, level: str):
        """调整控制台输出级别"""
        numeric = _LEVEL_MAP.get(level.upper(), logging.INFO)
        self.logger.setLevel(min(numeric, logging.DEBUG) if self.log_dir else numeric)
        for handler in self.logger.handlers:
            if isinstance(handler, logging.StreamHandler) and not isinstance(handler, logging.FileHandler):
                handler.setLevel(numeric)

    def debug(self, message: str, **kwargs):
        """记录调试信息"""
        self.logger.debug(message, **kwargs)

    def info(self, message: str, **kwargs):
        """记录一般信息"""
        self.logger.info(message, **kwargs)

    def warning(self, message: str, **kwargs):
        """记录警告信息"""
        self.logger.warning(message, **kwargs)

    def error(self, message: str, exception: Optional[Exception] = None, **kwargs):
        """记录错误信息"""
        if exception:
            self.logger.error(f"{message}: {str(exception)}", **kwargs)
            self.logger.debug(traceback.format_exc())
        else:
            self.logger.error(message, **kwargs)

    def log_performance(self, operation: str, duration: float, **metrics):
        """记录性能指标"""
        message = f"性能统计 - {operation}: 耗时 {duration:.3f}s"
        if metrics:
            metric_str = ", ".join([f"{k}={v}" for k, v in metrics.items()])
            message += f", {metric_str}"
        self.info(message)

    def log_corpus_info(self, source: str, records: int, language: str):
        """记录语料加载信息"""
        self.info(f"语料加载 - 来源: {source}, 记录数: {records}, 语言: {language}")

    def log_stage(self, stage: str, kept: int, removed: int):
        """记录一个清洗阶段的保留/移除数量"""
        self.info(f"阶段完成 - {stage}: 保留 {kept}, 移除 {removed}")


class LoggerMixin:
    """日志混入类，为其他类提供日志功能"""

    _logger: Optional[AuditLogger] = None

    @property
    def logger(self) -> AuditLogger:
        """获取日志器"""
        if self._logger is None:
            get_global_logger()
            self._logger = AuditLogger(f"{ROOT_LOGGER_NAME}.{self.__class__.__name__}")
        return self._logger


def get_logger(name: str = ROOT_LOGGER_NAME) -> AuditLogger:
    """获取日志器实例"""
    get_global_logger()
    if name != ROOT_LOGGER_NAME and not name.startswith(ROOT_LOGGER_NAME + "."):
        name = f"{ROOT_LOGGER_NAME}.{name}"
    return AuditLogger(name)


def log_performance(operation_name: str = None):
    """装饰器：自动记录函数性能"""
    def decorator(func):
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            logger = get_logger()
            op_name = operation_name or func.__name__
            start_time = time.perf_counter()

            try:
                result = func(*args, **kwargs)
                logger.log_performance(op_name, time.perf_counter() - start_time)
                return result
            except Exception as e:
                duration = time.perf_counter() - start_time
                logger.debug(f"操作 {op_name} 失败，耗时 {duration:.3f}s: {e}")
                raise
        return wrapper
    return decorator


# 全局日志器实例
_global_logger = None


def setup_global_logger(log_dir: Optional[Union[str, Path]] = None, level: str = "INFO") -> AuditLogger:
    """设置全局日志器（重复调用会替换处理器）"""
    global _global_logger
    root = logging.getLogger(ROOT_LOGGER_NAME)
    for handler in list(root.handlers):
        root.removeHandler(handler)
        handler.close()

    _global_logger = AuditLogger(ROOT_LOGGER_NAME, log_dir)
    _global_logger.set_console_level(level)
    return _global_logger


def get_global_logger() -> AuditLogger:
    """获取全局日志器"""
    global _global_logger
    if _global_logger is None:
        _global_logger = setup_global_logger(level="WARNING")
    return _global_logger
