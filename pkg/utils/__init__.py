"""
工具模块
包含日志、异常、配置、语料读写和批处理工具
"""

from .logger import get_logger, setup_global_logger, LoggerMixin
from .exceptions import CorpusAuditError, CorpusLoadError, ParameterError, ConfigurationError

__all__ = [
    'get_logger',
    'setup_global_logger',
    'LoggerMixin',
    'CorpusAuditError',
    'CorpusLoadError',
    'ParameterError',
    'ConfigurationError'
]
