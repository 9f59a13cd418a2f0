"""
自定义异常类和异常处理系统
提供专门的异常类型、参数验证和命令行退出码映射
"""

from typing import Any, Callable, Dict, Optional

from utils.logger import get_logger


EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_INTERNAL_ERROR = 2


class CorpusAuditError(Exception):
    """语料审计系统基础异常类"""

    def __init__(self, message: str, error_code: str = None, details: Dict[str, Any] = None):
        """
        初始化异常

        Args:
            message: 错误消息
            error_code: 错误代码
            details: 错误详细信息
        """
        super().__init__(message)
        self.message = message
        self.error_code = error_code or "UNKNOWN_ERROR"
        self.details = details or {}

        get_logger("Exception").debug(f"[{self.error_code}] {message}")


class CorpusLoadError(CorpusAuditError):
    """语料加载异常"""

    def __init__(self, file_path: str, reason: str = None, row: Optional[int] = None,
                 field: Optional[str] = None):
        self.file_path = str(file_path)
        self.reason = reason or "未知原因"
        self.row = row
        self.field = field

        location = self.file_path
        if row is not None:
            location += f" 第{row}行"
        if field is not None:
            location += f" 字段 '{field}'"
        message = f"语料加载失败: {location} - {self.reason}"
        details = {"file_path": self.file_path, "reason": reason, "row": row, "field": field}

        super().__init__(message, "INPUT_ERROR", details)


class MalformedRowError(CorpusLoadError):
    """行格式错误（行号从1开始）"""

    def __init__(self, file_path: str, row: int, reason: str):
        super().__init__(file_path, f"行格式错误: {reason}", row=row)


class DuplicateIdError(CorpusLoadError):
    """记录ID重复"""

    def __init__(self, file_path: str, record_id: str, row: Optional[int] = None):
        self.record_id = record_id
        super().__init__(file_path, f"重复的记录ID '{record_id}'", row=row)


class MissingFieldError(CorpusLoadError):
    """映射字段缺失"""

    def __init__(self, file_path: str, field: str, row: Optional[int] = None):
        super().__init__(file_path, "缺少映射字段", row=row, field=field)


class CorpusWriteError(CorpusAuditError):
    """语料写出异常"""

    def __init__(self, file_path: str, reason: str = None):
        self.file_path = str(file_path)
        self.reason = reason or "未知原因"

        message = f"文件写出失败: {self.file_path} - {self.reason}"
        details = {"file_path": self.file_path, "reason": reason}

        super().__init__(message, "OUTPUT_ERROR", details)


class OutputExistsError(CorpusWriteError):
    """输出文件已存在且未指定 --force"""

    def __init__(self, file_path: str):
        super().__init__(file_path, "文件已存在，使用 --force 覆盖")


class ParameterError(CorpusAuditError):
    """参数错误异常"""

    def __init__(self, parameter_name: str, value: Any, expected: str = None):
        self.parameter_name = parameter_name
        self.value = value
        self.expected = expected

        message = f"参数错误: {parameter_name} = {value!r}"
        if expected:
            message += f", 期望: {expected}"

        details = {"parameter": parameter_name, "value": value, "expected": expected}

        super().__init__(message, "PARAMETER_ERROR", details)


class ConfigurationError(CorpusAuditError):
    """配置错误异常"""

    def __init__(self, config_key: str, reason: str = None):
        self.config_key = config_key
        self.reason = reason or "配置无效"

        message = f"配置错误: {config_key} - {self.reason}"
        details = {"config_key": config_key, "reason": reason}

        super().__init__(message, "CONFIG_ERROR", details)


class ValidationError(CorpusAuditError):
    """数据验证异常"""

    def __init__(self, data_type: str, validation_rule: str, value: Any = None):
        self.data_type = data_type
        self.validation_rule = validation_rule
        self.value = value

        message = f"数据验证失败: {data_type} - {validation_rule}"
        if value is not None:
            message += f" (值: {value})"

        details = {"data_type": data_type, "validation_rule": validation_rule, "value": value}

        super().__init__(message, "VALIDATION_ERROR", details)


class UsageError(CorpusAuditError):
    """命令行用法错误"""

    def __init__(self, message: str):
        super().__init__(f"用法错误: {message}", "USAGE_ERROR", {"usage": message})


class ExceptionHandler:
    """统一异常处理器，把异常映射为命令行退出码"""

    _INPUT_CODES = {"INPUT_ERROR", "OUTPUT_ERROR", "PARAMETER_ERROR",
                    "CONFIG_ERROR", "USAGE_ERROR", "VALIDATION_ERROR"}

    def __init__(self):
        self.logger = get_logger("ExceptionHandler")

    def exit_code(self, exception: BaseException) -> int:
        """
        计算退出码

        Returns:
            1 表示输入/用法错误，2 表示内部错误
        """
        if isinstance(exception, CorpusAuditError) and exception.error_code in self._INPUT_CODES:
            return EXIT_INPUT_ERROR
        if isinstance(exception, (FileNotFoundError, PermissionError, IsADirectoryError)):
            return EXIT_INPUT_ERROR
        return EXIT_INTERNAL_ERROR

    def handle_exception(self, exception: BaseException, context: str = None) -> int:
        """记录异常并返回退出码"""
        code = self.exit_code(exception)
        context_msg = f" (上下文: {context})" if context else ""
        if code == EXIT_INTERNAL_ERROR:
            self.logger.error(f"内部错误{context_msg}", exception=exception)
        else:
            self.logger.debug(f"输入错误{context_msg}: {exception}")
        return code


def validate_parameter(value: Any, param_name: str, validator_func: Callable[[Any], bool],
                       error_message: str = None):
    """
    参数验证函数

    Args:
        value: 要验证的值
        param_name: 参数名称
        validator_func: 验证函数
        error_message: 期望值描述
    """
    if not validator_func(value):
        raise ParameterError(param_name, value, error_message)


# 全局异常处理器
_global_exception_handler = None


def get_exception_handler() -> ExceptionHandler:
    """获取全局异常处理器"""
    global _global_exception_handler
    if _global_exception_handler is None:
        _global_exception_handler = ExceptionHandler()
    return _global_exception_handler
