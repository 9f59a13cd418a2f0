"""
配置管理系统
读取分节的 YAML/JSON 配置文件，合并命令行覆盖项，验证并物化完整的运行配置
"""

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Union

import yaml

from core.near_dedup import NearDupConfig
from core.normalizer import NormalizationConfig
from data_structures.corpus import FieldMapping, FilterConfig, Language
from utils.batch_processor import default_workers
from utils.corpus_io import SUPPORTED_FORMATS
from utils.exceptions import ConfigurationError, CorpusAuditError, OutputExistsError
from utils.logger import get_logger


REPORT_FORMATS = ("json", "csv", "markdown")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")
RUN_CONFIG_SUFFIX = "run_config.yaml"


def run_config_name(stem: str, command: str) -> str:
    """运行配置文件名 <输入文件名>.<命令>.run_config.yaml"""
    return f"{stem}.{command}.{RUN_CONFIG_SUFFIX}"


@dataclass(frozen=True)
class InputConfig:
    """输入配置"""
    paths: List[str] = field(default_factory=list)
    format: Optional[str] = None
    text_field: str = "text"
    id_field: Optional[str] = None
    label_field: Optional[str] = None
    group_field: Optional[str] = None
    language: str = "english"
    min_tokens: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "paths", [str(p) for p in self.paths])
        if self.format is not None and self.format not in SUPPORTED_FORMATS:
            raise ConfigurationError("input.format", f"必须是 {' / '.join(SUPPORTED_FORMATS)}")
        if self.language not in tuple(item.value for item in Language):
            raise ConfigurationError("input.language", "必须是 english 或 chinese")
        if self.min_tokens is not None and (not isinstance(self.min_tokens, int) or self.min_tokens < 1):
            raise ConfigurationError("input.min_tokens", "必须是 >= 1 的整数")

    def mapping(self) -> FieldMapping:
        return FieldMapping(self.text_field, self.id_field, self.label_field, self.group_field)

    def filter_config(self) -> FilterConfig:
        return FilterConfig(self.min_tokens)


@dataclass(frozen=True)
class SplitConfig:
    """数据划分配置"""
    strategy: str = "random"
    ratio: float = 0.8
    seed: int = 42

    def __post_init__(self):
        if self.strategy not in ("random", "leave_one_out"):
            raise ConfigurationError("split.strategy", "必须是 random 或 leave_one_out")
        if not 0 < self.ratio < 1:
            raise ConfigurationError("split.ratio", "必须在 (0, 1) 内")


@dataclass(frozen=True)
class OutputConfig:
    """输出配置"""
    directory: str = "audit_output"
    report_formats: List[str] = field(default_factory=lambda: ["markdown"])
    corpus_format: str = "jsonl"
    force: bool = False

    def __post_init__(self):
        object.__setattr__(self, "report_formats", list(self.report_formats))
        unknown = [f for f in self.report_formats if f not in REPORT_FORMATS]
        if unknown or not self.report_formats:
            raise ConfigurationError("output.report_formats", f"必须是 {' / '.join(REPORT_FORMATS)} 的非空子集")
        if self.corpus_format not in SUPPORTED_FORMATS:
            raise ConfigurationError("output.corpus_format", f"必须是 {' / '.join(SUPPORTED_FORMATS)}")


@dataclass(frozen=True)
class LoggingConfig:
    """日志配置"""
    level: str = "WARNING"
    log_dir: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "level", str(self.level).upper())
        if self.level not in LOG_LEVELS:
            raise ConfigurationError("logging.level", f"必须是 {' / '.join(LOG_LEVELS)}")


@dataclass(frozen=True)
class PerformanceConfig:
    """性能配置；workers 为空时取可用逻辑核数"""
    workers: Optional[int] = None
    chunk_size: int = 256

    def __post_init__(self):
        if self.workers is None:
            object.__setattr__(self, "workers", default_workers())
        if not isinstance(self.workers, int) or self.workers < 1:
            raise ConfigurationError("performance.workers", "必须是 >= 1 的整数")
        if self.chunk_size < 1:
            raise ConfigurationError("performance.chunk_size", "必须是 >= 1 的整数")


SECTIONS = {
    'input': InputConfig,
    'normalization': NormalizationConfig,
    'near_dup': NearDupConfig,
    'split': SplitConfig,
    'output': OutputConfig,
    'logging': LoggingConfig,
    'performance': PerformanceConfig,
}


@dataclass(frozen=True)
class RunConfig:
    """一次运行的完整配置，所有默认值都已物化"""
    command: str
    input: InputConfig
    normalization: NormalizationConfig
    near_dup: NearDupConfig
    split: SplitConfig
    output: OutputConfig
    logging: LoggingConfig
    performance: PerformanceConfig
    version: str = ""
    options: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {'command': self.command, 'version': self.version, 'options': dict(self.options)}
        for name in SECTIONS:
            data[name] = asdict(getattr(self, name))
        return data


class ConfigManager:
    """配置管理器：文件 < 命令行覆盖"""

    def __init__(self, config_file: Optional[Union[str, Path]] = None):
        """
        初始化配置管理器

        Args:
            config_file: 可选的配置文件（.yaml/.yml/.json）
        """
        self.config_file = Path(config_file) if config_file else None
        self.logger = get_logger("ConfigManager")
        self._file_data: Dict[str, Dict[str, Any]] = {}

        if self.config_file is not None:
            self._file_data = self.load_file(self.config_file)

    def load_file(self, file_path: Path) -> Dict[str, Dict[str, Any]]:
        """加载并检查分节配置文件"""
        if not file_path.is_file():
            raise ConfigurationError(str(file_path), "配置文件不存在")
        try:
            if file_path.suffix.lower() == ".json":
                data = self._load_json_file(file_path)
            else:
                data = self._load_yaml_file(file_path)
        except (OSError, ValueError, yaml.YAMLError) as e:
            raise ConfigurationError(str(file_path), f"配置文件解析失败: {e}") from e

        data = data or {}
        if not isinstance(data, dict):
            raise ConfigurationError(str(file_path), "顶层必须是分节映射")
        for section, values in data.items():
            if section not in SECTIONS:
                raise ConfigurationError(section, f"未知配置节，可用: {', '.join(SECTIONS)}")
            if not isinstance(values, dict):
                raise ConfigurationError(section, "配置节必须是键值映射")
            self._check_keys(section, values)

        self.logger.info(f"已加载配置文件: {file_path}")
        return data

    def build(self, command: str, overrides: Optional[Mapping[str, Mapping[str, Any]]] = None,
              version: str = "", options: Optional[Mapping[str, Any]] = None) -> RunConfig:
        """
        合并配置文件和命令行覆盖项，构造 RunConfig

        覆盖项中值为 None 的键表示未在命令行给出，不覆盖文件中的值。
        """
        overrides = overrides or {}
        sections = {}
        for name, section_class in SECTIONS.items():
            values = dict(self._file_data.get(name, {}))
            for key, value in (overrides.get(name) or {}).items():
                if value is not None:
                    values[key] = value
            self._check_keys(name, values)
            try:
                sections[name] = section_class(**values)
            except CorpusAuditError:
                raise
            except (TypeError, ValueError) as e:
                raise ConfigurationError(name, str(e)) from e

        config = RunConfig(command=command, version=version, options=dict(options or {}), **sections)
        self.logger.debug(f"运行配置已物化: {config.to_dict()}")
        return config

    def save(self, config: RunConfig, file_path: Union[str, Path], force: bool = False) -> Path:
        """把物化后的运行配置写成 YAML"""
        file_path = Path(file_path)
        if file_path.exists() and not force:
            raise OutputExistsError(str(file_path))
        file_path.parent.mkdir(parents=True, exist_ok=True)
        self._save_yaml_file(file_path, config.to_dict())
        self.logger.info(f"运行配置已保存: {file_path}")
        return file_path

    @staticmethod
    def _check_keys(section: str, values: Mapping[str, Any]):
        allowed = {f.name for f in fields(SECTIONS[section])}
        for key in values:
            if key not in allowed:
                raise ConfigurationError(f"{section}.{key}", "未知配置项")

    def _load_json_file(self, file_path: Path) -> Dict[str, Any]:
        """加载JSON文件"""
        with open(file_path, 'r', encoding='utf-8') as f:
            return json.load(f)

    def _load_yaml_file(self, file_path: Path) -> Dict[str, Any]:
        """加载YAML文件"""
        with open(file_path, 'r', encoding='utf-8') as f:
            return yaml.safe_load(f)

    def _save_yaml_file(self, file_path: Path, data: Dict[str, Any]):
        """保存YAML文件"""
        with open(file_path, 'w', encoding='utf-8') as f:
            yaml.safe_dump(data, f, default_flow_style=False, allow_unicode=True, sort_keys=False)


def load_run_config(file_path: Union[str, Path]) -> Dict[str, Any]:
    """读回运行配置文件（用于核对输出）"""
    with open(file_path, 'r', encoding='utf-8') as f:
        return yaml.safe_load(f)
