"""
语料输入输出工具模块
处理 csv / tsv / jsonl 语料的加载、写出和标注前过滤
"""

import csv
import io
import json
import os
from pathlib import Path
from typing import Callable, Dict, Iterator, Optional, Tuple, Union

from data_structures.corpus import Corpus, FieldMapping, FilterConfig, Language, Record
from utils.exceptions import (CorpusLoadError, CorpusWriteError, DuplicateIdError, MalformedRowError,
                              MissingFieldError, OutputExistsError, ParameterError)
from utils.logger import LoggerMixin, log_performance


SUPPORTED_FORMATS = ("csv", "tsv", "jsonl")
_DELIMITERS = {"csv": ",", "tsv": "\t"}
_CANONICAL_COLUMNS = ("id", "text", "label", "group")


def infer_format(path: Union[str, Path]) -> str:
    """根据扩展名推断文件格式"""
    suffix = Path(path).suffix.lower().lstrip(".")
    if suffix == "json":
        suffix = "jsonl"
    if suffix not in SUPPORTED_FORMATS:
        raise ParameterError("format", suffix or str(path), "csv, tsv 或 jsonl")
    return suffix


def _check_format(file_format: str) -> str:
    file_format = (file_format or "").lower()
    if file_format not in SUPPORTED_FORMATS:
        raise ParameterError("format", file_format, "csv, tsv 或 jsonl")
    return file_format


class CorpusLoader(LoggerMixin):
    """语料加载器"""

    def __init__(self, mapping: FieldMapping = None, language: Language = Language.ENGLISH_LIKE):
        """
        初始化语料加载器

        Args:
            mapping: 字段映射
            language: 语料语言
        """
        self.mapping = mapping or FieldMapping()
        self.language = Language.parse(language)

    @log_performance("语料加载")
    def load(self, path: Union[str, Path], file_format: Optional[str] = None) -> Corpus:
        """
        加载语料文件

        Raises:
            CorpusLoadError: 文件缺失、非UTF-8、行格式错误、字段缺失或ID重复
        """
        path = Path(path)
        file_format = _check_format(file_format) if file_format else infer_format(path)
        self._validate_path(path)

        text = self._read_utf8(path)
        if file_format == "jsonl":
            rows = self._iter_jsonl(path, text)
        else:
            rows = self._iter_delimited(path, text, _DELIMITERS[file_format])

        records = []
        seen: Dict[str, int] = {}
        for ordinal, (row_number, row) in enumerate(rows):
            record = self._build_record(path, row_number, ordinal, row)
            if record.id in seen:
                raise DuplicateIdError(str(path), record.id, row=row_number)
            seen[record.id] = row_number
            records.append(record)

        corpus = Corpus(tuple(records), self.language, str(path))
        self.logger.log_corpus_info(str(path), len(corpus), self.language.value)
        return corpus

    def _validate_path(self, path: Path):
        """验证文件路径"""
        if not path.exists():
            raise CorpusLoadError(str(path), "文件不存在")
        if not path.is_file():
            raise CorpusLoadError(str(path), "路径不是文件")
        if not os.access(path, os.R_OK):
            raise CorpusLoadError(str(path), "文件无读取权限")

    def _read_utf8(self, path: Path) -> str:
        """严格按UTF-8解码，非法字节报告所在行"""
        data = path.read_bytes()
        try:
            return data.decode("utf-8-sig")
        except UnicodeDecodeError as e:
            line = data.count(b"\n", 0, e.start) + 1
            raise CorpusLoadError(str(path), f"非法UTF-8字节 (偏移 {e.start})", row=line) from e

    def _iter_jsonl(self, path: Path, text: str) -> Iterator[Tuple[int, Dict[str, str]]]:
        for line_number, line in enumerate(text.split("\n"), start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise MalformedRowError(str(path), line_number, f"JSON解析失败: {e.msg}") from e
            if not isinstance(obj, dict):
                raise MalformedRowError(str(path), line_number, "每行必须是一个JSON对象")
            yield line_number, {key: _as_text(value) for key, value in obj.items()}

    def _iter_delimited(self, path: Path, text: str,
                        delimiter: str) -> Iterator[Tuple[int, Dict[str, str]]]:
        reader = csv.reader(io.StringIO(text, newline=""), delimiter=delimiter, strict=True)
        try:
            header = next(reader)
        except StopIteration:
            raise CorpusLoadError(str(path), "缺少表头行") from None
        except csv.Error as e:
            raise MalformedRowError(str(path), 1, str(e)) from e

        if len(set(header)) != len(header):
            raise CorpusLoadError(str(path), "表头存在重复列名", row=1)
        for field in self.mapping.mapped_fields:
            if field not in header:
                raise MissingFieldError(str(path), field, row=1)

        row_number = 1
        while True:
            try:
                values = next(reader)
            except StopIteration:
                return
            except csv.Error as e:
                raise MalformedRowError(str(path), row_number + 1, str(e)) from e
            row_number += 1
            if not values:
                continue
            if len(values) != len(header):
                raise MalformedRowError(str(path), row_number,
                                        f"列数 {len(values)} 与表头列数 {len(header)} 不一致")
            yield row_number, dict(zip(header, values))

    def _build_record(self, path: Path, row_number: int, ordinal: int,
                      row: Dict[str, Optional[str]]) -> Record:
        mapping = self.mapping

        text = row.get(mapping.text_field)
        if text is None:
            raise MissingFieldError(str(path), mapping.text_field, row=row_number)

        if mapping.id_field:
            record_id = row.get(mapping.id_field)
            if not record_id:
                raise MissingFieldError(str(path), mapping.id_field, row=row_number)
        else:
            record_id = str(ordinal)

        label = row.get(mapping.label_field) if mapping.label_field else None
        group = row.get(mapping.group_field) if mapping.group_field else None
        meta = {k: v for k, v in row.items() if k not in mapping.mapped_fields and v is not None}

        return Record(id=record_id, text=text, label=label, group=group, meta=meta)


def _as_text(value) -> Optional[str]:
    """JSON值转为文本；null 视为缺失"""
    if value is None:
        return None
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return json.dumps(value)
    return json.dumps(value, ensure_ascii=False, sort_keys=True)


class CorpusWriter(LoggerMixin):
    """语料写出器，输出使用标准列名 id/text/label/group"""

    def __init__(self, force: bool = True):
        self.force = force

    def write(self, corpus: Corpus, path: Union[str, Path], file_format: Optional[str] = None):
        """
        写出语料

        Raises:
            OutputExistsError: 文件已存在且未允许覆盖
            CorpusWriteError: 写入失败
        """
        path = Path(path)
        file_format = _check_format(file_format) if file_format else infer_format(path)
        if path.exists() and not self.force:
            raise OutputExistsError(str(path))

        meta_keys = _meta_columns(corpus)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "w", encoding="utf-8", newline="") as f:
                if file_format == "jsonl":
                    self._write_jsonl(f, corpus, meta_keys)
                else:
                    self._write_delimited(f, corpus, meta_keys, _DELIMITERS[file_format])
        except OSError as e:
            raise CorpusWriteError(str(path), str(e)) from e

        self.logger.info(f"语料已写出: {path} ({len(corpus)} 条)")

    def _write_jsonl(self, f, corpus: Corpus, meta_keys: Dict[str, str]):
        for record in corpus:
            row = {"id": record.id, "text": record.text}
            if record.label is not None:
                row["label"] = record.label
            if record.group is not None:
                row["group"] = record.group
            for key, column in meta_keys.items():
                if key in record.meta:
                    row[column] = record.meta[key]
            f.write(json.dumps(row, ensure_ascii=False) + "\n")

    def _write_delimited(self, f, corpus: Corpus, meta_keys: Dict[str, str], delimiter: str):
        writer = csv.writer(f, delimiter=delimiter, quoting=csv.QUOTE_MINIMAL, lineterminator="\r\n")
        writer.writerow(list(_CANONICAL_COLUMNS) + list(meta_keys.values()))
        for record in corpus:
            writer.writerow([record.id, record.text, record.label or "", record.group or ""]
                            + [record.meta.get(key, "") for key in meta_keys])


def _meta_columns(corpus: Corpus) -> Dict[str, str]:
    """元数据列（首次出现顺序）；与标准列重名时加 meta. 前缀"""
    columns: Dict[str, str] = {}
    for record in corpus:
        for key in record.meta:
            if key not in columns:
                columns[key] = f"meta.{key}" if key in _CANONICAL_COLUMNS else key
    return columns


def load_corpus(path: Union[str, Path], file_format: Optional[str] = None,
                mapping: FieldMapping = None,
                language: Language = Language.ENGLISH_LIKE) -> Corpus:
    """加载语料（format 为空时按扩展名推断）"""
    return CorpusLoader(mapping, language).load(path, file_format)


def write_corpus(corpus: Corpus, path: Union[str, Path], file_format: Optional[str] = None,
                 force: bool = True):
    """写出语料，用 FieldMapping.canonical() 可原样读回"""
    CorpusWriter(force=force).write(corpus, path, file_format)


def filter_short(corpus: Corpus, config: FilterConfig,
                 counting: Optional[Callable[[str], int]] = None) -> Corpus:
    """
    去掉分词数少于 N 的帖子

    Args:
        corpus: 输入语料
        config: 过滤配置，min_tokens 必须给出
        counting: 分词计数函数，默认按语料语言调用 token_count

    Returns:
        保持顺序的过滤后语料
    """
    if config.min_tokens is None:
        raise ParameterError("min_tokens", None, "filter_short 需要 min_tokens")

    if counting is None:
        from core.normalizer import token_count
        language = corpus.language

        def counting(text: str) -> int:
            return token_count(text, language)

    kept = [record for record in corpus if counting(record.text) >= config.min_tokens]
    return corpus.derive(kept)
