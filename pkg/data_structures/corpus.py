"""
语料数据结构
Record（单条帖子）、Corpus（有序记录集合）以及加载相关的字段映射和过滤配置
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Tuple

from utils.exceptions import DuplicateIdError, ParameterError, ValidationError


class Language(str, Enum):
    """语料语言类别，决定分词计数规则"""
    ENGLISH_LIKE = "english"
    CHINESE_LIKE = "chinese"

    @classmethod
    def parse(cls, value) -> "Language":
        if isinstance(value, Language):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ParameterError("language", value, "english 或 chinese") from None


@dataclass(frozen=True)
class Record:
    """
    单条帖子记录

    text 原样保存，标准化永远产生新值，不修改记录本身。
    空字符串 label/group 视为缺失。
    """
    id: str
    text: str
    label: Optional[str] = None
    group: Optional[str] = None
    meta: Mapping[str, str] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not isinstance(self.id, str) or self.id == "":
            raise ValidationError("Record", "id 必须是非空字符串", self.id)
        if not isinstance(self.text, str):
            raise ValidationError("Record", "text 必须是字符串", type(self.text).__name__)
        if self.label == "":
            object.__setattr__(self, "label", None)
        if self.group == "":
            object.__setattr__(self, "group", None)
        object.__setattr__(self, "meta", dict(self.meta))

    def to_dict(self) -> Dict[str, object]:
        return {
            'id': self.id,
            'text': self.text,
            'label': self.label,
            'group': self.group,
            'meta': dict(self.meta)
        }


@dataclass(frozen=True)
class Corpus:
    """有序、不可变的记录集合"""
    records: Tuple[Record, ...]
    language: Language = Language.ENGLISH_LIKE
    source: str = "<memory>"

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        object.__setattr__(self, "language", Language.parse(self.language))

        positions = {}
        for position, record in enumerate(self.records):
            if record.id in positions:
                raise DuplicateIdError(self.source, record.id, row=position + 1)
            positions[record.id] = position
        object.__setattr__(self, "_positions", positions)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[Record]:
        return iter(self.records)

    def __getitem__(self, position: int) -> Record:
        return self.records[position]

    @property
    def ids(self) -> List[str]:
        return [record.id for record in self.records]

    def position_of(self, record_id: str) -> int:
        """记录在语料中的位置（0起）"""
        return self._positions[record_id]

    def __contains__(self, record_id: object) -> bool:
        return record_id in self._positions

    def derive(self, records: Iterable[Record], source: Optional[str] = None) -> "Corpus":
        """用新的记录序列构造同语言的语料"""
        return Corpus(tuple(records), self.language, source or self.source)

    def select(self, positions: Iterable[int]) -> "Corpus":
        """按位置选择记录，保持原有顺序"""
        return self.derive(self.records[p] for p in sorted(set(positions)))

    def exclude(self, positions: Iterable[int]) -> Tuple["Corpus", List[Record]]:
        """
        移除给定位置的记录

        Returns:
            (保留的语料, 按语料顺序排列的被移除记录)
        """
        dropped = set(positions)
        kept = [r for p, r in enumerate(self.records) if p not in dropped]
        removed = [r for p, r in enumerate(self.records) if p in dropped]
        return self.derive(kept), removed


@dataclass(frozen=True)
class FieldMapping:
    """输入文件字段到记录属性的映射；id_field 缺省时以行序号作为ID"""
    text_field: str = "text"
    id_field: Optional[str] = None
    label_field: Optional[str] = None
    group_field: Optional[str] = None

    def __post_init__(self):
        if not self.text_field:
            raise ParameterError("text_field", self.text_field, "非空字段名")

    @classmethod
    def canonical(cls) -> "FieldMapping":
        """write_corpus 输出文件使用的标准列名"""
        return cls(text_field="text", id_field="id", label_field="label", group_field="group")

    @property
    def mapped_fields(self) -> List[str]:
        return [f for f in (self.id_field, self.text_field, self.label_field, self.group_field) if f]


@dataclass(frozen=True)
class FilterConfig:
    """标注前的过滤规则"""
    min_tokens: Optional[int] = None

    def __post_init__(self):
        if self.min_tokens is not None and (not isinstance(self.min_tokens, int) or self.min_tokens < 1):
            raise ParameterError("min_tokens", self.min_tokens, ">= 1 的整数")
