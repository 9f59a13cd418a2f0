"""
文本预处理：统一用户提及和URL，生成所有重复检测共用的比较键
"""

import re
import unicodedata
from dataclasses import dataclass, asdict
from enum import Enum
from typing import Dict

from data_structures.corpus import Language
from utils.exceptions import ConfigurationError


# "@" 后跟一个或多个单词字符（含下划线，以及紧随其后的组合附加符号）；单独的 "@" 不算
MENTION_PATTERN = re.compile(r"@(?:\w|[\u0300-\u036F\u1AB0-\u1AFF\u1DC0-\u1DFF\u20D0-\u20FF\uFE20-\uFE2F])+")
# 前面不是单词字符的 http:// / https:// 或 www. 开头，直到空白
URL_PATTERN = re.compile(r"\b(?:https?://|www\.)\S+", re.IGNORECASE)
URL_TRAILING_PUNCTUATION = ".,;:!?)]}'\"…"
WHITESPACE_RUN = re.compile(r"\s+")


class KeyMode(str, Enum):
    """比较键模式：raw 为原文精确比较，normalized 为预处理后比较"""
    RAW = "raw"
    NORMALIZED = "normalized"


@dataclass(frozen=True)
class NormalizationConfig:
    """预处理配置"""
    mention_placeholder: str = "@USER"
    url_placeholder: str = "URL"
    lowercase_key: bool = True
    unicode_form: str = "NFC"
    collapse_whitespace: bool = True
    url_trailing_punctuation: bool = False

    def __post_init__(self):
        if self.unicode_form != "NFC":
            raise ConfigurationError("normalization.unicode_form", "只支持 NFC（规范组合）")
        for key in ("mention_placeholder", "url_placeholder"):
            placeholder = getattr(self, key)
            if not placeholder or WHITESPACE_RUN.search(placeholder):
                raise ConfigurationError(f"normalization.{key}", "占位符必须是非空且不含空白的单个词")
            if normalize_text(placeholder, self) != placeholder:
                raise ConfigurationError(f"normalization.{key}",
                                         f"占位符 {placeholder!r} 不是标准化的不动点")

    def to_dict(self) -> Dict[str, object]:
        return asdict(self)


def _replace_urls(text: str, config: NormalizationConfig) -> str:
    if not config.url_trailing_punctuation:
        return URL_PATTERN.sub(lambda _: config.url_placeholder, text)

    def keep_tail(match: re.Match) -> str:
        span = match.group(0)
        body = span.rstrip(URL_TRAILING_PUNCTUATION)
        return config.url_placeholder + span[len(body):]

    return URL_PATTERN.sub(keep_tail, text)


def normalize_text(raw: str, config: NormalizationConfig = None) -> str:
    """
    统一提及和URL

    URL先于提及替换，保证 "@name" 后紧跟的URL占位符会并入提及。
    原文不被修改，返回新字符串。
    """
    config = config or DEFAULT_NORMALIZATION
    text = unicodedata.normalize(config.unicode_form, raw)
    text = _replace_urls(text, config)
    text = MENTION_PATTERN.sub(lambda _: config.mention_placeholder, text)
    if config.collapse_whitespace:
        text = WHITESPACE_RUN.sub(" ", text).strip()
    return text


def comparison_key(raw: str, config: NormalizationConfig = None,
                   key_mode: KeyMode = KeyMode.NORMALIZED) -> str:
    """
    生成比较键

    Args:
        raw: 原始文本
        config: 预处理配置
        key_mode: raw 模式直接返回原文；normalized 模式做预处理并按配置大小写折叠
    """
    if KeyMode(key_mode) is KeyMode.RAW:
        return raw
    config = config or DEFAULT_NORMALIZATION
    key = normalize_text(raw, config)
    return key.casefold() if config.lowercase_key else key


def token_count(text: str, language: Language = Language.ENGLISH_LIKE) -> int:
    """英文类按空白切分计词，中文类按非空白字符计数"""
    if Language.parse(language) is Language.CHINESE_LIKE:
        return sum(1 for ch in text if not ch.isspace())
    return len(text.split())


DEFAULT_NORMALIZATION = NormalizationConfig()
