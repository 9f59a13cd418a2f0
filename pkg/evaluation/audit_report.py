"""
语料审计报告
计算四个阶段的不同帖子数、占比、平均词数以及重复簇中的标签冲突概况
"""

from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from typing import Any, Dict, Mapping, Optional, Tuple

from core.exact_dedup import ExactDeduplicator, count_distinct
from core.label_conflicts import find_conflicts
from core.near_dedup import DEFAULT_NEAR_DUP, NearDupConfig, NearDuplicateDetector
from core.normalizer import KeyMode, NormalizationConfig, token_count
from data_structures.corpus import Corpus
from utils.exceptions import ValidationError
from utils.logger import get_logger, log_performance


NOT_AVAILABLE = "n/a"
STAGES = ("distinct_raw", "distinct_normalized", "distinct_after_neardup")

logger = get_logger("AuditReport")


def ratio_value(count: int, total: int) -> Optional[Decimal]:
    """100 * count / total，半进位保留一位小数；total 为 0 时返回 None"""
    if total == 0:
        return None
    return (Decimal(count) * 100 / Decimal(total)).quantize(Decimal("0.1"), rounding=ROUND_HALF_UP)


def is_minor_reduction(count: int, total: int) -> bool:
    """相对帖子总数没有减少或减少不足 0.1%"""
    return total > 0 and (total - count) * 1000 < total


def format_ratio(count: int, total: int) -> str:
    """
    渲染占比

    例如 16851 / 16909 -> "99.7%"，总数为 0 时为 "n/a"
    """
    value = ratio_value(count, total)
    return NOT_AVAILABLE if value is None else f"{value}%"


def mean_token_count(corpus: Corpus) -> int:
    """原文平均词数，半进位取整"""
    if len(corpus) == 0:
        return 0
    total = sum(token_count(record.text, corpus.language) for record in corpus)
    return int((Decimal(total) / Decimal(len(corpus))).quantize(Decimal("1"), rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class AuditReport:
    """单个语料的审计结果"""
    corpus: str
    n_posts: int
    n_distinct_raw: int
    n_distinct_normalized: int
    n_distinct_after_neardup: int
    mean_tokens: int
    language: str = "english"
    duplicate_clusters: int = 0
    conflicting_clusters: int = 0
    approximate: bool = False
    normalization: Dict[str, Any] = field(default_factory=dict)
    near_dup: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        chain = (self.n_distinct_after_neardup, self.n_distinct_normalized, self.n_distinct_raw, self.n_posts)
        if not all(a <= b for a, b in zip(chain, chain[1:])):
            raise ValidationError("AuditReport", "阶段计数必须单调不增", chain)

    @property
    def ratio_distinct_raw(self) -> str:
        return format_ratio(self.n_distinct_raw, self.n_posts)

    @property
    def ratio_distinct_normalized(self) -> str:
        return format_ratio(self.n_distinct_normalized, self.n_posts)

    @property
    def ratio_distinct_after_neardup(self) -> str:
        return format_ratio(self.n_distinct_after_neardup, self.n_posts)

    @property
    def minor_reduction_stages(self) -> Tuple[str, ...]:
        """减少不足 0.1% 的阶段"""
        return tuple(stage for stage in STAGES if is_minor_reduction(getattr(self, f"n_{stage}"), self.n_posts))

    def ratio_numbers(self) -> Dict[str, Optional[float]]:
        """各阶段占比的数值形式（百分数，一位小数）"""
        values = {}
        for name in STAGES:
            value = ratio_value(getattr(self, f"n_{name}"), self.n_posts)
            values[f"ratio_{name}"] = None if value is None else float(value)
        return values

    def to_dict(self) -> Dict[str, Any]:
        """固定键顺序的扁平字典"""
        ratios = self.ratio_numbers()
        return {
            'corpus': self.corpus,
            'n_posts': self.n_posts,
            'n_distinct_raw': self.n_distinct_raw,
            'ratio_distinct_raw': ratios['ratio_distinct_raw'],
            'n_distinct_normalized': self.n_distinct_normalized,
            'ratio_distinct_normalized': ratios['ratio_distinct_normalized'],
            'n_distinct_after_neardup': self.n_distinct_after_neardup,
            'ratio_distinct_after_neardup': ratios['ratio_distinct_after_neardup'],
            'mean_tokens': self.mean_tokens,
            'language': self.language,
            'duplicate_clusters': self.duplicate_clusters,
            'conflicting_clusters': self.conflicting_clusters,
            'approximate': self.approximate,
            'minor_reduction': list(self.minor_reduction_stages),
            'normalization': dict(self.normalization),
            'near_dup': dict(self.near_dup),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "AuditReport":
        """从 to_dict 的输出重建（占比字段为派生值，忽略）"""
        names = set(cls.__dataclass_fields__)
        return cls(**{key: value for key, value in data.items() if key in names})


class CorpusAuditor:
    """按给定配置对语料做完整审计"""

    def __init__(self, normalization: NormalizationConfig = None, near_config: NearDupConfig = None,
                 workers: int = 1, chunk_size: int = 256):
        self.normalization = normalization or NormalizationConfig()
        self.near_config = near_config or DEFAULT_NEAR_DUP
        self.workers = workers
        self.chunk_size = chunk_size

    @log_performance("语料审计")
    def audit(self, corpus: Corpus, name: Optional[str] = None) -> AuditReport:
        """
        计算审计报告

        近重复阶段在规范化去重后的语料上运行，结果等于全语料上的连通分量数。

        Raises:
            ValidationError: 阶段计数违反单调链
        """
        n_raw = count_distinct(corpus, KeyMode.RAW)

        deduplicator = ExactDeduplicator(KeyMode.NORMALIZED, self.normalization)
        clusters = deduplicator.build_clusters(corpus)
        conflicts = find_conflicts(clusters)
        deduplicated, _ = deduplicator.deduplicate(corpus)

        detector = NearDuplicateDetector(self.near_config, self.normalization, self.workers, self.chunk_size)
        _, near_clusters = detector.find_near_duplicates(deduplicated)
        n_after = len(deduplicated) - near_clusters.removal_count

        report = AuditReport(
            corpus=name or corpus.source,
            n_posts=len(corpus),
            n_distinct_raw=n_raw,
            n_distinct_normalized=len(clusters),
            n_distinct_after_neardup=n_after,
            mean_tokens=mean_token_count(corpus),
            language=corpus.language.value,
            duplicate_clusters=sum(1 for cluster in clusters if cluster.is_duplicate),
            conflicting_clusters=len(conflicts),
            approximate=self.near_config.approximate,
            normalization=self.normalization.to_dict(),
            near_dup=self.near_config.to_dict(),
        )
        logger.info(f"审计完成 - {report.corpus}: {report.n_posts} / {report.n_distinct_raw} / "
                    f"{report.n_distinct_normalized} / {report.n_distinct_after_neardup}")
        return report


def audit(corpus: Corpus, normalization: NormalizationConfig = None, near_config: NearDupConfig = None,
          workers: int = 1, name: Optional[str] = None) -> AuditReport:
    """审计语料（便捷函数）"""
    return CorpusAuditor(normalization, near_config, workers).audit(corpus, name)
