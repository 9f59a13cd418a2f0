"""
精确去重
按比较键分组、统计不同帖子数，生成去重后的语料版本
"""

from typing import Dict, List, Tuple

from core.normalizer import KeyMode, NormalizationConfig, comparison_key
from data_structures.corpus import Corpus, Record
from data_structures.results import DuplicateCluster
from utils.exceptions import ParameterError
from utils.logger import LoggerMixin


KEEP_POLICIES = ("first",)


class ExactDeduplicator(LoggerMixin):
    """基于比较键的精确去重器"""

    def __init__(self, key_mode: KeyMode = KeyMode.NORMALIZED, config: NormalizationConfig = None):
        """
        Args:
            key_mode: raw 比较原文，normalized 比较预处理后的键
            config: 预处理配置
        """
        self.key_mode = KeyMode(key_mode)
        self.config = config or NormalizationConfig()

    def build_clusters(self, corpus: Corpus) -> List[DuplicateCluster]:
        """
        按比较键分组

        每条记录恰好属于一个簇；簇按首个成员的语料位置排序。
        字典查找本身会在哈希命中后比较完整键，不存在哈希碰撞合并。
        """
        groups: Dict[str, List[int]] = {}
        for position, record in enumerate(corpus):
            key = comparison_key(record.text, self.config, self.key_mode)
            groups.setdefault(key, []).append(position)

        clusters = [
            DuplicateCluster(
                key=key,
                member_ids=tuple(corpus[p].id for p in positions),
                member_labels=tuple(corpus[p].label for p in positions),
                member_positions=tuple(positions)
            )
            for key, positions in groups.items()
        ]
        self.logger.debug(f"分组完成 - 模式: {self.key_mode.value}, 记录: {len(corpus)}, 簇: {len(clusters)}")
        return clusters

    def deduplicate(self, corpus: Corpus, keep: str = "first") -> Tuple[Corpus, List[Record]]:
        """
        每个簇只保留语料顺序中的第一条

        Returns:
            (去重后语料, 被移除的记录)
        """
        if keep not in KEEP_POLICIES:
            raise ParameterError("keep", keep, " / ".join(KEEP_POLICIES))

        clusters = self.build_clusters(corpus)
        dropped = [p for cluster in clusters for p in cluster.member_positions[1:]]
        output, removed = corpus.exclude(dropped)
        self.logger.log_stage(f"精确去重({self.key_mode.value})", len(output), len(removed))
        return output, removed


def build_clusters(corpus: Corpus, key_mode: KeyMode = KeyMode.NORMALIZED,
                   config: NormalizationConfig = None) -> List[DuplicateCluster]:
    """按比较键分组（便捷函数）"""
    return ExactDeduplicator(key_mode, config).build_clusters(corpus)


def deduplicate(corpus: Corpus, key_mode: KeyMode = KeyMode.NORMALIZED,
                config: NormalizationConfig = None, keep: str = "first") -> Tuple[Corpus, List[Record]]:
    """保留每个簇的第一条记录（便捷函数）"""
    return ExactDeduplicator(key_mode, config).deduplicate(corpus, keep)


def count_distinct(corpus: Corpus, key_mode: KeyMode = KeyMode.NORMALIZED,
                   config: NormalizationConfig = None) -> int:
    """不同比较键的数量"""
    return len({comparison_key(record.text, config, key_mode) for record in corpus})
