"""
标签冲突检测与处理
在精确重复簇内找出标注不一致的帖子，并按“一致保留一条、冲突全部剔除”的策略处理
"""

from typing import List, Sequence, Tuple

from data_structures.corpus import Corpus, Record
from data_structures.results import ConflictReport, DuplicateCluster
from utils.exceptions import ParameterError, ValidationError
from utils.logger import LoggerMixin


KEEP_ONE_CONSISTENT_DROP_CONFLICTING = "keep_one_consistent_drop_conflicting"
POLICIES = (KEEP_ONE_CONSISTENT_DROP_CONFLICTING,)


class LabelConflictResolver(LoggerMixin):
    """标签冲突处理器"""

    def __init__(self, policy: str = KEEP_ONE_CONSISTENT_DROP_CONFLICTING):
        if policy not in POLICIES:
            raise ParameterError("policy", policy, " / ".join(POLICIES))
        self.policy = policy

    def find_conflicts(self, clusters: Sequence[DuplicateCluster]) -> List[ConflictReport]:
        """
        每个存在两种及以上标签的簇生成一份报告

        缺失标签的记录既不触发也不阻止冲突。
        """
        reports = [
            ConflictReport(cluster.key, cluster.member_ids, cluster.member_labels)
            for cluster in clusters if cluster.has_conflict
        ]
        self.logger.debug(f"冲突检测 - 簇: {len(clusters)}, 冲突簇: {len(reports)}")
        return reports

    def resolve_conflicts(self, corpus: Corpus,
                          clusters: Sequence[DuplicateCluster]) -> Tuple[Corpus, List[Record]]:
        """
        应用处理策略

        一致簇保留第一条，冲突簇全部移除，单例不变；只删除记录，从不改标签。

        Returns:
            (处理后的语料, 被移除的记录)
        """
        dropped: List[int] = []
        conflicting = 0
        for cluster in clusters:
            positions = self._positions(corpus, cluster)
            if cluster.has_conflict:
                dropped.extend(positions)
                conflicting += 1
            else:
                dropped.extend(positions[1:])

        output, removed = corpus.exclude(dropped)
        self.logger.log_stage(f"标签冲突处理(冲突簇 {conflicting})", len(output), len(removed))
        return output, removed

    @staticmethod
    def _positions(corpus: Corpus, cluster: DuplicateCluster) -> Tuple[int, ...]:
        try:
            return tuple(sorted(corpus.position_of(record_id) for record_id in cluster.member_ids))
        except KeyError as e:
            raise ValidationError("DuplicateCluster", "簇成员不在语料中", e.args[0]) from None


def find_conflicts(clusters: Sequence[DuplicateCluster]) -> List[ConflictReport]:
    """检测标签冲突（便捷函数）"""
    return LabelConflictResolver().find_conflicts(clusters)


def resolve_conflicts(corpus: Corpus, clusters: Sequence[DuplicateCluster],
                      policy: str = KEEP_ONE_CONSISTENT_DROP_CONFLICTING) -> Tuple[Corpus, List[Record]]:
    """处理标签冲突（便捷函数）"""
    return LabelConflictResolver(policy).resolve_conflicts(corpus, clusters)
