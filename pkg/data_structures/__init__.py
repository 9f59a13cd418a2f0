"""
数据结构模块
包含语料记录、去重结果和并查集
"""

from .corpus import Record, Corpus, Language, FieldMapping, FilterConfig
from .results import DuplicateCluster, NearDupPair, NearDupClusterSet, ConflictReport, Split, LeakageReport
from .union_find import UnionFind, PositionUnionFind

__all__ = [
    'Record',
    'Corpus',
    'Language',
    'FieldMapping',
    'FilterConfig',
    'DuplicateCluster',
    'NearDupPair',
    'NearDupClusterSet',
    'ConflictReport',
    'Split',
    'LeakageReport',
    'UnionFind',
    'PositionUnionFind'
]
