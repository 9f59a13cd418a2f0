"""
核心算法模块
包含文本预处理、精确/近重复检测、标签冲突处理和数据划分
"""

from .normalizer import NormalizationConfig, KeyMode, normalize_text, comparison_key, token_count
from .exact_dedup import ExactDeduplicator
from .levenshtein import bounded_levenshtein
from .near_dedup import NearDupConfig, NearDuplicateDetector
from .label_conflicts import LabelConflictResolver
from .split_leakage import LeakageDetector, random_split, leave_one_out_split

__all__ = [
    'NormalizationConfig',
    'KeyMode',
    'normalize_text',
    'comparison_key',
    'token_count',
    'ExactDeduplicator',
    'bounded_levenshtein',
    'NearDupConfig',
    'NearDuplicateDetector',
    'LabelConflictResolver',
    'LeakageDetector',
    'random_split',
    'leave_one_out_split'
]
