"""
评估模块
包含审计报告、排名比较、报告渲染和错误分析
"""

from .audit_report import AuditReport, CorpusAuditor, audit, format_ratio
from .rank_comparison import RankComparison, compare_rankings
from .report_renderer import render_report

__all__ = [
    'AuditReport',
    'CorpusAuditor',
    'audit',
    'format_ratio',
    'RankComparison',
    'compare_rankings',
    'render_report'
]
