"""
模型检查点排名比较
比较去重前后同一组检查点按分数排序的名次是否一致
"""

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Mapping, Tuple, Union

import yaml

from utils.exceptions import CorpusLoadError, MalformedRowError, ParameterError


SCORE_FORMATS = ("json", "yaml", "csv", "tsv")


def rank(scores: Mapping[str, float]) -> Tuple[Tuple[str, float], ...]:
    """按分数降序排列，同分按名称字典序"""
    return tuple(sorted(scores.items(), key=lambda item: (-item[1], item[0])))


@dataclass(frozen=True)
class RankComparison:
    """两组排名及逐名次对照"""
    ranking_a: Tuple[Tuple[str, float], ...]
    ranking_b: Tuple[Tuple[str, float], ...]
    label_a: str = "original"
    label_b: str = "deduplicated"

    @property
    def order_a(self) -> List[str]:
        return [name for name, _ in self.ranking_a]

    @property
    def order_b(self) -> List[str]:
        return [name for name, _ in self.ranking_b]

    @property
    def same_order(self) -> bool:
        return self.order_a == self.order_b

    @property
    def unchanged(self) -> List[bool]:
        """每个名次上两侧检查点是否相同"""
        return [a == b for a, b in zip(self.order_a, self.order_b)]

    def rows(self) -> List[Dict[str, Any]]:
        return [
            {
                'rank': position + 1,
                'name_a': name_a, 'score_a': score_a,
                'name_b': name_b, 'score_b': score_b,
                'unchanged': name_a == name_b,
            }
            for position, ((name_a, score_a), (name_b, score_b))
            in enumerate(zip(self.ranking_a, self.ranking_b))
        ]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'label_a': self.label_a,
            'label_b': self.label_b,
            'same_order': self.same_order,
            'ranking_a': self.order_a,
            'ranking_b': self.order_b,
            'rows': self.rows(),
        }


def _check_scores(scores: Mapping[str, float], side: str):
    for name, score in scores.items():
        if isinstance(score, bool) or not isinstance(score, (int, float)) or not math.isfinite(score):
            raise ParameterError(f"{side}[{name}]", score, "有限数值分数")


def compare_rankings(scores_a: Mapping[str, float], scores_b: Mapping[str, float],
                     label_a: str = "original", label_b: str = "deduplicated") -> RankComparison:
    """
    比较两组分数的排名

    Raises:
        ParameterError: 两侧名称集合不同，或存在非有限分数
    """
    _check_scores(scores_a, "scores_a")
    _check_scores(scores_b, "scores_b")
    if set(scores_a) != set(scores_b):
        only_a = sorted(set(scores_a) - set(scores_b))
        only_b = sorted(set(scores_b) - set(scores_a))
        raise ParameterError("scores", {'only_a': only_a, 'only_b': only_b}, "两侧检查点名称集合相同")
    return RankComparison(rank(scores_a), rank(scores_b), label_a, label_b)


def load_scores(path: Union[str, Path]) -> Dict[str, float]:
    """
    读取分数文件

    json/yaml：名称到分数的映射；csv/tsv：含 name 和 score 两列的表头
    """
    path = Path(path)
    suffix = path.suffix.lower().lstrip(".")
    file_format = "yaml" if suffix == "yml" else suffix
    if file_format not in SCORE_FORMATS:
        raise CorpusLoadError(str(path), f"不支持的分数文件格式，可用: {', '.join(SCORE_FORMATS)}")
    try:
        text = path.read_text(encoding="utf-8-sig")
    except (OSError, UnicodeDecodeError) as e:
        raise CorpusLoadError(str(path), f"无法读取分数文件: {e}") from e

    if file_format in ("json", "yaml"):
        try:
            data = json.loads(text) if file_format == "json" else yaml.safe_load(text)
        except (ValueError, yaml.YAMLError) as e:
            raise CorpusLoadError(str(path), f"解析失败: {e}") from e
        if not isinstance(data, dict):
            raise CorpusLoadError(str(path), "分数文件必须是名称到分数的映射")
        scores = {str(name): score for name, score in data.items()}
    else:
        scores = _read_score_table(path, text, "," if file_format == "csv" else "\t")

    for name, score in scores.items():
        if isinstance(score, bool) or not isinstance(score, (int, float)):
            raise CorpusLoadError(str(path), f"分数不是数值: {score!r}", field=name)
    return {name: float(score) for name, score in scores.items()}


def _read_score_table(path: Path, text: str, delimiter: str) -> Dict[str, float]:
    reader = csv.DictReader(io.StringIO(text, newline=""), delimiter=delimiter)
    if not reader.fieldnames or "name" not in reader.fieldnames or "score" not in reader.fieldnames:
        raise CorpusLoadError(str(path), "表头必须包含 name 和 score", row=1)

    scores: Dict[str, float] = {}
    for row_number, row in enumerate(reader, start=2):
        name = (row.get("name") or "").strip()
        if not name:
            raise MalformedRowError(str(path), row_number, "缺少名称")
        if name in scores:
            raise MalformedRowError(str(path), row_number, f"重复的名称 '{name}'")
        try:
            scores[name] = float(row.get("score") or "")
        except ValueError:
            raise MalformedRowError(str(path), row_number, f"分数不是数值: {row.get('score')!r}") from None
    return scores
