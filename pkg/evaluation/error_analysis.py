"""
错误分析
统计被训练集污染的测试记录在错误预测中的占比，以及标记/未标记记录上的准确率
"""

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

from data_structures.results import LeakageReport
from utils.exceptions import CorpusLoadError, MalformedRowError, ParameterError, ValidationError


_TRUE = {"1", "true", "yes", "correct"}
_FALSE = {"0", "false", "no", "wrong", "incorrect"}


@dataclass(frozen=True)
class ContaminationAnalysis:
    """污染记录与预测正误的交叉统计"""
    mode: str
    total: int
    marked: int
    wrong: int
    marked_wrong: int
    marked_correct: int
    unmarked_correct: int

    @property
    def share_marked_in_errors(self) -> Optional[float]:
        """错误预测中被标记记录的比例"""
        return self.marked_wrong / self.wrong if self.wrong else None

    @property
    def accuracy_marked(self) -> Optional[float]:
        return self.marked_correct / self.marked if self.marked else None

    @property
    def accuracy_unmarked(self) -> Optional[float]:
        unmarked = self.total - self.marked
        return self.unmarked_correct / unmarked if unmarked else None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'mode': self.mode,
            'total': self.total,
            'marked': self.marked,
            'wrong': self.wrong,
            'marked_wrong': self.marked_wrong,
            'share_marked_in_errors': self.share_marked_in_errors,
            'accuracy_marked': self.accuracy_marked,
            'accuracy_unmarked': self.accuracy_unmarked,
        }


def contamination_in_errors(marks: LeakageReport, predictions: Mapping[str, bool]) -> ContaminationAnalysis:
    """
    交叉统计测试集污染标记与预测结果

    Args:
        marks: mark_test_contamination 的结果（side="test"）
        predictions: 测试记录ID到“预测是否正确”的映射，需覆盖所有被检查的记录

    Raises:
        ParameterError: 标记不是针对测试集
        ValidationError: 预测与被检查记录数量不一致
    """
    if marks.side != "test":
        raise ParameterError("marks.side", marks.side, "test（mark_test_contamination 的结果）")
    if len(predictions) != marks.checked_count:
        raise ValidationError("predictions", "预测条数必须等于被检查的测试记录数",
                              f"{len(predictions)} != {marks.checked_count}")
    flagged = set(marks.flagged_ids)
    missing = flagged - set(predictions)
    if missing:
        raise ValidationError("predictions", "缺少被标记记录的预测", sorted(missing)[:5])

    marked_correct = sum(1 for record_id in flagged if predictions[record_id])
    unmarked_correct = sum(1 for record_id, ok in predictions.items() if ok and record_id not in flagged)
    wrong = sum(1 for ok in predictions.values() if not ok)
    return ContaminationAnalysis(
        mode=marks.mode,
        total=len(predictions),
        marked=len(flagged),
        wrong=wrong,
        marked_wrong=len(flagged) - marked_correct,
        marked_correct=marked_correct,
        unmarked_correct=unmarked_correct,
    )


def load_predictions(path: Union[str, Path]) -> Dict[str, bool]:
    """
    读取预测结果

    csv/tsv/jsonl，每行含 id 以及 correct 列，或者 label 与 prediction 两列
    """
    path = Path(path)
    suffix = path.suffix.lower().lstrip(".")
    try:
        text = path.read_text(encoding="utf-8-sig")
    except (OSError, UnicodeDecodeError) as e:
        raise CorpusLoadError(str(path), f"无法读取预测文件: {e}") from e

    if suffix in ("jsonl", "json"):
        rows = []
        for line_number, line in enumerate(text.split("\n"), start=1):
            if not line.strip():
                continue
            try:
                rows.append((line_number, json.loads(line)))
            except json.JSONDecodeError as e:
                raise MalformedRowError(str(path), line_number, f"JSON解析失败: {e.msg}") from e
    elif suffix in ("csv", "tsv"):
        reader = csv.DictReader(io.StringIO(text, newline=""), delimiter="," if suffix == "csv" else "\t")
        rows = list(enumerate(reader, start=2))
    else:
        raise CorpusLoadError(str(path), "预测文件必须是 csv / tsv / jsonl")

    predictions: Dict[str, bool] = {}
    for row_number, row in rows:
        if not isinstance(row, dict) or not row.get("id"):
            raise MalformedRowError(str(path), row_number, "缺少 id")
        predictions[str(row["id"])] = _correctness(path, row_number, row)
    return predictions


def _correctness(path: Path, row_number: int, row: Mapping[str, Any]) -> bool:
    if "correct" in row:
        value = str(row["correct"]).strip().lower()
        if value in _TRUE:
            return True
        if value in _FALSE:
            return False
        raise MalformedRowError(str(path), row_number, f"无法识别的 correct 值: {row['correct']!r}")
    if "label" in row and "prediction" in row:
        return str(row["label"]) == str(row["prediction"])
    raise MalformedRowError(str(path), row_number, "需要 correct 列或 label + prediction 列")
