"""
去重结果数据结构
存储重复簇、近重复对、标签冲突、数据划分与泄漏检测结果，并负责 jsonl/csv 转储
"""

import csv
import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from data_structures.corpus import Corpus


@dataclass(frozen=True)
class DuplicateCluster:
    """共享同一比较键的记录集合"""
    key: str
    member_ids: Tuple[str, ...]
    member_labels: Tuple[Optional[str], ...]
    member_positions: Tuple[int, ...] = field(compare=False, default=())

    @property
    def labels(self) -> Counter:
        """观察到的标签多重集（忽略缺失标签）"""
        return Counter(label for label in self.member_labels if label is not None)

    @property
    def distinct_labels(self) -> List[str]:
        return list(self.labels)

    @property
    def has_conflict(self) -> bool:
        return len(self.labels) >= 2

    @property
    def size(self) -> int:
        return len(self.member_ids)

    @property
    def is_duplicate(self) -> bool:
        return len(self.member_ids) >= 2

    def to_dict(self) -> Dict[str, object]:
        return {
            'key': self.key,
            'member_ids': list(self.member_ids),
            'labels': dict(self.labels),
            'has_conflict': self.has_conflict
        }


@dataclass(frozen=True, order=True)
class NearDupPair:
    """近重复记录对，id_a 在语料顺序上先于 id_b"""
    position_a: int
    position_b: int
    id_a: str = field(compare=False)
    id_b: str = field(compare=False)
    distance: int = field(compare=False)

    def to_row(self) -> List[object]:
        return [self.id_a, self.id_b, self.distance]


@dataclass(frozen=True)
class NearDupClusterSet:
    """近重复对传递闭包得到的簇；代表元为语料顺序第一个成员"""
    clusters: Tuple[Tuple[str, ...], ...]
    approximate: bool = False

    @property
    def representatives(self) -> List[str]:
        return [members[0] for members in self.clusters]

    @property
    def flagged_ids(self) -> List[str]:
        return [record_id for members in self.clusters for record_id in members]

    @property
    def removal_count(self) -> int:
        return sum(len(members) - 1 for members in self.clusters)

    def __len__(self) -> int:
        return len(self.clusters)

    def to_dicts(self) -> List[Dict[str, object]]:
        return [{'representative': members[0], 'member_ids': list(members), 'size': len(members)}
                for members in self.clusters]


@dataclass(frozen=True)
class ConflictReport:
    """重复簇内的标签不一致"""
    key: str
    member_ids: Tuple[str, ...]
    member_labels: Tuple[Optional[str], ...]

    @property
    def distinct_label_count(self) -> int:
        return len({label for label in self.member_labels if label is not None})

    def to_dict(self) -> Dict[str, object]:
        return {
            'key': self.key,
            'members': [{'id': i, 'label': l} for i, l in zip(self.member_ids, self.member_labels)],
            'distinct_label_count': self.distinct_label_count
        }


@dataclass(frozen=True)
class Split:
    """训练/测试划分；两侧ID不相交，合并后等于源语料"""
    train: Corpus
    test: Corpus
    seed: Optional[int] = None
    ratio: Optional[float] = None
    strategy: str = "random"
    held_out_group: Optional[str] = None
    scrub_mode: Optional[str] = None

    def manifest(self) -> Dict[str, object]:
        return {
            'strategy': self.strategy,
            'seed': self.seed,
            'ratio': self.ratio,
            'held_out_group': self.held_out_group,
            'scrub_mode': self.scrub_mode,
            'stratified': False,
            'train_count': len(self.train),
            'test_count': len(self.test)
        }


@dataclass(frozen=True)
class LeakageReport:
    """
    跨划分重复检测结果

    side="train" 时被标记的是训练记录（与测试集重复），
    side="test" 时被标记的是测试记录（与原始训练集重复）。
    """
    mode: str
    side: str
    flagged_ids: Tuple[str, ...]
    matches: Dict[str, Tuple[str, ...]]
    checked_count: int
    approximate: bool = False

    @property
    def contaminated_train_ids(self) -> List[str]:
        return list(self.flagged_ids) if self.side == "train" else []

    @property
    def count(self) -> int:
        return len(self.flagged_ids)

    @property
    def contamination_rate(self) -> float:
        return self.count / self.checked_count if self.checked_count else 0.0

    @property
    def is_empty(self) -> bool:
        return not self.flagged_ids

    def to_dict(self) -> Dict[str, object]:
        return {
            'mode': self.mode,
            'side': self.side,
            'checked_count': self.checked_count,
            'flagged_count': self.count,
            'contamination_rate': round(self.contamination_rate, 6),
            'approximate': self.approximate,
            'flagged': [{'id': i, 'matched_ids': list(self.matches[i])} for i in self.flagged_ids]
        }


def write_jsonl(rows: Iterable[Dict[str, object]], path: Union[str, Path]):
    """一行一个JSON对象，键顺序固定"""
    with open(path, "w", encoding="utf-8", newline="") as f:
        for row in rows:
            f.write(json.dumps(row, ensure_ascii=False) + "\n")


def write_pairs_csv(pairs: Sequence[NearDupPair], path: Union[str, Path]):
    """近重复对转储：id_a, id_b, distance"""
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\r\n")
        writer.writerow(["id_a", "id_b", "distance"])
        for pair in pairs:
            writer.writerow(pair.to_row())
