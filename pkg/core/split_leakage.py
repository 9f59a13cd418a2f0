"""
数据划分与泄漏检测
随机/留一事件划分、跨划分重复检测、训练集清洗以及划分的持久化
"""

from decimal import ROUND_FLOOR, Decimal
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
import yaml

from core.near_dedup import DEFAULT_NEAR_DUP, KeyIndex, KeyMatcher, NearDupConfig
from core.normalizer import KeyMode, NormalizationConfig, comparison_key
from data_structures.corpus import Corpus, FieldMapping, Language
from data_structures.results import LeakageReport, Split
from utils.corpus_io import load_corpus, write_corpus
from utils.exceptions import CorpusLoadError, OutputExistsError, ParameterError, ValidationError
from utils.logger import LoggerMixin, get_logger


LEAKAGE_MODES = ("exact", "near")
MANIFEST_NAME = "split_manifest.yaml"
# 随机划分使用 numpy 的 PCG64 生成器（np.random.default_rng）
GENERATOR_NAME = "numpy.PCG64"

logger = get_logger("SplitLeakage")


def _check_mode(mode: str) -> str:
    if mode not in LEAKAGE_MODES:
        raise ParameterError("mode", mode, " / ".join(LEAKAGE_MODES))
    return mode


def random_split(corpus: Corpus, ratio: float = 0.8, seed: int = 42) -> Split:
    """
    随机划分训练/测试集

    对记录下标做一次带种子的随机排列，前 floor(ratio * n) 条为训练集；
    两侧内部保持原语料顺序。

    Args:
        corpus: 源语料
        ratio: 训练集比例 (0, 1)
        seed: 随机种子

    Raises:
        ParameterError: 比例不在 (0, 1) 内
        ValidationError: 语料为空或划分后某一侧为空
    """
    if not 0 < ratio < 1:
        raise ParameterError("ratio", ratio, "(0, 1) 内的比例")
    n = len(corpus)
    if n == 0:
        raise ValidationError("Split", "语料为空，无法划分")

    train_size = int((Decimal(str(ratio)) * n).to_integral_value(rounding=ROUND_FLOOR))
    if train_size == 0 or train_size == n:
        raise ValidationError("Split", f"划分退化: {n} 条记录按比例 {ratio} 得到空的训练集或测试集",
                              train_size)

    permutation = np.random.default_rng(seed).permutation(n)
    train = corpus.select(permutation[:train_size].tolist())
    test = corpus.select(permutation[train_size:].tolist())
    logger.info(f"随机划分 - 种子: {seed}, 训练: {len(train)}, 测试: {len(test)}")
    return Split(train, test, seed=seed, ratio=ratio, strategy="random")


def leave_one_out_split(corpus: Corpus) -> List[Split]:
    """
    留一事件划分：每个分组依次作为测试集

    Returns:
        按分组首次出现顺序排列的划分列表

    Raises:
        ValidationError: 存在缺失分组的记录，或只有一个分组
    """
    groups: Dict[str, List[int]] = {}
    for position, record in enumerate(corpus):
        if record.group is None:
            raise ValidationError("Record", "留一划分要求每条记录都有分组", record.id)
        groups.setdefault(record.group, []).append(position)
    if len(groups) < 2:
        raise ValidationError("Split", "留一划分至少需要两个不同分组", len(groups))

    folds = []
    for group, positions in groups.items():
        train, test = corpus.exclude(positions)
        folds.append(Split(train, corpus.derive(test), strategy="leave_one_out", held_out_group=group))
    logger.info(f"留一划分 - 折数: {len(folds)}")
    return folds


class LeakageDetector(LoggerMixin):
    """跨划分重复检测器"""

    def __init__(self, near_config: NearDupConfig = None, normalization: NormalizationConfig = None,
                 workers: int = 1, chunk_size: int = 256):
        self.near_config = near_config or DEFAULT_NEAR_DUP
        self.normalization = normalization or NormalizationConfig()
        self.workers = workers
        self.chunk_size = chunk_size

    def detect_leakage(self, split: Split, mode: str = "exact") -> LeakageReport:
        """标记与测试集重复/近重复的训练记录"""
        return self._mark(split.train, split.test, _check_mode(mode), side="train")

    def mark_test_contamination(self, split: Split, mode: str = "exact") -> LeakageReport:
        """标记与原始训练集重复/近重复的测试记录（错误分析用）"""
        return self._mark(split.test, split.train, _check_mode(mode), side="test")

    def scrub_train(self, split: Split, mode: str = "exact") -> Split:
        """
        从训练集中移除被标记的记录，测试集保持不变

        Returns:
            新的划分，训练集保持原顺序
        """
        report = self.detect_leakage(split, mode)
        flagged = {split.train.position_of(record_id) for record_id in report.flagged_ids}
        train, removed = split.train.exclude(flagged)
        self.logger.log_stage(f"训练集清洗({mode})", len(train), len(removed))
        return Split(train, split.test, seed=split.seed, ratio=split.ratio, strategy=split.strategy,
                     held_out_group=split.held_out_group, scrub_mode=mode)

    def _mark(self, source: Corpus, reference: Corpus, mode: str, side: str) -> LeakageReport:
        if mode == "exact":
            matches = self._exact_matches(source, reference)
            approximate = False
        else:
            matches = self._near_matches(source, reference)
            approximate = self.near_config.approximate

        flagged = tuple(record.id for record in source if record.id in matches)
        report = LeakageReport(mode=mode, side=side, flagged_ids=flagged,
                               matches={record_id: matches[record_id] for record_id in flagged},
                               checked_count=len(source), approximate=approximate)
        self.logger.info(f"泄漏检测({mode}, {side}) - 检查: {report.checked_count}, 标记: {report.count}")
        return report

    def _exact_matches(self, source: Corpus, reference: Corpus) -> Dict[str, Tuple[str, ...]]:
        index: Dict[str, List[str]] = {}
        for record in reference:
            key = comparison_key(record.text, self.normalization, KeyMode.NORMALIZED)
            index.setdefault(key, []).append(record.id)

        matches = {}
        for record in source:
            key = comparison_key(record.text, self.normalization, KeyMode.NORMALIZED)
            if key in index:
                matches[record.id] = tuple(index[key])
        return matches

    def _near_matches(self, source: Corpus, reference: Corpus) -> Dict[str, Tuple[str, ...]]:
        source_index = KeyIndex.build(source, self.normalization)
        reference_index = KeyIndex.build(reference, self.normalization)
        offset = len(source_index)

        keys = source_index.keys + reference_index.keys
        sides = [0] * offset + [1] * len(reference_index)
        matched_keys: Dict[int, List[int]] = {}
        for i, j, _ in KeyMatcher(self.near_config, self.workers, self.chunk_size).match(keys, sides):
            matched_keys.setdefault(i, []).append(j - offset)

        matches = {}
        for key_index, reference_keys in matched_keys.items():
            reference_ids = sorted(
                (position for k in reference_keys for position in reference_index.positions[k])
            )
            for position in source_index.positions[key_index]:
                matches[source[position].id] = tuple(reference[p].id for p in reference_ids)
        return matches


def detect_leakage(split: Split, mode: str = "exact", near_config: NearDupConfig = None,
                   normalization: NormalizationConfig = None, workers: int = 1) -> LeakageReport:
    """检测训练集泄漏（便捷函数）"""
    return LeakageDetector(near_config, normalization, workers).detect_leakage(split, mode)


def mark_test_contamination(split: Split, mode: str = "exact", near_config: NearDupConfig = None,
                            normalization: NormalizationConfig = None, workers: int = 1) -> LeakageReport:
    """标记被训练集污染的测试记录（便捷函数）"""
    return LeakageDetector(near_config, normalization, workers).mark_test_contamination(split, mode)


def scrub_train(split: Split, mode: str = "exact", near_config: NearDupConfig = None,
                normalization: NormalizationConfig = None, workers: int = 1) -> Split:
    """清洗训练集（便捷函数）"""
    return LeakageDetector(near_config, normalization, workers).scrub_train(split, mode)


def save_split(split: Split, directory: Union[str, Path], file_format: str = "jsonl",
               force: bool = False, prefix: str = "") -> Dict[str, Path]:
    """
    持久化划分：训练集、测试集两个语料文件和一个 YAML 清单

    Returns:
        写出的文件路径
    """
    directory = Path(directory)
    paths = {
        'train': directory / f"{prefix}train.{file_format}",
        'test': directory / f"{prefix}test.{file_format}",
        'manifest': directory / f"{prefix}{MANIFEST_NAME}",
    }
    if not force:
        for path in paths.values():
            if path.exists():
                raise OutputExistsError(str(path))

    write_corpus(split.train, paths['train'], file_format, force=True)
    write_corpus(split.test, paths['test'], file_format, force=True)

    manifest = dict(split.manifest())
    manifest.update({
        'generator': GENERATOR_NAME,
        'shuffle': "shuffled, not stratified" if split.strategy == "random" else "grouped by event",
        'format': file_format,
        'train_file': paths['train'].name,
        'test_file': paths['test'].name,
    })
    with open(paths['manifest'], "w", encoding="utf-8") as f:
        yaml.safe_dump(manifest, f, allow_unicode=True, sort_keys=False)
    return paths


def load_split(manifest_path: Union[str, Path], language: Language = Language.ENGLISH_LIKE) -> Split:
    """从 save_split 写出的清单读回划分"""
    manifest_path = Path(manifest_path)
    try:
        with open(manifest_path, "r", encoding="utf-8") as f:
            manifest = yaml.safe_load(f)
    except (OSError, yaml.YAMLError) as e:
        raise CorpusLoadError(str(manifest_path), f"无法读取划分清单: {e}") from e
    if not isinstance(manifest, dict) or "train_file" not in manifest or "test_file" not in manifest:
        raise CorpusLoadError(str(manifest_path), "划分清单缺少 train_file / test_file")

    mapping = FieldMapping.canonical()
    file_format: Optional[str] = manifest.get("format")
    train = load_corpus(manifest_path.parent / manifest["train_file"], file_format, mapping, language)
    test = load_corpus(manifest_path.parent / manifest["test_file"], file_format, mapping, language)
    return Split(train, test, seed=manifest.get("seed"), ratio=manifest.get("ratio"),
                 strategy=manifest.get("strategy", "random"),
                 held_out_group=manifest.get("held_out_group"), scrub_mode=manifest.get("scrub_mode"))
