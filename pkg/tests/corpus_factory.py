"""
测试用语料工厂
构造带植入重复、近重复和标签冲突的合成语料，并提供与实现无关的参考算法
"""

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from data_structures.corpus import Corpus, Language, Record


SLOW = bool(os.environ.get("CORPUS_AUDIT_SLOW"))

# 64 个连续的CJK码位：按码位取模分箱互不冲突，不含空白、"@" 和URL前缀，大小写折叠不变
PLANT_ALPHABET = [chr(0x4E00 + k) for k in range(64)]


def scaled(default: int, full: int) -> int:
    """慢速测试开启时使用完整规模"""
    return full if SLOW else default


def make_corpus(texts: Sequence[str], labels: Optional[Sequence[Optional[str]]] = None,
                groups: Optional[Sequence[Optional[str]]] = None,
                language: Language = Language.ENGLISH_LIKE) -> Corpus:
    """按文本列表构造语料，ID为行序号字符串"""
    records = []
    for i, text in enumerate(texts):
        label = labels[i] if labels is not None else None
        group = groups[i] if groups is not None else None
        records.append(Record(str(i), text, label, group))
    return Corpus(tuple(records), language)


def levenshtein_reference(a: str, b: str) -> int:
    """无带宽限制的标准动态规划"""
    previous = list(range(len(b) + 1))
    for i in range(1, len(a) + 1):
        current = [i] + [0] * len(b)
        for j in range(1, len(b) + 1):
            current[j] = min(previous[j] + 1, current[j - 1] + 1,
                             previous[j - 1] + (a[i - 1] != b[j - 1]))
        previous = current
    return previous[-1]


def allowed_distance(mode: str, threshold: int, ratio: Optional[float], a: str, b: str) -> int:
    if mode == "absolute":
        return threshold
    return int(Fraction(str(ratio)) * max(len(a), len(b)))


def brute_force_pairs(keys: Sequence[str], mode: str = "absolute", threshold: int = 20,
                      ratio: Optional[float] = None) -> List[Tuple[int, int, int]]:
    """全对扫描：返回 (i, j, 距离)，i < j"""
    pairs = []
    for i in range(len(keys)):
        for j in range(i + 1, len(keys)):
            distance = levenshtein_reference(keys[i], keys[j])
            if distance <= allowed_distance(mode, threshold, ratio, keys[i], keys[j]):
                pairs.append((i, j, distance))
    return pairs


class PlantedCorpusBuilder:
    """
    植入式语料构造器

    基础文本是 PLANT_ALPHABET 上的随机串（长度 60..100），任意两条基础文本的
    编辑距离远大于 20；近重复副本只在互不重叠的区段内替换字符。
    """

    def __init__(self, seed: int = 0):
        self.rng = np.random.default_rng(seed)
        self.texts: List[str] = []
        self.labels: List[Optional[str]] = []
        self.groups: List[Optional[str]] = []

    def base_text(self) -> str:
        length = int(self.rng.integers(60, 101))
        return "".join(PLANT_ALPHABET[k] for k in self.rng.integers(0, 64, size=length))

    def perturb(self, text: str, copy_index: int, edits: int = 3) -> str:
        """在第 copy_index 个区段内替换 edits 个字符（每次替换都改变字符）"""
        chars = list(text)
        section = len(chars) // 4
        start = section * copy_index
        positions = self.rng.choice(np.arange(start, start + section), size=edits, replace=False)
        for position in positions:
            current = PLANT_ALPHABET.index(chars[position])
            chars[position] = PLANT_ALPHABET[(current + 1 + int(self.rng.integers(0, 63))) % 64]
        return "".join(chars)

    def _add(self, text: str, label: Optional[str] = None, group: Optional[str] = None):
        self.texts.append(text)
        self.labels.append(label)
        self.groups.append(group)

    def singletons(self, count: int, label: Optional[str] = "neg") -> "PlantedCorpusBuilder":
        for _ in range(count):
            self._add(self.base_text(), label)
        return self

    def exact_groups(self, count: int, size: int = 2, labels: Sequence[Optional[str]] = ("pos", "pos")
                     ) -> "PlantedCorpusBuilder":
        """原文完全相同的组"""
        for _ in range(count):
            text = self.base_text()
            for k in range(size):
                self._add(text, labels[k % len(labels)])
        return self

    def mention_groups(self, count: int, label: Optional[str] = "pos") -> "PlantedCorpusBuilder":
        """原文只在提及和URL上不同的二元组（预处理后相同）"""
        for index in range(count):
            text = self.base_text()
            self._add(f"@alice_{index} {text} https://t.co/a{index}", label)
            self._add(f"@Bob{index} {text} www.example.com/{index}", label)
        return self

    def near_groups(self, count: int, size: int = 3, edits: int = 3,
                    label: Optional[str] = "neg") -> "PlantedCorpusBuilder":
        """基础文本加 size-1 个扰动副本；副本两两距离 <= 2 * edits"""
        for _ in range(count):
            text = self.base_text()
            self._add(text, label)
            for k in range(size - 1):
                self._add(self.perturb(text, k, edits), label)
        return self

    def shuffled(self) -> "PlantedCorpusBuilder":
        order = self.rng.permutation(len(self.texts))
        self.texts = [self.texts[i] for i in order]
        self.labels = [self.labels[i] for i in order]
        self.groups = [self.groups[i] for i in order]
        return self

    def build(self) -> Corpus:
        return make_corpus(self.texts, self.labels, self.groups)


@dataclass(frozen=True)
class PlantedSplit:
    """训练集含 exact 条与测试集完全相同、near 条近重复的记录"""
    train: Corpus
    test: Corpus
    exact: int
    near: int


def planted_split(train_size: int = 120, test_size: int = 40, exact: int = 7, near: int = 5,
                  seed: int = 0) -> PlantedSplit:
    builder = PlantedCorpusBuilder(seed)
    test_texts = [builder.base_text() for _ in range(test_size)]
    train_texts = [builder.base_text() for _ in range(train_size - exact - near)]
    train_texts += test_texts[:exact]
    train_texts += [builder.perturb(text, 1, 4) for text in test_texts[exact:exact + near]]
    order = builder.rng.permutation(len(train_texts))

    train = Corpus(tuple(Record(f"tr{i}", train_texts[p], "x") for i, p in enumerate(order)))
    test = Corpus(tuple(Record(f"te{i}", text, "y") for i, text in enumerate(test_texts)))
    return PlantedSplit(train, test, exact, near)
