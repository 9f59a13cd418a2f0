"""
近重复检测
在比较键上计算有界编辑距离：长度分块加分段索引精确生成候选，下界筛选后做带状动态规划，并查集求传递闭包簇
"""

import time
from bisect import bisect_left, bisect_right
from dataclasses import asdict, dataclass
from decimal import ROUND_FLOOR, Decimal
from itertools import combinations
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Set, Tuple

import numpy as np

from core.levenshtein import HISTOGRAM_BINS, bounded_levenshtein, char_histogram, histogram_lower_bounds
from core.normalizer import KeyMode, NormalizationConfig, comparison_key
from data_structures.corpus import Corpus, Record
from data_structures.results import NearDupClusterSet, NearDupPair
from data_structures.union_find import PositionUnionFind
from utils.batch_processor import ChunkedExecutor
from utils.exceptions import ConfigurationError
from utils.logger import LoggerMixin


MODES = ("absolute", "normalized_ratio")
PREFILTERS = ("minhash",)


@dataclass(frozen=True)
class NearDupConfig:
    """
    近重复配置

    absolute 模式下距离 <= threshold 即为近重复；
    normalized_ratio 模式下 距离 / 较长键长度 <= ratio。
    prefilter="minhash" 启用近似预筛选，结果会标记为 approximate。
    """
    threshold: int = 20
    mode: str = "absolute"
    ratio: Optional[float] = None
    prefilter: Optional[str] = None
    minhash_threshold: float = 0.5
    num_perm: int = 128
    shingle_size: int = 3

    def __post_init__(self):
        if isinstance(self.threshold, bool) or not isinstance(self.threshold, int) or self.threshold < 0:
            raise ConfigurationError("near_dup.threshold", f"必须是非负整数，当前为 {self.threshold!r}")
        if self.mode not in MODES:
            raise ConfigurationError("near_dup.mode", f"必须是 {' / '.join(MODES)}")
        if self.mode == "normalized_ratio":
            if self.ratio is None or not 0 < self.ratio <= 1:
                raise ConfigurationError("near_dup.ratio", "normalized_ratio 模式需要 (0, 1] 内的比例")
        if self.prefilter is not None and self.prefilter not in PREFILTERS:
            raise ConfigurationError("near_dup.prefilter", f"只支持 {' / '.join(PREFILTERS)}")
        if not 0 < self.minhash_threshold <= 1:
            raise ConfigurationError("near_dup.minhash_threshold", "必须在 (0, 1] 内")
        if self.num_perm < 2:
            raise ConfigurationError("near_dup.num_perm", "至少为 2")
        if self.shingle_size < 1:
            raise ConfigurationError("near_dup.shingle_size", "至少为 1")

    @property
    def approximate(self) -> bool:
        return self.prefilter is not None

    def bound_for(self, max_length: int) -> int:
        """较长键长度为 max_length 时允许的最大距离"""
        if self.mode == "absolute":
            return self.threshold
        scaled = Decimal(str(self.ratio)) * max_length
        return int(scaled.to_integral_value(rounding=ROUND_FLOOR))

    def bound_table(self, max_length: int) -> np.ndarray:
        """长度 0..max_length 对应的距离上界"""
        return np.array([self.bound_for(length) for length in range(max_length + 1)], dtype=np.int64)

    def to_dict(self) -> Dict[str, object]:
        return asdict(self)


DEFAULT_NEAR_DUP = NearDupConfig()


@dataclass(frozen=True)
class KeyIndex:
    """语料的去重比较键及每个键对应的记录位置（按首次出现排序）"""
    keys: Tuple[str, ...]
    positions: Tuple[Tuple[int, ...], ...]

    @classmethod
    def build(cls, corpus: Corpus, normalization: NormalizationConfig = None) -> "KeyIndex":
        groups: Dict[str, List[int]] = {}
        for position, record in enumerate(corpus):
            key = comparison_key(record.text, normalization, KeyMode.NORMALIZED)
            groups.setdefault(key, []).append(position)
        return cls(tuple(groups), tuple(tuple(p) for p in groups.values()))

    def __len__(self) -> int:
        return len(self.keys)


def _segments(length: int, count: int) -> List[Tuple[int, int]]:
    """把长度 length 均分为 count 段，返回 (起点, 段长)；较长的段排在后面"""
    base, extra = divmod(length, count)
    layout, start = [], 0
    for i in range(count):
        size = base + (1 if i >= count - extra else 0)
        layout.append((start, size))
        start += size
    return layout


def _bigrams(text: str) -> FrozenSet[str]:
    return frozenset(text[i:i + 2] for i in range(len(text) - 1))


class SegmentScan:
    """
    分段索引上的精确近重复扫描

    距离 <= k 时，把较短的键均分为 k+1 段，至少有一段原样出现在较长的键中，
    且起点偏移同时受段前、段后的编辑次数约束。只有命中某段的键对才进入
    直方图下界、二元组计数下界和有界编辑距离三步校验。
    长度不超过 k 的键无法分段，与所有长度兼容的键直接配对。
    """

    def __init__(self, keys: Sequence[str], config: NearDupConfig,
                 sides: Optional[Sequence[int]] = None, neighbours: Optional[Sequence[Set[int]]] = None):
        """
        构建索引

        Args:
            keys: 互不相同的比较键
            config: 近重复配置
            sides: 可选的分组标记；给出时只匹配跨组的键对
            neighbours: 可选的 MinHash 近邻集合
        """
        self.keys = list(keys)
        self.sides = sides
        self.neighbours = neighbours

        count = len(self.keys)
        self.lengths = np.fromiter((len(k) for k in self.keys), dtype=np.int64, count=count)
        self.bounds = config.bound_table(int(self.lengths.max()) if count else 0)
        self.histograms = np.vstack([char_histogram(k, HISTOGRAM_BINS) for k in self.keys] or
                                    [np.zeros(HISTOGRAM_BINS, dtype=np.int32)])
        self.bigrams = [_bigrams(k) for k in self.keys]

        # 长度 m 的键只与长度在 [reach(m), m] 内的键配对；reach 随 m 单调不减
        self.present = sorted(set(self.lengths.tolist()))
        reach = [length - int(self.bounds[length]) for length in self.present]
        self.reach = dict(zip(self.present, reach))

        # 长度 l 的键可能遇到的最大距离上界，决定分段数
        self.segment_bound: Dict[int, int] = {}
        for length in self.present:
            longest = self.present[bisect_right(reach, length) - 1]
            self.segment_bound[length] = int(self.bounds[longest])

        self.short: Dict[int, List[int]] = {}
        self.layouts: Dict[int, List[Tuple[int, int]]] = {}
        self.index: Dict[Tuple[int, int], Dict[str, List[int]]] = {}
        for position, key in enumerate(self.keys):
            length = len(key)
            k = self.segment_bound[length]
            if length <= k:
                self.short.setdefault(length, []).append(position)
                continue
            layout = self.layouts.setdefault(length, _segments(length, k + 1))
            for i, (start, size) in enumerate(layout):
                self.index.setdefault((length, i), {}).setdefault(key[start:start + size], []).append(position)

    def candidates_for(self, query: int) -> List[int]:
        """
        与 query 配对的候选键（长度不超过 query；等长时序号更小）

        Returns:
            升序的键序号列表
        """
        key = self.keys[query]
        m = len(key)
        found: Set[int] = set()

        lo = bisect_left(self.present, self.reach[m])
        hi = bisect_right(self.present, m)
        for length in self.present[lo:hi]:
            if length in self.short:
                found.update(self.short[length])
                continue

            delta = m - length
            k = self.segment_bound[length]
            # 段前编辑 e_b、段后编辑 e_a 满足 |偏移| <= e_b、|delta - 偏移| <= e_a、e_b + e_a <= k；
            # 取第一个无编辑的段 i，则 e_b >= i
            low_shift = -((k - delta) // 2)
            high_shift = (delta + k) // 2
            for i, (start, size) in enumerate(self.layouts[length]):
                bucket = self.index[(length, i)]
                first = max(start + max(low_shift, delta - k + i), 0)
                last = min(start + min(high_shift, delta + k - i), m - size)
                for offset in range(first, last + 1):
                    hit = bucket.get(key[offset:offset + size])
                    if hit is not None:
                        found.update(hit)

        lengths = self.lengths
        result = []
        for other in found:
            if lengths[other] == m and other >= query:
                continue
            if self.sides is not None and self.sides[other] == self.sides[query]:
                continue
            if self.neighbours is not None and other not in self.neighbours[query]:
                continue
            result.append(other)
        result.sort()
        return result

    def evaluate(self, queries: Sequence[int]) -> Tuple[List[Tuple[int, int, int]], int, int]:
        """
        校验一批查询键的候选

        Returns:
            (匹配的 (i, j, 距离) 列表, 候选数, 被下界筛掉的数量)
        """
        matches: List[Tuple[int, int, int]] = []
        candidate_count = 0
        screened = 0

        for query in queries:
            others = self.candidates_for(query)
            if not others:
                continue
            candidate_count += len(others)

            m = int(self.lengths[query])
            others = np.asarray(others, dtype=np.int64)
            bounds = self.bounds[np.maximum(self.lengths[others], m)]
            lower = histogram_lower_bounds(self.histograms[query], m, self.histograms[others], self.lengths[others])
            passed = lower <= bounds
            screened += len(others) - int(passed.sum())

            key = self.keys[query]
            grams = self.bigrams[query]
            for other, bound in zip(others[passed].tolist(), bounds[passed].tolist()):
                # 每次编辑最多破坏两个二元组
                other_grams = self.bigrams[other]
                if len(grams & other_grams) < max(len(grams), len(other_grams)) - 2 * bound:
                    screened += 1
                    continue
                distance = bounded_levenshtein(self.keys[other], key, bound)
                if distance is not None:
                    matches.append((other, query, distance) if other < query else (query, other, distance))

        return matches, candidate_count, screened


# 进程池工作进程内的扫描状态
_WORKER_STATE: Dict[str, SegmentScan] = {}


def _init_worker(keys: Sequence[str], config: NearDupConfig, sides: Optional[Sequence[int]],
                 neighbours: Optional[Sequence[Set[int]]]):
    _WORKER_STATE["scan"] = SegmentScan(keys, config, sides, neighbours)


def _evaluate_in_worker(queries: List[int]) -> Tuple[List[Tuple[int, int, int]], int, int]:
    return _WORKER_STATE["scan"].evaluate(queries)


class KeyMatcher(LoggerMixin):
    """
    键级近重复匹配

    candidates 按长度条件精确生成全部候选对；match 在分段索引上扫描，
    结果与全对扫描一致。可选的 MinHash 预筛选只会进一步剪枝。
    """

    def __init__(self, config: NearDupConfig = None, workers: int = 1, chunk_size: int = 256):
        """
        Args:
            config: 近重复配置
            workers: 进程数
            chunk_size: 每块的查询键数
        """
        self.config = config or DEFAULT_NEAR_DUP
        self.workers = workers
        self.chunk_size = chunk_size

        # 统计信息
        self.stats = {'candidates': 0, 'screened': 0, 'matched': 0}

    def candidates(self, keys: Sequence[str], sides: Optional[Sequence[int]] = None) -> Iterator[Tuple[int, int]]:
        """
        生成满足长度条件的键对 (i, j)，i < j

        Args:
            keys: 比较键
            sides: 可选的分组标记；给出时只生成跨组的键对
        """
        if len(keys) < 2:
            return
        lengths = np.fromiter((len(k) for k in keys), dtype=np.int64, count=len(keys))
        order = np.lexsort((np.arange(len(keys)), lengths))
        sorted_lengths = lengths[order]

        # 长度 l 的较长键能与长度 >= reach(l) 的较短键配对；reach 随 l 单调不减
        bound_table = self.config.bound_table(int(sorted_lengths[-1]))
        reach = sorted_lengths - bound_table[sorted_lengths]
        ends = np.searchsorted(reach, sorted_lengths, side="right")

        neighbours = self._minhash_neighbours(keys) if self.config.approximate else None
        order_list = order.tolist()

        for s, end in enumerate(ends.tolist()):
            a = order_list[s]
            for t in range(s + 1, end):
                b = order_list[t]
                if sides is not None and sides[a] == sides[b]:
                    continue
                if neighbours is not None and b not in neighbours[a]:
                    continue
                yield (a, b) if a < b else (b, a)

    def match(self, keys: Sequence[str], sides: Optional[Sequence[int]] = None) -> List[Tuple[int, int, int]]:
        """
        计算所有近重复键对

        Returns:
            按 (i, j) 排序的 (i, j, 距离) 列表
        """
        self.stats = {'candidates': 0, 'screened': 0, 'matched': 0}
        if len(keys) < 2:
            return []

        neighbours = self._minhash_neighbours(keys) if self.config.approximate else None
        sides = tuple(sides) if sides is not None else None

        if self.workers == 1:
            executor = ChunkedExecutor(1, self.chunk_size)
            evaluate = SegmentScan(keys, self.config, sides, neighbours).evaluate
        else:
            executor = ChunkedExecutor(self.workers, self.chunk_size, initializer=_init_worker,
                                       initargs=(tuple(keys), self.config, sides, neighbours))
            evaluate = _evaluate_in_worker

        matches: List[Tuple[int, int, int]] = []
        for chunk_matches, candidate_count, screened in executor.map(evaluate, range(len(keys))):
            matches.extend(chunk_matches)
            self.stats['candidates'] += candidate_count
            self.stats['screened'] += screened

        matches.sort()
        self.stats['matched'] = len(matches)
        self.logger.debug(f"键级匹配 - 键: {len(keys)}, 候选: {self.stats['candidates']}, "
                          f"下界筛除: {self.stats['screened']}, 匹配: {len(matches)}")
        return matches

    def _minhash_neighbours(self, keys: Sequence[str]) -> List[Set[int]]:
        """MinHash LSH 查询得到的近邻集合（近似，可能漏报）"""
        from datasketch import MinHash, MinHashLSH

        lsh = MinHashLSH(threshold=self.config.minhash_threshold, num_perm=self.config.num_perm)
        signatures = []
        for index, key in enumerate(keys):
            signature = MinHash(num_perm=self.config.num_perm)
            for shingle in _shingles(key, self.config.shingle_size):
                signature.update(shingle.encode("utf-8"))
            lsh.insert(str(index), signature)
            signatures.append(signature)

        neighbours = [{int(label) for label in lsh.query(signature)} for signature in signatures]
        self.logger.info(f"MinHash预筛选已启用（近似）- 阈值: {self.config.minhash_threshold}, "
                         f"排列数: {self.config.num_perm}")
        return neighbours


def _shingles(text: str, size: int) -> Set[str]:
    """字符 n-gram；短于 size 的文本整体作为一个片段"""
    if len(text) <= size:
        return {text}
    return {text[i:i + size] for i in range(len(text) - size + 1)}


class NearDuplicateDetector(LoggerMixin):
    """记录级近重复检测与移除"""

    def __init__(self, config: NearDupConfig = None, normalization: NormalizationConfig = None,
                 workers: int = 1, chunk_size: int = 256):
        """
        初始化检测器

        Args:
            config: 近重复配置
            normalization: 生成比较键的预处理配置
            workers: 距离计算的进程数
            chunk_size: 每块的查询键数
        """
        self.config = config or DEFAULT_NEAR_DUP
        self.normalization = normalization or NormalizationConfig()
        self.matcher = KeyMatcher(self.config, workers, chunk_size)

        # 最近一次运行的统计
        self.last_stats: Dict[str, float] = {}

    def candidate_pairs(self, corpus: Corpus) -> Iterator[Tuple[str, str]]:
        """
        生成候选记录对 (id_a, id_b)，id_a 在语料顺序上靠前

        比较键相同的记录总是候选；不同键按长度条件分块。
        """
        index = KeyIndex.build(corpus, self.normalization)
        for positions in index.positions:
            for a, b in combinations(positions, 2):
                yield corpus[a].id, corpus[b].id
        for i, j in self.matcher.candidates(index.keys):
            for a, b in _cross(index.positions[i], index.positions[j]):
                yield corpus[a].id, corpus[b].id

    def find_near_duplicates(self, corpus: Corpus) -> Tuple[List[NearDupPair], NearDupClusterSet]:
        """
        检测近重复

        Returns:
            (按语料位置排序的近重复对, 传递闭包簇)
        """
        start_time = time.time()
        index = KeyIndex.build(corpus, self.normalization)

        position_pairs: List[Tuple[int, int, int]] = []
        for positions in index.positions:
            position_pairs.extend((a, b, 0) for a, b in combinations(positions, 2))
        for i, j, distance in self.matcher.match(index.keys):
            position_pairs.extend((a, b, distance) for a, b in _cross(index.positions[i], index.positions[j]))
        position_pairs.sort()

        pairs = [NearDupPair(a, b, corpus[a].id, corpus[b].id, distance) for a, b, distance in position_pairs]
        uf = PositionUnionFind.from_pairs(len(corpus), ((a, b) for a, b, _ in position_pairs))
        clusters = NearDupClusterSet(
            clusters=tuple(tuple(corpus[p].id for p in members) for members in uf.clusters()),
            approximate=self.config.approximate
        )

        duration = time.time() - start_time
        self.last_stats = dict(self.matcher.stats, keys=len(index), pairs=len(pairs),
                               clusters=len(clusters), duration=duration)
        self.logger.log_performance("近重复检测", duration, records=len(corpus), keys=len(index),
                                    pairs=len(pairs), clusters=len(clusters))
        return pairs, clusters

    def remove_near_duplicates(self, corpus: Corpus) -> Tuple[Corpus, List[Record]]:
        """
        每个簇只保留代表元（语料顺序第一条），其余记录移除

        Returns:
            (保留的语料, 被移除的记录)
        """
        _, clusters = self.find_near_duplicates(corpus)
        return self.keep_representatives(corpus, clusters)

    def keep_representatives(self, corpus: Corpus, clusters: NearDupClusterSet) -> Tuple[Corpus, List[Record]]:
        """按已有的簇移除非代表元记录"""
        dropped = [corpus.position_of(record_id) for members in clusters.clusters for record_id in members[1:]]
        output, removed = corpus.exclude(dropped)
        self.logger.log_stage("近重复移除", len(output), len(removed))
        return output, removed


def _cross(first: Sequence[int], second: Sequence[int]) -> Iterator[Tuple[int, int]]:
    for a in first:
        for b in second:
            yield (a, b) if a < b else (b, a)


def candidate_pairs(corpus: Corpus, config: NearDupConfig = None,
                    normalization: NormalizationConfig = None) -> Iterator[Tuple[str, str]]:
    """候选记录对（便捷函数）"""
    return NearDuplicateDetector(config, normalization).candidate_pairs(corpus)


def find_near_duplicates(corpus: Corpus, config: NearDupConfig = None,
                         normalization: NormalizationConfig = None,
                         workers: int = 1) -> Tuple[List[NearDupPair], NearDupClusterSet]:
    """检测近重复（便捷函数）"""
    return NearDuplicateDetector(config, normalization, workers).find_near_duplicates(corpus)


def remove_near_duplicates(corpus: Corpus, config: NearDupConfig = None,
                           normalization: NormalizationConfig = None,
                           workers: int = 1) -> Tuple[Corpus, List[Record]]:
    """移除近重复（便捷函数）"""
    return NearDuplicateDetector(config, normalization, workers).remove_near_duplicates(corpus)
