#!/usr/bin/env python3
"""
近重复检测基准脚本
生成带植入近重复的合成语料，测量不同进程数下的耗时和候选对数量
"""

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

# 项目根目录
PROJECT_ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(PROJECT_ROOT))

from core.near_dedup import NearDupConfig, NearDuplicateDetector
from data_structures.corpus import Corpus, Record
from utils.logger import setup_global_logger
from utils.performance_monitor import PerformanceMonitor, system_info


ALPHABET = np.array(list("abcdefghijklmnopqrstuvwxyz     "))


def synthetic_corpus(size: int, duplicate_share: float, seed: int) -> Corpus:
    """
    合成语料：平均约 80 字符的随机文本，其中一部分是前面某条文本改动几个字符的副本

    Args:
        size: 记录数
        duplicate_share: 近重复副本所占比例
        seed: 随机种子
    """
    rng = np.random.default_rng(seed)
    texts = []
    for index in range(size):
        if texts and rng.random() < duplicate_share:
            chars = list(texts[int(rng.integers(len(texts)))])
            for _ in range(int(rng.integers(1, 6))):
                chars[int(rng.integers(len(chars)))] = str(rng.choice(ALPHABET))
            texts.append("".join(chars))
        else:
            length = int(rng.integers(53, 94))
            texts.append("".join(rng.choice(ALPHABET, size=length)) + f" #{index}")
    return Corpus(tuple(Record(str(i), text) for i, text in enumerate(texts)), source="<synthetic>")


def run_benchmark(size: int, workers_list, threshold: int, seed: int, prefilter):
    corpus = synthetic_corpus(size, 0.1, seed)
    config = NearDupConfig(threshold=threshold, prefilter=prefilter)
    monitor = PerformanceMonitor()
    results = []

    print(f"📊 语料: {size} 条, 阈值: {threshold}, 预筛选: {prefilter or '关闭'}")
    for workers in workers_list:
        detector = NearDuplicateDetector(config, workers=workers)
        start_time = time.perf_counter()
        with monitor.measure(f"near-dedup workers={workers}", len(corpus)):
            pairs, clusters = detector.find_near_duplicates(corpus)
        duration = time.perf_counter() - start_time

        stats = detector.last_stats
        results.append({
            'workers': workers,
            'seconds': round(duration, 3),
            'candidates': stats.get('candidates'),
            'screened': stats.get('screened'),
            'pairs': len(pairs),
            'clusters': len(clusters),
        })
        print(f"  workers={workers}: {duration:.2f}s, 候选 {stats.get('candidates')}, "
              f"下界筛除 {stats.get('screened')}, 近重复对 {len(pairs)}, 簇 {len(clusters)}")

    return {'system': system_info(), 'results': results, 'stages': monitor.summary()}


def main():
    parser = argparse.ArgumentParser(description="近重复检测基准")
    parser.add_argument('--size', type=int, default=20000, help='合成语料记录数')
    parser.add_argument('--workers', type=int, nargs='+', default=[1, 4], help='要测量的进程数')
    parser.add_argument('--threshold', type=int, default=20, help='编辑距离阈值')
    parser.add_argument('--seed', type=int, default=7, help='随机种子')
    parser.add_argument('--prefilter', choices=['minhash'], help='启用近似预筛选')
    parser.add_argument('--output', type=str, help='把结果写成 JSON')
    args = parser.parse_args()

    setup_global_logger(level="WARNING")
    summary = run_benchmark(args.size, args.workers, args.threshold, args.seed, args.prefilter)

    if args.output:
        Path(args.output).write_text(json.dumps(summary, indent=2, ensure_ascii=False), encoding="utf-8")
        print(f"✅ 结果已写入 {args.output}")


if __name__ == "__main__":
    main()
