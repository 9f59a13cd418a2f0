"""
数据划分与泄漏检测测试
"""

import sys
import tempfile
import unittest
from pathlib import Path

import yaml

# 添加项目根目录到路径
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from core.near_dedup import NearDupConfig
from core.normalizer import comparison_key
from core.split_leakage import (LeakageDetector, detect_leakage, leave_one_out_split, load_split,
                                mark_test_contamination, random_split, save_split, scrub_train)
from data_structures.results import Split
from utils.exceptions import OutputExistsError, ParameterError, ValidationError
from tests.corpus_factory import PlantedCorpusBuilder, make_corpus, planted_split, scaled


class TestRandomSplit(unittest.TestCase):
    """随机划分测试"""

    def test_sizes(self):
        """测试 10 条记录按 0.8 划分得到 8/2"""
        split = random_split(make_corpus([f"t{i}" for i in range(10)]), ratio=0.8, seed=1)
        self.assertEqual((len(split.train), len(split.test)), (8, 2))

    def test_floor_of_ratio(self):
        """测试训练集大小向下取整"""
        split = random_split(make_corpus([f"t{i}" for i in range(7)]), ratio=0.5, seed=0)
        self.assertEqual(len(split.train), 3)

    def test_deterministic(self):
        """测试同一种子结果相同"""
        corpus = make_corpus([f"t{i}" for i in range(50)])
        first = random_split(corpus, 0.8, seed=42)
        second = random_split(corpus, 0.8, seed=42)
        self.assertEqual(first.train.ids, second.train.ids)
        self.assertEqual(first.test.ids, second.test.ids)

    def test_seed_changes_partition(self):
        """测试不同种子得到不同划分"""
        corpus = make_corpus([f"t{i}" for i in range(50)])
        self.assertNotEqual(random_split(corpus, 0.8, seed=1).test.ids,
                            random_split(corpus, 0.8, seed=2).test.ids)

    def test_partition_preserves_order(self):
        """测试两侧不相交、并集为源语料且保持原顺序"""
        corpus = make_corpus([f"t{i}" for i in range(37)])
        split = random_split(corpus, 0.7, seed=3)
        self.assertFalse(set(split.train.ids) & set(split.test.ids))
        self.assertEqual(sorted(split.train.ids + split.test.ids), sorted(corpus.ids))
        self.assertEqual(split.train.ids, sorted(split.train.ids, key=int))
        self.assertEqual(split.test.ids, sorted(split.test.ids, key=int))

    def test_invalid_ratio(self):
        """测试非法比例"""
        corpus = make_corpus(["a", "b"])
        for ratio in (0, 1, 1.5, -0.2):
            with self.assertRaises(ParameterError):
                random_split(corpus, ratio)

    def test_degenerate_split(self):
        """测试空语料和单侧为空的划分"""
        with self.assertRaises(ValidationError):
            random_split(make_corpus([]), 0.8)
        with self.assertRaises(ValidationError):
            random_split(make_corpus(["only"]), 0.8)

    def test_manifest(self):
        """测试划分清单"""
        manifest = random_split(make_corpus([f"t{i}" for i in range(10)]), 0.8, seed=5).manifest()
        self.assertEqual(manifest['seed'], 5)
        self.assertEqual(manifest['strategy'], "random")
        self.assertFalse(manifest['stratified'])
        self.assertEqual((manifest['train_count'], manifest['test_count']), (8, 2))


class TestLeaveOneOutSplit(unittest.TestCase):
    """留一事件划分测试"""

    def test_groups(self):
        """测试分组 {A, A, B, C} 得到测试集大小 2, 1, 1"""
        corpus = make_corpus(["a1", "a2", "b", "c"], groups=["A", "A", "B", "C"])
        folds = leave_one_out_split(corpus)
        self.assertEqual([len(f.test) for f in folds], [2, 1, 1])
        self.assertEqual([f.held_out_group for f in folds], ["A", "B", "C"])
        for fold in folds:
            self.assertTrue(all(r.group == fold.held_out_group for r in fold.test))
            self.assertTrue(all(r.group != fold.held_out_group for r in fold.train))
            self.assertEqual(len(fold.train) + len(fold.test), 4)

    def test_single_group(self):
        """测试只有一个分组时报错"""
        with self.assertRaises(ValidationError):
            leave_one_out_split(make_corpus(["a", "b"], groups=["A", "A"]))

    def test_missing_group(self):
        """测试存在缺失分组时报错"""
        with self.assertRaises(ValidationError):
            leave_one_out_split(make_corpus(["a", "b", "c"], groups=["A", None, "B"]))


class TestLeakageDetection(unittest.TestCase):
    """泄漏检测测试"""

    def setUp(self):
        self.planted = planted_split()
        self.split = Split(self.planted.train, self.planted.test)

    def test_exact_flags(self):
        """测试精确模式标记 7 条训练记录"""
        report = detect_leakage(self.split, "exact")
        self.assertEqual(report.count, self.planted.exact)
        self.assertEqual(report.side, "train")
        self.assertEqual(report.checked_count, len(self.planted.train))
        self.assertFalse(report.approximate)
        test_keys = {comparison_key(r.text) for r in self.planted.test}
        for record_id in report.flagged_ids:
            record = self.planted.train[self.planted.train.position_of(record_id)]
            self.assertIn(comparison_key(record.text), test_keys)

    def test_near_flags_superset(self):
        """测试近重复模式标记 7 + 5 条，且包含精确模式的结果"""
        exact = detect_leakage(self.split, "exact")
        near = detect_leakage(self.split, "near")
        self.assertEqual(near.count, self.planted.exact + self.planted.near)
        self.assertTrue(set(exact.flagged_ids) <= set(near.flagged_ids))

    def test_matches_point_to_test(self):
        """测试匹配ID都来自测试集"""
        report = detect_leakage(self.split, "near")
        for record_id in report.flagged_ids:
            self.assertTrue(all(m in self.planted.test for m in report.matches[record_id]))

    def test_scrub(self):
        """测试清洗后训练集减少相应条数，测试集不变，重查为空"""
        for mode, expected in (("exact", self.planted.exact),
                               ("near", self.planted.exact + self.planted.near)):
            scrubbed = scrub_train(self.split, mode)
            self.assertEqual(len(scrubbed.train), len(self.planted.train) - expected)
            self.assertEqual(scrubbed.test, self.planted.test)
            self.assertEqual(scrubbed.scrub_mode, mode)
            self.assertTrue(detect_leakage(scrubbed, mode).is_empty)

    def test_scrub_random_splits(self):
        """测试随机划分上的清洗可靠性"""
        corpus = (PlantedCorpusBuilder(seed=9)
                  .singletons(scaled(60, 400)).exact_groups(10).mention_groups(10).near_groups(10)
                  .shuffled().build())
        detector = LeakageDetector(workers=1)
        for seed in range(scaled(3, 10)):
            split = random_split(corpus, 0.8, seed=seed)
            for mode in ("exact", "near"):
                scrubbed = detector.scrub_train(split, mode)
                self.assertTrue(detector.detect_leakage(scrubbed, mode).is_empty)
                self.assertTrue(set(scrubbed.train.ids) <= set(split.train.ids))

    def test_mark_test_contamination(self):
        """测试标记被训练集污染的测试记录"""
        report = mark_test_contamination(self.split, "exact")
        self.assertEqual(report.side, "test")
        self.assertEqual(report.count, self.planted.exact)
        self.assertEqual(report.contaminated_train_ids, [])
        self.assertTrue(all(i in self.planted.test for i in report.flagged_ids))

        near = mark_test_contamination(self.split, "near")
        self.assertEqual(near.count, self.planted.exact + self.planted.near)

    def test_ratio_threshold(self):
        """测试按长度比例的阈值"""
        config = NearDupConfig(mode="normalized_ratio", ratio=0.01)
        report = LeakageDetector(config).detect_leakage(self.split, "near")
        self.assertEqual(report.count, self.planted.exact)

    def test_disjoint_texts(self):
        """测试无重复时报告为空"""
        split = Split(make_corpus(["alpha", "beta"]), make_corpus(["gamma delta epsilon"]))
        report = detect_leakage(split, "near", near_config=NearDupConfig(threshold=2))
        self.assertTrue(report.is_empty)
        self.assertEqual(report.contamination_rate, 0.0)

    def test_unknown_mode(self):
        """测试不支持的模式"""
        with self.assertRaises(ParameterError):
            detect_leakage(self.split, "fuzzy")

    def test_report_dict(self):
        """测试报告转储"""
        data = detect_leakage(self.split, "exact").to_dict()
        self.assertEqual(data['flagged_count'], self.planted.exact)
        self.assertEqual(len(data['flagged']), self.planted.exact)


class TestSplitPersistence(unittest.TestCase):
    """划分持久化测试"""

    def test_save_and_load(self):
        """测试保存后读回的划分与原划分一致"""
        corpus = make_corpus([f"post {i}" for i in range(20)], labels=["a", "b"] * 10)
        split = random_split(corpus, 0.75, seed=8)
        with tempfile.TemporaryDirectory() as tmp:
            paths = save_split(split, tmp, "csv")
            self.assertTrue(paths['train'].exists())
            with open(paths['manifest'], "r", encoding="utf-8") as f:
                manifest = yaml.safe_load(f)
            self.assertEqual(manifest['seed'], 8)
            self.assertEqual(manifest['generator'], "numpy.PCG64")

            loaded = load_split(paths['manifest'])
            self.assertEqual(loaded.train.ids, split.train.ids)
            self.assertEqual([r.text for r in loaded.test], [r.text for r in split.test])
            self.assertEqual(loaded.seed, 8)

    def test_refuses_overwrite(self):
        """测试已存在的输出需要 force"""
        split = random_split(make_corpus([f"t{i}" for i in range(5)]), 0.6, seed=0)
        with tempfile.TemporaryDirectory() as tmp:
            save_split(split, tmp)
            with self.assertRaises(OutputExistsError):
                save_split(split, tmp)
            save_split(split, tmp, force=True)

    def test_prefix(self):
        """测试文件名前缀"""
        folds = leave_one_out_split(make_corpus(["a", "b"], groups=["X", "Y"]))
        with tempfile.TemporaryDirectory() as tmp:
            paths = save_split(folds[0], tmp, prefix="fold0.")
            self.assertEqual(paths['manifest'].name, "fold0.split_manifest.yaml")
            self.assertEqual(load_split(paths['manifest']).held_out_group, "X")


if __name__ == '__main__':
    unittest.main()
