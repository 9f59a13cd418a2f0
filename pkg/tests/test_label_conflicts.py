"""
标签冲突测试
"""

import sys
import unittest
from pathlib import Path

# 添加项目根目录到路径
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from core.exact_dedup import build_clusters
from core.label_conflicts import LabelConflictResolver, find_conflicts, resolve_conflicts
from data_structures.corpus import Corpus, Record
from utils.exceptions import ParameterError, ValidationError
from tests.corpus_factory import PlantedCorpusBuilder, make_corpus


TRUMP_TEXT = "@USER @USER donald trump's lessons for republicans"
TYRANNY_TEXT = "FIGHT AGAINST TYRANNY #NoForcedVaccines"


class TestFindConflicts(unittest.TestCase):
    """冲突检测测试"""

    def test_neutral_against(self):
        """测试同一文本被标为 Neutral 和 Against"""
        corpus = make_corpus([TRUMP_TEXT, TRUMP_TEXT], ["Neutral", "Against"])
        reports = find_conflicts(build_clusters(corpus))
        self.assertEqual(len(reports), 1)
        self.assertEqual(reports[0].distinct_label_count, 2)
        self.assertEqual(reports[0].member_ids, ("0", "1"))

    def test_consistent_labels(self):
        """测试标签一致时不报告"""
        corpus = make_corpus([TYRANNY_TEXT, TYRANNY_TEXT], ["AntiVaxx", "AntiVaxx"])
        self.assertEqual(find_conflicts(build_clusters(corpus)), [])

    def test_singletons(self):
        """测试全是单例时无报告"""
        corpus = make_corpus(["a", "b", "c"], ["x", "y", "z"])
        self.assertEqual(find_conflicts(build_clusters(corpus)), [])

    def test_unlabeled_records_ignored(self):
        """测试缺失标签不触发冲突"""
        corpus = make_corpus(["t", "t", "t"], ["x", None, "x"])
        self.assertEqual(find_conflicts(build_clusters(corpus)), [])

    def test_report_dict(self):
        """测试报告转储"""
        corpus = make_corpus([TRUMP_TEXT, TRUMP_TEXT], ["Neutral", "Against"])
        data = find_conflicts(build_clusters(corpus))[0].to_dict()
        self.assertEqual(data['members'], [{'id': "0", 'label': "Neutral"}, {'id': "1", 'label': "Against"}])
        self.assertEqual(data['distinct_label_count'], 2)


class TestResolveConflicts(unittest.TestCase):
    """冲突处理测试"""

    def test_policy_application(self):
        """测试一致对保留一条、冲突对全部移除、单例不变"""
        corpus = make_corpus(["c", "c", "k", "k", "s1", "s2", "s3"],
                             ["a", "a", "a", "b", "a", "b", "a"])
        output, removed = resolve_conflicts(corpus, build_clusters(corpus))
        self.assertEqual(output.ids, ["0", "4", "5", "6"])
        self.assertEqual([r.id for r in removed], ["1", "2", "3"])

    def test_no_duplicates(self):
        """测试无重复时保持不变"""
        corpus = make_corpus(["a", "b"], ["x", "y"])
        output, removed = resolve_conflicts(corpus, build_clusters(corpus))
        self.assertEqual(output, corpus)
        self.assertEqual(removed, [])

    def test_planted_corpus(self):
        """测试 500 条语料中 20 个冲突对和 30 个一致对，共移除 70 条"""
        corpus = (PlantedCorpusBuilder(seed=17)
                  .singletons(400)
                  .exact_groups(20, labels=("pos", "neg"))
                  .exact_groups(30, labels=("pos", "pos"))
                  .shuffled().build())
        self.assertEqual(len(corpus), 500)

        clusters = build_clusters(corpus)
        self.assertEqual(len(find_conflicts(clusters)), 20)

        output, removed = resolve_conflicts(corpus, clusters)
        self.assertEqual(len(removed), 70)
        self.assertEqual(len(output), 430)

        # 处理后无冲突、幂等、标签不变
        self.assertEqual(find_conflicts(build_clusters(output)), [])
        again, removed_again = resolve_conflicts(output, build_clusters(output))
        self.assertEqual(again, output)
        self.assertEqual(removed_again, [])
        original = {r.id: r.label for r in corpus}
        self.assertTrue(all(original[r.id] == r.label for r in output))

    def test_unlabeled_member_removed_with_cluster(self):
        """测试无标签成员按保留第一条的规则随簇移除"""
        corpus = make_corpus(["t", "t", "t"], [None, "x", "x"])
        output, removed = resolve_conflicts(corpus, build_clusters(corpus))
        self.assertEqual(output.ids, ["0"])

    def test_cluster_not_in_corpus(self):
        """测试簇成员不在语料中时报错"""
        clusters = build_clusters(make_corpus(["a", "a"]))
        other = Corpus((Record("x", "a"),))
        with self.assertRaises(ValidationError):
            resolve_conflicts(other, clusters)

    def test_unknown_policy(self):
        """测试不支持的策略"""
        with self.assertRaises(ParameterError):
            LabelConflictResolver("majority_vote")


if __name__ == '__main__':
    unittest.main()
