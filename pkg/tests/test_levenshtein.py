"""
有界编辑距离测试
与无带宽动态规划的参考实现比对，并检查度量公理和直方图下界
"""

import sys
import unittest
from pathlib import Path

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

# 添加项目根目录到路径
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from core.levenshtein import bounded_levenshtein, char_histogram, histogram_lower_bounds
from utils.exceptions import ParameterError
from tests.corpus_factory import levenshtein_reference, scaled


short_text = st.text(alphabet="abcd", max_size=12)


def distance(a: str, b: str) -> int:
    return bounded_levenshtein(a, b, max(len(a), len(b)))


class TestBoundedLevenshtein(unittest.TestCase):
    """有界编辑距离测试"""

    def test_textbook_example(self):
        """测试经典示例"""
        self.assertEqual(bounded_levenshtein("kitten", "sitting", 10), 3)
        self.assertEqual(bounded_levenshtein("kitten", "sitting", 3), 3)
        self.assertIsNone(bounded_levenshtein("kitten", "sitting", 2))

    def test_identity(self):
        """测试相同字符串距离为 0"""
        for text in ("", "a", "same text", "中文"):
            self.assertEqual(bounded_levenshtein(text, text, 0), 0)

    def test_empty_and_length_gap(self):
        """测试空串与长度差超过上界"""
        self.assertEqual(bounded_levenshtein("", "abc", 3), 3)
        self.assertIsNone(bounded_levenshtein("", "abc", 2))
        self.assertIsNone(bounded_levenshtein("a" * 5, "a" * 100, 20))

    def test_code_points(self):
        """测试按码位而非字节计算"""
        self.assertEqual(bounded_levenshtein("今天天气好", "今天天气很好", 5), 1)
        self.assertEqual(bounded_levenshtein("😷", "🙂", 5), 1)

    def test_negative_bound(self):
        """测试负上界报错"""
        with self.assertRaises(ParameterError):
            bounded_levenshtein("a", "b", -1)

    def test_random_pairs_against_reference(self):
        """测试 10,000 对随机短串（长度 <= 30，四字母）与参考实现一致"""
        rng = np.random.default_rng(2024)
        alphabet = np.array(list("acgt"))
        for _ in range(10000):
            a = "".join(alphabet[rng.integers(0, 4, size=int(rng.integers(0, 31)))])
            b = "".join(alphabet[rng.integers(0, 4, size=int(rng.integers(0, 31)))])
            expected = levenshtein_reference(a, b)
            bound = int(rng.integers(0, 31))
            result = bounded_levenshtein(a, b, bound)
            if expected <= bound:
                self.assertEqual(result, expected, (a, b, bound))
            else:
                self.assertIsNone(result, (a, b, bound))

    def test_tweet_length_pairs_against_reference(self):
        """测试推文长度的文本对与参考实现一致"""
        rng = np.random.default_rng(7)
        words = np.array("the a driver who that died with paul walker no one cares about because he "
                         "wasn't famous omg r.i.p @USER URL lol rt so sad today".split())
        for _ in range(scaled(100, 1000)):
            a = " ".join(words[rng.integers(0, len(words), size=int(rng.integers(10, 25)))])
            tokens = a.split()
            for _ in range(int(rng.integers(0, 6))):
                tokens[int(rng.integers(0, len(tokens)))] = str(rng.choice(words))
            b = " ".join(tokens)
            expected = levenshtein_reference(a, b)
            self.assertEqual(bounded_levenshtein(a, b, 140), expected if expected <= 140 else None)
            result = bounded_levenshtein(a, b, 20)
            self.assertEqual(result, expected if expected <= 20 else None)

    @settings(max_examples=300, deadline=None)
    @given(short_text, short_text, st.integers(min_value=0, max_value=15))
    def test_bound_soundness(self, a, b, bound):
        """测试返回值不超过上界，且真实距离不超过上界时一定返回"""
        result = bounded_levenshtein(a, b, bound)
        expected = levenshtein_reference(a, b)
        if result is None:
            self.assertGreater(expected, bound)
        else:
            self.assertLessEqual(result, bound)
            self.assertEqual(result, expected)

    @settings(max_examples=200, deadline=None)
    @given(short_text, short_text, short_text)
    def test_metric_axioms(self, x, y, z):
        """测试非负、对称、自距离为零和三角不等式"""
        dxy, dyz, dxz = distance(x, y), distance(y, z), distance(x, z)
        self.assertGreaterEqual(dxy, 0)
        self.assertEqual(dxy, distance(y, x))
        self.assertEqual(distance(x, x), 0)
        self.assertEqual(dxy == 0, x == y)
        self.assertLessEqual(dxz, dxy + dyz)


class TestHistogramLowerBound(unittest.TestCase):
    """直方图下界测试"""

    @settings(max_examples=200, deadline=None)
    @given(st.text(max_size=20), st.text(max_size=20))
    def test_never_exceeds_distance(self, a, b):
        """测试下界不超过真实距离"""
        lower = histogram_lower_bounds(char_histogram(a)[None, :], np.array([len(a)]),
                                       char_histogram(b)[None, :], np.array([len(b)]))
        self.assertLessEqual(int(lower[0]), levenshtein_reference(a, b))

    def test_histogram_counts(self):
        """测试直方图计数"""
        histogram = char_histogram("aab")
        self.assertEqual(int(histogram.sum()), 3)
        self.assertEqual(int(histogram[ord("a") % 64]), 2)


if __name__ == '__main__':
    unittest.main()
