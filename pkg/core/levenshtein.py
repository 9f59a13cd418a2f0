"""
有界编辑距离
插入/删除/替换单位代价，以Unicode码位为单位，带状动态规划并提前终止
"""

from typing import Optional

import numpy as np

from utils.exceptions import ParameterError


HISTOGRAM_BINS = 64


def bounded_levenshtein(a: str, b: str, bound: int) -> Optional[int]:
    """
    计算不超过 bound 的编辑距离

    Args:
        a: 第一个字符串
        b: 第二个字符串
        bound: 距离上界（>= 0）

    Returns:
        距离 <= bound 时返回精确距离，否则返回 None
    """
    if bound < 0:
        raise ParameterError("bound", bound, ">= 0")
    if a == b:
        return 0

    # 去掉公共前后缀不改变距离
    start = 0
    limit = min(len(a), len(b))
    while start < limit and a[start] == b[start]:
        start += 1
    end_a, end_b = len(a), len(b)
    while end_a > start and end_b > start and a[end_a - 1] == b[end_b - 1]:
        end_a -= 1
        end_b -= 1
    a, b = a[start:end_a], b[start:end_b]

    if len(a) > len(b):
        a, b = b, a
    la, lb = len(a), len(b)
    if lb - la > bound:
        return None
    if la == 0:
        return lb

    inf = bound + 1
    prev = [j if j <= bound else inf for j in range(lb + 1)]
    curr = [inf] * (lb + 1)

    for i in range(1, la + 1):
        lo = max(1, i - bound)
        hi = min(lb, i + bound)
        curr[lo - 1] = i if lo == 1 and i <= bound else inf
        ch = a[i - 1]
        row_min = curr[lo - 1]

        for j in range(lo, hi + 1):
            cost = prev[j - 1] + (ch != b[j - 1])
            deletion = prev[j] + 1
            if deletion < cost:
                cost = deletion
            insertion = curr[j - 1] + 1
            if insertion < cost:
                cost = insertion
            if cost > inf:
                cost = inf
            curr[j] = cost
            if cost < row_min:
                row_min = cost

        if hi < lb:
            curr[hi + 1] = inf
        if row_min > bound:
            return None
        prev, curr = curr, prev

    distance = prev[lb]
    return distance if distance <= bound else None


def char_histogram(text: str, bins: int = HISTOGRAM_BINS) -> np.ndarray:
    """按码位取模分箱的字符计数"""
    codes = np.fromiter((ord(ch) % bins for ch in text), dtype=np.int64, count=len(text))
    return np.bincount(codes, minlength=bins).astype(np.int32)


def histogram_lower_bounds(hist: np.ndarray, length: int,
                           others: np.ndarray, other_lengths: np.ndarray) -> np.ndarray:
    """
    编辑距离的多重集下界 (L1 + |长度差|) / 2

    分箱合并只会让 L1 变小，因此仍是下界。
    """
    l1 = np.abs(others - hist).sum(axis=1)
    return (l1 + np.abs(other_lengths - length)) // 2
