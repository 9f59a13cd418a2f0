"""
并查集数据结构实现
用于把近重复记录对合并为传递闭包簇
"""

from typing import Dict, Iterable, List, Tuple


class UnionFind:
    """按秩合并、路径压缩的并查集"""

    def __init__(self, n: int):
        """
        初始化并查集

        Args:
            n: 元素数量
        """
        self.parent = list(range(n))
        self.rank = [0] * n
        self.component_count = n

    def __len__(self) -> int:
        return len(self.parent)

    def find(self, x: int) -> int:
        """查找根节点；迭代压缩，长近重复链不会触发递归上限"""
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: int, y: int) -> bool:
        """
        合并 x 与 y 所在的集合

        Returns:
            两者原本不在同一集合时为 True
        """
        root_x, root_y = self.find(x), self.find(y)
        if root_x == root_y:
            return False

        if self.rank[root_x] < self.rank[root_y]:
            root_x, root_y = root_y, root_x
        self.parent[root_y] = root_x
        if self.rank[root_x] == self.rank[root_y]:
            self.rank[root_x] += 1

        self.component_count -= 1
        return True

    def groups(self) -> Dict[int, List[int]]:
        """根节点 -> 升序成员列表"""
        members: Dict[int, List[int]] = {}
        for element in range(len(self.parent)):
            members.setdefault(self.find(element), []).append(element)
        return members


class PositionUnionFind(UnionFind):
    """以语料位置为元素的并查集，代表元取分量内最小位置"""

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[Tuple[int, int]]) -> "PositionUnionFind":
        uf = cls(n)
        for a, b in pairs:
            uf.union(a, b)
        return uf

    def clusters(self, min_size: int = 2) -> List[Tuple[int, ...]]:
        """
        规模不小于 min_size 的簇

        Returns:
            每簇为升序位置元组，簇之间按代表元（最小位置）排序
        """
        found = [tuple(members) for members in self.groups().values() if len(members) >= min_size]
        return sorted(found, key=lambda members: members[0])
