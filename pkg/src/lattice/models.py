"""数据模型定义：商图、群图、生成器参数"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, FrozenSet, List, Mapping, Optional, Tuple

import networkx as nx

from src.algebra import FiniteAbelianGroup, Monomorphism
from src.core import ValidationError

# 已知的生成器类型
GENERATOR_KINDS = ("modular_ray", "quadratic_growth", "rooted_tree_lattice", "explicit")


@dataclass(frozen=True, eq=False)
class QuotientGraph:
    """带对合 e ↦ ē 的有向边商图"""

    vertices: Tuple[str, ...]
    """顶点标识"""

    origin: Mapping[str, str]
    """边 → 起点 o(e)"""

    terminus: Mapping[str, str]
    """边 → 终点 t(e)"""

    opposite: Mapping[str, str]
    """边 → 反向边 ē"""

    @cached_property
    def edges(self) -> Tuple[str, ...]:
        return tuple(sorted(self.origin))

    @cached_property
    def _out(self) -> Dict[str, Tuple[str, ...]]:
        table: Dict[str, List[str]] = {v: [] for v in self.vertices}
        for e in self.edges:
            table.setdefault(self.origin[e], []).append(e)
        return {v: tuple(es) for v, es in table.items()}

    @cached_property
    def _in(self) -> Dict[str, Tuple[str, ...]]:
        table: Dict[str, List[str]] = {v: [] for v in self.vertices}
        for e in self.edges:
            table.setdefault(self.terminus[e], []).append(e)
        return {v: tuple(es) for v, es in table.items()}

    def out_edges(self, v: str) -> Tuple[str, ...]:
        return self._out.get(v, ())

    def in_edges(self, v: str) -> Tuple[str, ...]:
        return self._in.get(v, ())

    def o(self, e: str) -> str:
        return self.origin[e]

    def t(self, e: str) -> str:
        return self.terminus[e]

    def bar(self, e: str) -> str:
        return self.opposite[e]

    def to_networkx(self) -> nx.MultiGraph:
        """几何图（每对 {e, ē} 一条无向边）"""
        g = nx.MultiGraph()
        g.add_nodes_from(self.vertices)
        for e in self.edges:
            if e <= self.opposite.get(e, e):
                g.add_edge(self.origin[e], self.terminus[e], key=e)
        return g

    def is_connected(self) -> bool:
        if not self.vertices:
            return False
        return nx.is_connected(self.to_networkx())

    def distances_from(self, v: str) -> Dict[str, int]:
        return dict(nx.single_source_shortest_path_length(self.to_networkx(), v))


@dataclass(frozen=True)
class TailModel:
    """
    生成器格的自相似尾部描述

    距离为 n 的球面上 Σ 1/|G_x| 不超过 scale·ratioⁿ（n 超过截断深度时）。
    """

    scale: Fraction
    ratio: Fraction

    def __post_init__(self):
        if not (0 <= self.ratio < 1):
            raise ValidationError(f"尾部公比必须在 [0, 1) 内: {self.ratio}")

    def sphere_bound(self, n: int) -> Fraction:
        return self.scale * self.ratio**n

    def volume_tail(self, depth: int) -> Fraction:
        """Σ_{n > depth} scale·ratioⁿ"""
        return self.scale * self.ratio ** (depth + 1) / (1 - self.ratio)


@dataclass(frozen=True, eq=False)
class GraphOfGroups:
    """商图上的有限阿贝尔群图"""

    graph: QuotientGraph
    vertex_groups: Mapping[str, FiniteAbelianGroup]
    edge_groups: Mapping[str, FiniteAbelianGroup]
    monos: Mapping[str, Monomorphism]
    """边 e → 单同态 G_e → G_{o(e)}"""

    base_vertex: str
    frontier: FrozenSet[str] = frozenset()
    """被截断切掉边的顶点"""

    tail: Optional[TailModel] = None
    name: str = "explicit"

    @property
    def vertices(self) -> Tuple[str, ...]:
        return self.graph.vertices

    @property
    def edges(self) -> Tuple[str, ...]:
        return self.graph.edges

    def vertex_order(self, v: str) -> int:
        return self.vertex_groups[v].order

    def edge_order(self, e: str) -> int:
        return self.edge_groups[e].order

    def edge_index(self, e: str) -> int:
        """[G_{o(e)} : α_e(G_e)]"""
        return self.monos[e].index

    @cached_property
    def _degrees(self) -> Dict[str, int]:
        return {
            v: sum(self.edge_index(e) for e in self.graph.out_edges(v))
            for v in self.vertices
        }

    def lift_degree(self, v: str) -> int:
        return self._degrees[v]

    @cached_property
    def distances(self) -> Dict[str, int]:
        """各顶点到基点的商图距离"""
        return self.graph.distances_from(self.base_vertex)

    @property
    def depth(self) -> int:
        return max(self.distances.values(), default=0)

    def restrict(self, keep: FrozenSet[str]) -> "GraphOfGroups":
        """保留给定顶点及其间的边"""
        edges = [e for e in self.edges if self.graph.o(e) in keep and self.graph.t(e) in keep]
        graph = QuotientGraph(
            vertices=tuple(v for v in self.vertices if v in keep),
            origin={e: self.graph.o(e) for e in edges},
            terminus={e: self.graph.t(e) for e in edges},
            opposite={e: self.graph.bar(e) for e in edges},
        )
        base = self.base_vertex if self.base_vertex in keep else graph.vertices[0]
        return GraphOfGroups(
            graph=graph,
            vertex_groups={v: self.vertex_groups[v] for v in graph.vertices},
            edge_groups={e: self.edge_groups[e] for e in edges},
            monos={e: self.monos[e] for e in edges},
            base_vertex=base,
            frontier=frozenset(v for v in self.frontier if v in keep),
            tail=self.tail,
            name=self.name,
        )

    def summary(self) -> dict:
        return {
            "name": self.name,
            "vertices": len(self.vertices),
            "edges": len(self.edges),
            "base_vertex": self.base_vertex,
            "depth": self.depth,
            "frontier": sorted(self.frontier),
        }


@dataclass
class GeneratorSpec:
    """格生成器参数"""

    kind: str
    """生成器类型"""

    q: int = 2
    """参数 q"""

    depth: int = 10
    """截断深度"""

    children: Tuple[int, ...] = (2,)
    """有根树每个顶点的子节点数（广度优先，循环使用）"""

    config_text: Optional[str] = None
    """explicit 类型的 JSON 文本"""

    def __post_init__(self):
        """数据验证"""
        if self.kind not in GENERATOR_KINDS:
            raise ValidationError(f"未知的生成器 '{self.kind}'，可选: {', '.join(GENERATOR_KINDS)}")
        if self.kind == "explicit":
            if not self.config_text:
                raise ValidationError("explicit 生成器需要配置文本")
            return
        if self.q < 2:
            raise ValidationError(f"q 必须 ≥ 2: {self.q}")
        if self.depth < 1:
            raise ValidationError(f"截断深度必须 ≥ 1: {self.depth}")
        self.children = tuple(int(c) for c in self.children)
        if self.kind == "quadratic_growth" and self.q % 2:
            raise ValidationError(f"quadratic_growth 需要偶数 q: {self.q}")
        if self.kind == "rooted_tree_lattice":
            if not self.children or any(c < 0 for c in self.children):
                raise ValidationError(f"子节点数列表不合法: {self.children}")
            if self.q <= self.max_tree_degree:
                raise ValidationError(
                    f"q = {self.q} 必须大于树的最大度 {self.max_tree_degree}"
                )

    @property
    def max_tree_degree(self) -> int:
        """有根树的最大度 d（非根顶点还连着父节点）"""
        return max(self.children) + 1


@dataclass
class ValidationReport:
    """结构检查结果"""

    errors: List[str] = field(default_factory=list)
    low_degree: List[str] = field(default_factory=list)
    """提升度 < 3 的顶点（截断边界除外）"""

    leaves: List[str] = field(default_factory=list)
    """提升度 < 2 的顶点"""

    @property
    def valid(self) -> bool:
        return not self.errors

    def to_dict(self) -> dict:
        return {
            "valid": self.valid,
            "errors": self.errors,
            "low_degree": self.low_degree,
            "leaves": self.leaves,
        }
