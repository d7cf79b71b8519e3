"""对数导通系数（商图有向边上的有界实函数）"""

import logging
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Tuple

import numpy as np

from src.core import ValidationError
from src.lattice import GraphOfGroups, QuotientGraph

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Conductances:
    """
    导通系数 c: 有向边 → 实数

    商图上的函数自动是 Γ-不变的。
    """

    values: Mapping[str, float]
    graph: QuotientGraph = field(compare=False, repr=False)

    def __post_init__(self):
        """数据验证"""
        missing = [e for e in self.graph.edges if e not in self.values]
        if missing:
            raise ValidationError(f"导通系数缺少边: {', '.join(missing[:5])}")
        bad = [e for e, v in self.values.items() if not math.isfinite(float(v))]
        if bad:
            raise ValidationError(f"导通系数必须有限: {', '.join(bad[:5])}")
        object.__setattr__(self, "values", {e: float(self.values[e]) for e in self.graph.edges})

    @classmethod
    def zero(cls, gog: GraphOfGroups) -> "Conductances":
        return cls.constant(gog, 0.0)

    @classmethod
    def constant(cls, gog: GraphOfGroups, kappa: float) -> "Conductances":
        return cls({e: kappa for e in gog.edges}, gog.graph)

    @classmethod
    def visual(cls, gog: GraphOfGroups) -> "Conductances":
        """
        c(e) = −log(deg(o(e)) − 1)，deg 为覆盖树中的提升度

        每一步在 deg − 1 个非回溯延续之间均匀分配：前向 Patterson 向量为常数，δ = 0，
        Gibbs 边质量正比于 1/|G_e|。

        Raises:
            ValidationError: 存在提升度 < 2 的顶点
        """
        graph = gog.graph
        leaves = [v for v in graph.vertices if gog.lift_degree(v) < 2]
        if leaves:
            raise ValidationError(f"视觉势要求提升度 ≥ 2: {', '.join(sorted(leaves)[:5])}")
        return cls({e: -math.log(gog.lift_degree(graph.o(e)) - 1) for e in gog.edges}, graph)

    @classmethod
    def from_mapping(cls, gog: GraphOfGroups, values: Mapping[str, float], default: Optional[float] = None) -> "Conductances":
        """
        按边给出的导通系数

        Args:
            default: 未给出的边使用的值；None 表示必须全部给出
        """
        unknown = [e for e in values if e not in gog.graph.origin]
        if unknown:
            raise ValidationError(f"未知的边: {', '.join(unknown[:5])}")
        if default is not None:
            values = {e: values.get(e, default) for e in gog.edges}
        return cls(dict(values), gog.graph)

    @classmethod
    def random(cls, gog: GraphOfGroups, seed: int, low: float = -0.5, high: float = 0.5) -> "Conductances":
        """[low, high) 上均匀分布的随机导通系数"""
        if low > high:
            raise ValidationError(f"区间不合法: [{low}, {high})")
        rng = np.random.default_rng(seed)
        draws = rng.uniform(low, high, size=len(gog.edges))
        return cls(dict(zip(gog.edges, draws.tolist())), gog.graph)

    def __getitem__(self, e: str) -> float:
        return self.values[e]

    @property
    def bounds(self) -> Tuple[float, float]:
        vals = list(self.values.values())
        return (min(vals), max(vals)) if vals else (0.0, 0.0)

    @property
    def is_zero(self) -> bool:
        return all(v == 0.0 for v in self.values.values())

    def reversed(self) -> "Conductances":
        """时间反演 c̄(e) = c(ē)"""
        return Conductances({e: self.values[self.graph.bar(e)] for e in self.graph.edges}, self.graph)

    def cohomologous(self, f: Mapping[str, float]) -> "Conductances":
        """c'(e) = c(e) + f(t(e)) − f(o(e))"""
        return Conductances(
            {
                e: self.values[e] + f.get(self.graph.t(e), 0.0) - f.get(self.graph.o(e), 0.0)
                for e in self.graph.edges
            },
            self.graph,
        )

    def shifted(self, kappa: float) -> "Conductances":
        return Conductances({e: v + kappa for e, v in self.values.items()}, self.graph)

    def along(self, edges: Sequence[str]) -> float:
        """路径上的导通系数之和"""
        return math.fsum(self.values[e] for e in edges)

    def vector(self, edges: Sequence[str]) -> np.ndarray:
        """按给定边顺序排列的数组"""
        return np.array([self.values[e] for e in edges])

    def to_dict(self) -> dict:
        return dict(self.values)
