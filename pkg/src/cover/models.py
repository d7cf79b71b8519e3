"""覆盖树数据模型"""

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from src.algebra import GroupElement

Step = Tuple[str, GroupElement]
"""地址中的一步：(商图边, 典范陪集代表元)"""


@dataclass(frozen=True, order=True)
class CoverVertex:
    """Bass–Serre 覆盖树的顶点，以从基点出发的约化地址表示"""

    address: Tuple[Step, ...]
    projection: str

    @property
    def depth(self) -> int:
        return len(self.address)

    @property
    def last_edge(self) -> Optional[str]:
        return self.address[-1][0] if self.address else None

    def prefix(self, length: int) -> Tuple[Step, ...]:
        return self.address[:length]

    def __str__(self) -> str:
        steps = "·".join(f"{e}{list(c)}" for e, c in self.address)
        return f"[{steps or '∅'}]@{self.projection}"


def common_prefix(a: Tuple[Step, ...], b: Tuple[Step, ...]) -> int:
    """两个地址公共前缀的长度"""
    n = 0
    for x, y in zip(a, b):
        if x != y:
            break
        n += 1
    return n


@dataclass(frozen=True)
class Cone:
    """
    有向边 apex → target 之后的锥

    apex 为 None 表示整个边界（观察点位于集合内部）。
    """

    apex: Optional[CoverVertex]
    target: Optional[CoverVertex]
    edge: Optional[str] = None

    @classmethod
    def full_boundary(cls) -> "Cone":
        return cls(None, None, None)

    @property
    def is_full(self) -> bool:
        return self.apex is None


@dataclass
class CoverPath:
    """覆盖树中的测地路径"""

    vertices: List[CoverVertex]
    edges: List[str]
    """每一步对应的商图边"""

    @property
    def length(self) -> int:
        return len(self.edges)


@dataclass
class OrbitPoint:
    """基点顶点的提升"""

    vertex: CoverVertex
    depth: int
    stabiliser_order: int


@dataclass
class CoverBall:
    """以基点为中心的球"""

    radius: int
    radius_achieved: int
    sphere_sizes: List[int]
    vertices: Optional[List[CoverVertex]] = None
    """测度模式下为 None，只给出计数"""

    stabiliser_orders: dict = field(default_factory=dict)
    measure_only: bool = False

    @property
    def complete(self) -> bool:
        return self.radius_achieved >= self.radius

    def to_dict(self) -> dict:
        return {
            "radius": self.radius,
            "radius_achieved": self.radius_achieved,
            "sphere_sizes": self.sphere_sizes,
            "measure_only": self.measure_only,
        }
