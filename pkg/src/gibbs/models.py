"""Gibbs 测度数据模型"""

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from src.core import ValidationError
from src.cover import CoverVertex
from src.thermo import MeasureEstimate


@dataclass
class CylinderSpec:
    """
    柱集：经过给定商图边路径（在覆盖树中有一个固定提升）的测地线，
    时间 0 位于路径的第 footpoint 个顶点
    """

    edges: Tuple[str, ...]
    footpoint: int = 0
    start: Optional[CoverVertex] = None
    """提升的起点；None 表示任取（质量与提升无关）"""

    def __post_init__(self):
        """数据验证"""
        self.edges = tuple(self.edges)
        if not self.edges:
            raise ValidationError("柱集路径长度必须 ≥ 1")
        if not (0 <= self.footpoint <= len(self.edges)):
            raise ValidationError(f"基点下标 {self.footpoint} 不在路径内")

    @property
    def length(self) -> int:
        return len(self.edges)


@dataclass
class GibbsCheck:
    """Gibbs 性质检查结果"""

    constant: float
    """C_K = max(最大比值, 1/最小比值)"""

    spread: float
    """最大比值 / 最小比值"""

    slope: float
    """log(质量) − Σc 对长度的回归斜率（应接近 −δ）"""

    delta: float
    cylinders: int
    window: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "constant": self.constant,
            "spread": self.spread,
            "slope": self.slope,
            "delta": self.delta,
            "cylinders": self.cylinders,
            "window": self.window,
        }


@dataclass
class TotalMass:
    """未归一化 Gibbs 测度总质量的估计"""

    estimate: MeasureEstimate
    levels: List[float]
    """按起点深度分组的贡献"""

    ratio: Optional[float]
    infinite: bool
    certified: bool

    def to_dict(self) -> dict:
        return {
            **self.estimate.to_dict(),
            "levels": self.levels,
            "ratio": self.ratio,
            "infinite": self.infinite,
            "certified": self.certified,
        }


@dataclass
class SampledGeodesic:
    """采样得到的双向测地线片段"""

    edges: List[str]
    footpoint: int
    seed: int
    vertices: Optional[List[CoverVertex]] = None
    """覆盖树中的提升（可选）"""

    @property
    def length(self) -> int:
        return len(self.edges)
