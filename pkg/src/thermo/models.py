"""热力学形式化的结果模型"""

from dataclasses import dataclass, field
from typing import List, Optional

from src.core import ValidationError

MEASURE_MODES = ("exact", "truncated")


@dataclass
class MeasureEstimate:
    """测度值及其截断误差"""

    value: float
    error: float = 0.0
    mode: str = "exact"

    def __post_init__(self):
        """数据验证"""
        if self.mode not in MEASURE_MODES:
            raise ValidationError(f"未知的测度模式: {self.mode}")
        if self.value < 0 or self.error < 0:
            raise ValidationError(f"测度值与误差必须非负: {self.value}, {self.error}")
        if self.mode == "exact":
            self.error = 0.0

    def to_dict(self) -> dict:
        return {"value": self.value, "error": self.error, "mode": self.mode}


@dataclass
class PoincarePartial:
    """Poincaré 级数的逐半径部分和"""

    s: float
    increments: List[float]
    partials: List[float]
    growth: Optional[float]
    """最后两个非零增量的单步比值"""

    diagnostic: str
    """convergent / critical / divergent"""

    def to_dict(self) -> dict:
        return {
            "s": self.s,
            "increments": self.increments,
            "partials": self.partials,
            "growth": self.growth,
            "diagnostic": self.diagnostic,
        }


@dataclass
class PotentialSummary:
    """临界指数估计与回归诊断"""

    delta_estimate: float
    annulus_sums: List[float]
    window: List[int]
    intercept: float
    r_squared: float
    residuals: List[float]
    exact: Optional[float] = None
    """转移算子给出的精确值（截断格上）"""

    bounds: Optional[tuple] = None

    @property
    def delta(self) -> float:
        """Gibbs 权重中使用的 δ：有精确值时优先"""
        return self.exact if self.exact is not None else self.delta_estimate

    def to_dict(self) -> dict:
        return {
            "delta_estimate": self.delta_estimate,
            "delta_exact": self.exact,
            "annulus_sums": self.annulus_sums,
            "window": self.window,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "residuals": self.residuals,
            "bounds": list(self.bounds) if self.bounds else None,
        }


@dataclass
class ShadowLemmaReport:
    """影子引理检查结果"""

    kappa: float
    r: int
    radius: int
    ratios: List[dict] = field(default_factory=list)
    """每个深度的比值范围 {depth, min, max}"""

    inside: int = 0
    """被球包含而跳过的轨道点个数"""

    def to_dict(self) -> dict:
        return {
            "kappa": self.kappa,
            "r": self.r,
            "radius": self.radius,
            "ratios": self.ratios,
            "inside": self.inside,
        }
