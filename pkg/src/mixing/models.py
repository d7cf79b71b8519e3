"""混合性数据模型"""

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from src.core import ValidationError


@dataclass
class SeriesPoint:
    """CSV 序列中的一行 n,value,error"""

    n: int
    value: float
    error: float = 0.0

    def to_row(self) -> list:
        return [self.n, self.value, self.error]


@dataclass
class ReturnTail:
    """回返时间尾部 t(n) = m({ℓ(0) ∈ E, τ_E(ℓ) ≥ n})"""

    E: List[str]
    points: List[SeriesPoint]
    mode: str
    """exact 或 monte_carlo"""

    def __post_init__(self):
        """数据验证"""
        if self.mode not in ("exact", "monte_carlo"):
            raise ValidationError(f"未知的尾部模式: {self.mode}")

    @property
    def values(self) -> List[float]:
        return [p.value for p in self.points]


@dataclass
class ExponentialFit:
    """log y(n) ≈ log c − κ n 的最小二乘拟合"""

    constant: float
    kappa: float
    r_squared: float
    window: Tuple[int, int]
    exponential: bool
    """κ 显著为正且拟合有效"""

    degenerate: bool = False
    """输入全为零（κ = ∞）"""

    def to_dict(self) -> dict:
        return {
            "constant": self.constant,
            "kappa": self.kappa,
            "r_squared": self.r_squared,
            "window": list(self.window),
            "exponential": self.exponential,
            "degenerate": self.degenerate,
        }


@dataclass
class Excursion:
    """从 E-字母出发、内部避开 E-字母、在 E-字母结束的字"""

    word: List[int]
    mass: float
    height: int
    """途经顶点到 E 的最大商图距离"""

    @property
    def length(self) -> int:
        """回返时间"""
        return len(self.word) - 1


@dataclass
class ExcursionSet:
    """有限顶点集 E 上的远足分解"""

    E: List[str]
    letters: List[int]
    excursions: List[Excursion]
    letter_mass: dict
    """E-字母 → 柱集质量"""

    remaining: dict
    """E-字母 → 长度上限内未返回部分的质量（尾部界）"""

    length_cap: int
    complete: bool = True

    def partition_defect(self) -> float:
        """各 E-字母上 |Σ 远足质量 + 剩余质量 − 字母质量| 的最大值"""
        totals = {a: 0.0 for a in self.letters}
        for ex in self.excursions:
            totals[ex.word[0]] += ex.mass
        return max(
            (abs(totals[a] + self.remaining[a] - self.letter_mass[a]) for a in self.letters),
            default=0.0,
        )

    def by_height(self) -> dict:
        """高度 → (远足个数, 总质量)"""
        summary: dict = {}
        for ex in self.excursions:
            count, mass = summary.get(ex.height, (0, 0.0))
            summary[ex.height] = (count + 1, mass + ex.mass)
        return dict(sorted(summary.items()))

    def to_dict(self) -> dict:
        return {
            "E": self.E,
            "letters": self.letters,
            "excursions": len(self.excursions),
            "length_cap": self.length_cap,
            "complete": self.complete,
            "partition_defect": self.partition_defect(),
            "remaining": {str(a): m for a, m in self.remaining.items()},
            "by_height": {str(h): list(v) for h, v in self.by_height().items()},
        }


@dataclass
class JacobianCheck:
    """P([w·z]) / P([w_n·z]) 在各延伸 z 上的比值范围"""

    word: List[int]
    low: float
    high: float
    refinements: int
    skipped: int = 0

    @property
    def deviation(self) -> float:
        """max/min，常数 Jacobian 时为 1"""
        return self.high / self.low if self.refinements else 1.0

    def to_dict(self) -> dict:
        return {
            "word": self.word,
            "low": self.low,
            "high": self.high,
            "deviation": self.deviation,
            "refinements": self.refinements,
            "skipped": self.skipped,
        }


@dataclass
class CorrelationSeries:
    """相关系数序列 cov(n)"""

    points: List[SeriesPoint] = field(default_factory=list)
    mode: str = "exact"
    samples: Optional[int] = None
    seed: Optional[int] = None

    @property
    def values(self) -> List[float]:
        return [p.value for p in self.points]
