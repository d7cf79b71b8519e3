"""符号编码数据模型"""

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from src.algebra import GroupElement
from src.core import ValidationError
from src.cover import CoverVertex, Step


@dataclass(frozen=True, order=True)
class Letter:
    """
    字母 (e⁻, h, e⁺)

    h 是 G_{t(e⁻)} 中模 α_{ē⁻}(G_{e⁻}) + α_{e⁺}(G_{e⁺}) 的典范代表元。
    """

    e_minus: str
    h: GroupElement
    e_plus: str
    class_size: int = field(default=1, compare=False)
    """双陪集包含的 K-陪集个数，即覆盖树中用同一字母表示的延续数"""

    def to_dict(self, letter_id: int) -> dict:
        return {
            "id": letter_id,
            "e_minus": self.e_minus,
            "h_rep": list(self.h),
            "e_plus": self.e_plus,
            "class_size": self.class_size,
        }


@dataclass
class SymbolSequence:
    """
    有限截断的可容许字母序列

    letters[origin] 是时间 0 的字母；anchor 记录提升的起点与第一步，
    解码时据此复原原来的提升，缺省时使用典范提升。
    """

    letters: List[int]
    origin: int = 0
    anchor: Optional[Tuple[CoverVertex, Step]] = None
    boundary: Optional[int] = None
    """编码因资源上限提前终止时，停止处的顶点下标"""

    def __post_init__(self):
        """数据验证"""
        if self.letters and not (0 <= self.origin < len(self.letters)):
            raise ValidationError(f"原点下标 {self.origin} 不在序列内")

    def __len__(self) -> int:
        return len(self.letters)

    def at(self, i: int) -> Optional[int]:
        """相对原点下标 i 处的字母，越界时为 None"""
        k = self.origin + i
        if 0 <= k < len(self.letters):
            return self.letters[k]
        return None

    def shifted(self, steps: int = 1) -> "SymbolSequence":
        """移位 σ^steps：同一列字母，原点后移"""
        return SymbolSequence(list(self.letters), self.origin + steps, None, self.boundary)

    @property
    def complete(self) -> bool:
        return self.boundary is None


@dataclass
class SymbolicGibbsCheck:
    """符号 Gibbs 性质检查结果"""

    constant: float
    spread: float
    delta: float
    words: int
    letter_set: List[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "constant": self.constant,
            "spread": self.spread,
            "delta": self.delta,
            "words": self.words,
            "letter_set": self.letter_set,
        }


@dataclass
class MarkovTestResult:
    """一阶与二阶条件分布的列联表检验"""

    statistic: float
    dof: int
    p_value: float
    contexts: List[dict] = field(default_factory=list)
    """每个中间字母的统计量、自由度、p 值与观测数"""

    skipped: List[int] = field(default_factory=list)
    """观测不足而跳过的中间字母"""

    @property
    def violation(self) -> bool:
        return self.p_value < 0.01

    def to_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "dof": self.dof,
            "p_value": self.p_value,
            "violation": self.violation,
            "contexts": self.contexts,
            "skipped": self.skipped,
        }


@dataclass
class PressureEstimate:
    """Gurevich 压的增长率估计"""

    letter: int
    pressure: float
    unweighted: float
    log_counts: List[float] = field(default_factory=list)
    """各长度 n 的 log Z_n（没有周期字时为 -inf）"""

    def to_dict(self) -> dict:
        return {
            "letter": self.letter,
            "pressure": self.pressure,
            "unweighted": self.unweighted,
            "log_counts": self.log_counts,
        }
