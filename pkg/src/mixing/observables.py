"""有限窗口字母观测函数"""

import math
from dataclasses import dataclass
from typing import Callable, Dict, Sequence, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from src.coding import Alphabet, words
from src.core import ValidationError

Word = Tuple[int, ...]


@dataclass
class Observable:
    """
    依赖窗口 [−k, k] 内字母的观测函数

    table 中没有的字取值 0。局部常值函数对任意 α 都是 α-Hölder 的，范数可在表上精确计算。
    """

    depth: int
    table: Dict[Word, float]
    alpha: float = 1.0
    name: str = "observable"

    def __post_init__(self):
        """数据验证"""
        if self.depth < 0:
            raise ValidationError(f"窗口深度必须 ≥ 0: {self.depth}")
        if not (0 < self.alpha <= 1):
            raise ValidationError(f"Hölder 指数必须在 (0, 1] 内: {self.alpha}")
        width = 2 * self.depth + 1
        for word, value in self.table.items():
            if len(word) != width:
                raise ValidationError(f"字 {word} 的长度不是 {width}")
            if not math.isfinite(value):
                raise ValidationError(f"字 {word} 上的取值不是有限数")

    @classmethod
    def indicator(cls, alphabet: Alphabet, letter: int, alpha: float = 1.0) -> "Observable":
        table = {(a,): float(a == letter) for a in range(len(alphabet))}
        return cls(0, table, alpha, name=f"1[{letter}]")

    @classmethod
    def constant(cls, alphabet: Alphabet, value: float) -> "Observable":
        return cls(0, {(a,): value for a in range(len(alphabet))}, name=f"const({value})")

    @classmethod
    def from_callable(
        cls,
        alphabet: Alphabet,
        depth: int,
        fn: Callable[[Word], float],
        alpha: float = 1.0,
        name: str = "observable",
    ) -> "Observable":
        """在全部长度 2k+1 的可容许字上求值"""
        width = 2 * depth + 1
        table = {tuple(w): float(fn(tuple(w))) for w in words(alphabet, width) if len(w) == width}
        return cls(depth, table, alpha, name)

    @classmethod
    def random(cls, alphabet: Alphabet, depth: int, seed: int, alpha: float = 1.0) -> "Observable":
        """取值在 [−1, 1] 上均匀的随机表"""
        rng = np.random.default_rng(seed)
        width = 2 * depth + 1
        keys = [tuple(w) for w in words(alphabet, width) if len(w) == width]
        values = rng.uniform(-1.0, 1.0, size=len(keys))
        return cls(depth, dict(zip(keys, values.tolist())), alpha, name=f"random(seed={seed})")

    def __call__(self, word: Sequence[int]) -> float:
        return self.table.get(tuple(word), 0.0)

    def sup_norm(self) -> float:
        return max((abs(v) for v in self.table.values()), default=0.0)

    def holder_norm(self) -> float:
        """
        ‖φ‖_α = ‖φ‖_∞ + max |φ(x) − φ(y)| / d(x, y)^α

        在 [−(n−1), n−1] 上一致的字之间 d ≤ e^{−n}（0 处不同时 d = 1），
        所以对每个 n ≤ k 按中心窗口分组取极差即可。
        """
        seminorm = 0.0
        for n in range(self.depth + 1):
            groups: Dict[Word, list] = {}
            for word, value in self.table.items():
                key = word[self.depth - n + 1:self.depth + n] if n > 0 else ()
                groups.setdefault(key, []).append(value)
            for group in groups.values():
                seminorm = max(seminorm, (max(group) - min(group)) / math.exp(-self.alpha * n))
        return self.sup_norm() + seminorm

    def evaluate(self, letters: Sequence[int]) -> np.ndarray:
        """
        沿字母序列求值

        Returns:
            长度 len(letters) − 2k 的数组，第 i 项对应以 letters[i + k] 为中心的窗口
        """
        width = 2 * self.depth + 1
        seq = np.asarray(letters, dtype=np.int64)
        if seq.size < width:
            raise ValidationError(f"序列长度 {seq.size} 小于窗口宽度 {width}")
        if not self.table:
            return np.zeros(seq.size - width + 1)
        base = int(max(seq.max(), max(max(w) for w in self.table))) + 1
        powers = base ** np.arange(width, dtype=np.int64)
        codes = sliding_window_view(seq, width) @ powers

        keys = np.array([np.dot(w, powers) for w in self.table], dtype=np.int64)
        order = np.argsort(keys)
        keys, vals = keys[order], np.array(list(self.table.values()))[order]
        pos = np.clip(np.searchsorted(keys, codes), 0, len(keys) - 1)
        return np.where(keys[pos] == codes, vals[pos], 0.0)
