"""符号势函数、字质量、符号 Gibbs 检查与 Gurevich 压"""

import logging
import math
from typing import Iterable, Iterator, List, Optional, Sequence

import numpy as np
from scipy import sparse, stats

from src.core import DegenerateLatticeError, ValidationError
from src.gibbs import GibbsMeasure
from src.thermo import Conductances

from .alphabet import Alphabet
from .codec import word_edges
from .models import PressureEstimate, SymbolicGibbsCheck

logger = logging.getLogger(__name__)


def f_symb(alphabet: Alphabet, c: Conductances, letter: int) -> float:
    """字母的势：它所跟随的第一条边 e⁺ 上的电导"""
    return c[alphabet.letters[letter].e_plus]


def birkhoff_sum(alphabet: Alphabet, c: Conductances, word: Sequence[int]) -> float:
    return math.fsum(f_symb(alphabet, c, a) for a in word)


def word_mass(measure: GibbsMeasure, alphabet: Alphabet, word: Sequence[int]) -> float:
    """
    符号柱集 [x₀ … x_{m−1}] 的概率

    固定第一条边的提升，同一字对应 Π class_size 条提升路径，
    再除以第一条边的稳定子阶：K·Π|类|·提升质量 / |G_{e⁻₀}|。
    """
    edges = word_edges(alphabet, word)
    multiplicity = math.prod(alphabet.letters[a].class_size for a in word)
    return measure.normaliser * multiplicity * measure.lifted_mass(edges) / measure.gog.edge_order(edges[0])


def words(alphabet: Alphabet, max_length: int, start: Optional[Iterable[int]] = None) -> Iterator[List[int]]:
    """按深度优先枚举长度 1..max_length 的可容许字"""
    transitions = alphabet.transitions
    starts = range(len(alphabet)) if start is None else start
    for a in starts:
        stack = [[a]]
        while stack:
            word = stack.pop()
            yield word
            if len(word) < max_length:
                for b in reversed(transitions.successors(word[-1])):
                    stack.append(word + [b])


def symbolic_gibbs_check(
    measure: GibbsMeasure,
    alphabet: Alphabet,
    letter_set: Iterable[int],
    max_length: int = 4,
) -> SymbolicGibbsCheck:
    """
    比值 P([x_p … x_q]) / e^{−δ(q−p+1) + Σ F_symb} 在首尾字母属于 E 的字上的上下界

    Raises:
        ValidationError: E 为空或含有未知字母
    """
    E = sorted(set(letter_set))
    if not E:
        raise ValidationError("字母集合 E 不能为空")
    if E[0] < 0 or E[-1] >= len(alphabet):
        raise ValidationError(f"E 中含有未知字母: {E}")
    members = set(E)

    ratios = []
    for word in words(alphabet, max_length, start=E):
        if word[-1] not in members:
            continue
        weight = birkhoff_sum(alphabet, measure.c, word) - measure.delta * len(word)
        ratios.append(word_mass(measure, alphabet, word) / math.exp(weight))

    high, low = max(ratios), min(ratios)
    constant = max(high, 1.0 / low)
    logger.info(f"✅ Symbolic Gibbs constant on {len(E)} letters: C_E = {constant:.6g} over {len(ratios)} words")
    return SymbolicGibbsCheck(
        constant=constant,
        spread=high / low,
        delta=measure.delta,
        words=len(ratios),
        letter_set=E,
    )


def _pressure_matrix(alphabet: Alphabet, c: Conductances, weighted: bool) -> sparse.csr_matrix:
    weights = np.array([c[a.e_plus] for a in alphabet.letters])
    scale = np.exp(weights)
    if weighted:
        scale = scale * alphabet.class_sizes()
    return (alphabet.transitions.matrix.astype(float) @ sparse.diags(scale)).tocsr()


def _log_returns(matrix: sparse.csr_matrix, letter: int, n_max: int) -> List[float]:
    """log Z_n = log (Mⁿ)[w, w]，逐步归一化避免溢出"""
    v = np.zeros(matrix.shape[0])
    v[letter] = 1.0
    log_scale = 0.0
    out = []
    for _ in range(n_max):
        v = matrix.T @ v
        top = v.max()
        if top <= 0:
            out.extend([-math.inf] * (n_max - len(out)))
            break
        v /= top
        log_scale += math.log(top)
        out.append(log_scale + math.log(v[letter]) if v[letter] > 0 else -math.inf)
    return out


def _growth_rate(log_counts: Sequence[float]) -> float:
    """对后半段有周期字的长度做 log Z_n ~ n 线性回归"""
    n_max = len(log_counts)
    points = [(n, z) for n, z in enumerate(log_counts, start=1) if n > n_max // 2 and math.isfinite(z)]
    if len(points) >= 2:
        ns, zs = zip(*points)
        return float(stats.linregress(ns, zs).slope)
    n, z = max(((n, z) for n, z in enumerate(log_counts, start=1) if math.isfinite(z)), default=(0, 0.0))
    return z / n if n else math.nan


def gurevich_pressure(alphabet: Alphabet, c: Conductances, letter: int, n_max: int = 20) -> PressureEstimate:
    """
    经过字母 w 的周期字按 e^{Σ F_symb} 与类大小加权计数的指数增长率

    不按类大小加权的计数作为诊断一并给出。

    Raises:
        ValidationError: 字母编号越界
        DegenerateLatticeError: 没有经过 w 的回路（游荡字母）
    """
    if not (0 <= letter < len(alphabet)):
        raise ValidationError(f"未知字母 {letter}")
    log_counts = _log_returns(_pressure_matrix(alphabet, c, True), letter, n_max)
    if not any(math.isfinite(z) for z in log_counts):
        raise DegenerateLatticeError(f"wandering letter: 长度 ≤ {n_max} 内没有经过字母 {letter} 的回路")
    unweighted = _log_returns(_pressure_matrix(alphabet, c, False), letter, n_max)

    pressure = _growth_rate(log_counts)
    logger.info(f"✅ Gurevich pressure through letter {letter}: {pressure:.6f} (n_max={n_max})")
    return PressureEstimate(
        letter=letter,
        pressure=pressure,
        unweighted=_growth_rate(unweighted),
        log_counts=log_counts,
    )
