"""相关系数：精确（深度 0）与 Monte Carlo（批均值误差）"""

import logging
import math
from typing import List, Optional, Sequence

import numpy as np
from scipy import sparse

from src.coding import Alphabet, word_mass
from src.core import ValidationError
from src.gibbs import GibbsMeasure

from .models import CorrelationSeries, ExponentialFit, SeriesPoint
from .observables import Observable
from .tails import exp_tail_fit

logger = logging.getLogger(__name__)

BATCHES = 20


def letter_chain(measure: GibbsMeasure, alphabet: Alphabet):
    """
    字母过程的平稳分布与转移矩阵

    Q(a → b) = P(e⁺_a → e⁺_b) · |b| / N[e⁺_a, e⁺_b]，|b| 为 b 的类大小。

    Returns:
        (平稳分布 π, 稀疏转移矩阵 Q)
    """
    op = measure.operator
    pi = np.array([word_mass(measure, alphabet, [a]) for a in range(len(alphabet))])
    rows, cols, vals = [], [], []
    for a, letter in enumerate(alphabet.letters):
        i = op.position[letter.e_plus]
        for b in alphabet.transitions.successors(a):
            j = op.position[alphabet.letters[b].e_plus]
            share = alphabet.letters[b].class_size / op.counts[i, j]
            rows.append(a)
            cols.append(b)
            vals.append(measure.transition[i, j] * share)
    n = len(alphabet)
    return pi, sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))


def exact_correlations(
    measure: GibbsMeasure,
    alphabet: Alphabet,
    phi: Observable,
    psi: Observable,
    n_max: int,
) -> CorrelationSeries:
    """
    cov(n) = ∫(φ∘σⁿ)ψ − ∫φ∫ψ，沿字母 Markov 算子精确计算

    Raises:
        ValidationError: 观测函数深度不为 0
    """
    if phi.depth or psi.depth:
        raise ValidationError("精确模式只支持深度 0 的观测函数")
    pi, Q = letter_chain(measure, alphabet)
    f = np.array([phi((a,)) for a in range(len(alphabet))])
    g = np.array([psi((a,)) for a in range(len(alphabet))])
    mean_f, mean_g = float(pi @ f), float(pi @ g)

    points = []
    propagated = f.copy()
    for n in range(n_max + 1):
        value = float(np.dot(pi * g, propagated)) - mean_f * mean_g
        points.append(SeriesPoint(n, value))
        propagated = Q @ propagated
    return CorrelationSeries(points, mode="exact")


def monte_carlo_correlations(
    letters: Sequence[int],
    phi: Observable,
    psi: Observable,
    n_max: int,
    seed: Optional[int] = None,
    batches: int = BATCHES,
) -> CorrelationSeries:
    """
    由平稳字母样本估计 cov(n)，误差为批均值标准误

    Raises:
        ValidationError: 样本太短
    """
    k = max(phi.depth, psi.depth)
    f = phi.evaluate(letters)[k - phi.depth:len(letters) - k - phi.depth]
    g = psi.evaluate(letters)[k - psi.depth:len(letters) - k - psi.depth]
    size = len(f) - n_max
    if size < batches * 10:
        raise ValidationError(f"样本太短: 有效长度 {len(f)}，n_max = {n_max}")
    mean_f, mean_g = f.mean(), g.mean()

    points = []
    for n in range(n_max + 1):
        products = (f[n:n + size] - mean_f) * (g[:size] - mean_g)
        value = float(products.mean())
        per_batch = [chunk.mean() for chunk in np.array_split(products, batches)]
        error = float(np.std(per_batch, ddof=1) / math.sqrt(batches))
        points.append(SeriesPoint(n, value, error))
    logger.debug(f"Monte Carlo correlations over {len(letters)} letters (seed {seed})")
    return CorrelationSeries(points, mode="monte_carlo", samples=len(letters), seed=seed)


def decay_rate_fit(
    series: CorrelationSeries,
    phi: Observable,
    psi: Observable,
    start: Optional[int] = None,
) -> ExponentialFit:
    """按 ‖φ‖_α‖ψ‖_α 归一化后对 |cov(n)| 做指数包络拟合"""
    scale = phi.holder_norm() * psi.holder_norm()
    if scale == 0:
        return ExponentialFit(0.0, math.inf, 0.0, (0, 0), exponential=False, degenerate=True)
    normalised = [abs(p.value) / scale for p in series.points[1:]]
    fit = exp_tail_fit(normalised, start=start)
    logger.info(f"✅ Correlation decay fit: κ = {fit.kappa:.4f}, R² = {fit.r_squared:.3f}")
    return fit


def common_envelope(series: List[CorrelationSeries], norms: List[float], fits: List[ExponentialFit]) -> dict:
    """
    一族观测函数的公共包络 c'·e^{−κn}

    κ 取各拟合的最小值，c' 取使所有归一化 |cov(n)| 都被覆盖的最小常数。
    """
    finite = [f.kappa for f in fits if math.isfinite(f.kappa)]
    if not finite:
        return {"kappa": math.inf, "constant": 0.0, "members": len(series)}
    kappa = min(finite)
    constant = 0.0
    for s, norm in zip(series, norms):
        for p in s.points[1:]:
            if norm > 0:
                constant = max(constant, abs(p.value) / norm * math.exp(kappa * p.n))
    return {"kappa": kappa, "constant": constant, "members": len(series)}
