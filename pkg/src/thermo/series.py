"""Poincaré 级数与临界指数"""

import logging
import math
from itertools import accumulate
from typing import Optional

import numpy as np
from scipy import stats

from src.core import DegenerateLatticeError, ValidationError
from src.cover import TransferOperator
from src.lattice import GraphOfGroups

from .conductances import Conductances
from .models import PoincarePartial, PotentialSummary

logger = logging.getLogger(__name__)

# 增量比值判定阈值
GROWTH_BAND = 0.05

# 临界指数需要的最小半径
MIN_RADIUS = 6


def annulus_sums(gog: GraphOfGroups, c: Conductances, radius: int, s: float = 0.0) -> np.ndarray:
    """按半径分组的加权轨道和 Σ_{d(x*,γx*)=n} e^{∫(F̃ − s)}"""
    operator = TransferOperator(gog)
    return operator.annulus_sums(radius, c.vector(operator.edges), s)


def poincare_partial(gog: GraphOfGroups, c: Conductances, s: float, radius: int) -> PoincarePartial:
    """
    Poincaré 级数到半径 radius 的部分和

    诊断：最后两个非零增量的单步比值大于 1 + GROWTH_BAND 为发散，
    小于 1 − GROWTH_BAND 为收敛，其余为临界。
    """
    increments = annulus_sums(gog, c, radius, s).tolist()
    partials = list(accumulate(increments, lambda a, b: math.fsum([a, b])))

    nonzero = [n for n, a in enumerate(increments) if a > 0 and n > 0]
    growth: Optional[float] = None
    diagnostic = "unknown"
    if len(nonzero) >= 2:
        n1, n2 = nonzero[-2], nonzero[-1]
        growth = (increments[n2] / increments[n1]) ** (1.0 / (n2 - n1))
        if growth > 1 + GROWTH_BAND:
            diagnostic = "divergent"
        elif growth < 1 - GROWTH_BAND:
            diagnostic = "convergent"
        else:
            diagnostic = "critical"

    logger.debug(f"Poincaré partial at s={s:.4f}: {diagnostic}")
    return PoincarePartial(s=s, increments=increments, partials=partials, growth=growth, diagnostic=diagnostic)


def transfer_exponent(gog: GraphOfGroups, c: Conductances) -> float:
    """截断格上的精确临界指数 log ρ(N·diag(e^c))"""
    operator = TransferOperator(gog)
    rho, _ = operator.perron(c.vector(operator.edges))
    if rho <= 0:
        raise DegenerateLatticeError(f"格 '{gog.name}' 的转移算子谱半径为 0")
    return math.log(rho)


def critical_exponent(gog: GraphOfGroups, c: Conductances, radius: int, with_exact: bool = True) -> PotentialSummary:
    """
    δ̂：log a_n 对 n 的回归斜率

    窗口取 [R/2, R] 中与最后一个非零项同奇偶的 n（步长 2 吸收奇偶性）。

    Raises:
        ValidationError: 半径小于 MIN_RADIUS
        DegenerateLatticeError: 窗口内非零项不足两个
    """
    if radius < MIN_RADIUS:
        raise ValidationError(f"半径必须 ≥ {MIN_RADIUS}: {radius}")

    sums = annulus_sums(gog, c, radius)
    candidates = [n for n in range(radius // 2, radius + 1) if sums[n] > 0]
    if not candidates:
        raise DegenerateLatticeError(f"格 '{gog.name}' 在半径 {radius} 内没有返回基点的轨道")
    parity = candidates[-1] % 2
    window = [n for n in candidates if n % 2 == parity]
    if len(window) < 2:
        raise DegenerateLatticeError(f"回归窗口内只有 {len(window)} 个非零项")

    xs = np.array(window, dtype=float)
    ys = np.log(sums[window])
    fit = stats.linregress(xs, ys)
    residuals = (ys - (fit.intercept + fit.slope * xs)).tolist()

    exact = transfer_exponent(gog, c) if with_exact else None
    low, high = c.bounds
    logger.info(
        f"✅ Critical exponent for '{gog.name}': δ̂ = {fit.slope:.6f}"
        + (f", exact {exact:.6f}" if exact is not None else "")
    )
    return PotentialSummary(
        delta_estimate=float(fit.slope),
        annulus_sums=sums.tolist(),
        window=window,
        intercept=float(fit.intercept),
        r_squared=float(fit.rvalue**2),
        residuals=residuals,
        exact=exact,
        bounds=(low, high),
    )


def exponent_bounds_hold(delta_zero: float, c: Conductances, delta: float, tol: float = 0.05) -> bool:
    """δ₀ + inf c ≤ δ_F ≤ δ₀ + sup c（容差 tol）"""
    low, high = c.bounds
    return delta_zero + low - tol <= delta <= delta_zero + high + tol
