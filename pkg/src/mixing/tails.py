"""回返时间尾部与指数拟合"""

import logging
import math
from typing import Iterable, List, Optional, Sequence

import numpy as np
from scipy import stats

from src.core import ValidationError, cfg
from src.gibbs import GibbsMeasure

from .models import ExponentialFit, ReturnTail, SeriesPoint

logger = logging.getLogger(__name__)

MIN_FIT_POINTS = 6
# κ 低于此值视为非指数衰减
KAPPA_FLOOR = 1e-6


def _check_set(measure: GibbsMeasure, E: Iterable[str]) -> List[str]:
    E = sorted(set(E))
    if not E:
        raise ValidationError("集合 E 不能为空")
    unknown = [v for v in E if v not in measure.gog.graph.vertices]
    if unknown:
        raise ValidationError(f"未知顶点: {unknown}")
    return E


def return_time_tail(
    measure: GibbsMeasure,
    E: Iterable[str],
    n_max: int,
    edges: Optional[Sequence[str]] = None,
) -> ReturnTail:
    """
    回返时间尾部 t(n)，n = 1..n_max

    不给出 edges 时按平稳边分布与前向转移律精确计算：
    t(n) 是 o(e₀) ∈ E 且 ℓ(1), …, ℓ(n−1) ∉ E 的概率。给出采样边序列时用经验频率，
    只统计之后至少还有 n_max 步的时刻，误差为二项标准误。

    Raises:
        ValidationError: E 为空、含未知顶点，或 n_max < 1
    """
    E = _check_set(measure, E)
    if n_max < 1:
        raise ValidationError(f"n_max 必须 ≥ 1: {n_max}")
    graph = measure.gog.graph
    members = set(E)

    if edges is None:
        starts = np.array([graph.o(e) in members for e in measure.edges], dtype=float)
        outside = np.array([graph.t(e) not in members for e in measure.edges], dtype=float)
        mass = measure.edge_law * starts
        values = [float(mass.sum())]
        mass = mass * outside
        P_T = measure.transition.T.tocsr()
        for _ in range(2, n_max + 1):
            values.append(float(mass.sum()))
            mass = (P_T @ mass) * outside
        points = [SeriesPoint(n, v) for n, v in enumerate(values, start=1)]
        logger.info(f"✅ Exact return tail on E={E}: t(1) = {values[0]:.6g}, t({n_max}) = {values[-1]:.3g}")
        return ReturnTail(E, points, "exact")

    usable = len(edges) - n_max
    if usable <= 0:
        raise ValidationError(f"样本长度 {len(edges)} 不足以估计到 n_max = {n_max}")
    hits = np.flatnonzero([graph.o(e) in members for e in edges])
    gaps = np.append(np.diff(hits), np.iinfo(np.int64).max)
    gaps = gaps[hits < usable]
    points = []
    for n in range(1, n_max + 1):
        p = float(np.count_nonzero(gaps >= n)) / usable
        points.append(SeriesPoint(n, p, math.sqrt(p * (1.0 - p) / usable)))
    logger.info(f"✅ Monte Carlo return tail on E={E} from {len(edges)} steps")
    return ReturnTail(E, points, "monte_carlo")


def exp_tail_fit(values: Sequence[float], start: Optional[int] = None, end: Optional[int] = None) -> ExponentialFit:
    """
    对 log y(n) 做最小二乘直线拟合，values[0] 对应 n = 1

    非正值跳过；窗口内全为零时 κ = ∞ 并标记 degenerate。

    Raises:
        ValidationError: 窗口内正值少于 MIN_FIT_POINTS 个（且不全为零）
    """
    start = cfg.fit_start if start is None else start
    end = len(values) if end is None else min(end, len(values))
    window = [(n, y) for n, y in enumerate(values, start=1) if start <= n <= end]
    if window and all(y == 0 for _, y in window):
        return ExponentialFit(0.0, math.inf, 0.0, (start, end), exponential=False, degenerate=True)

    points = [(n, math.log(y)) for n, y in window if y > 0]
    if len(points) < MIN_FIT_POINTS:
        raise ValidationError(f"拟合至少需要 {MIN_FIT_POINTS} 个正值，只有 {len(points)} 个")
    ns, logs = zip(*points)
    fit = stats.linregress(ns, logs)
    kappa = -float(fit.slope)
    r_squared = float(fit.rvalue) ** 2
    return ExponentialFit(
        constant=math.exp(fit.intercept),
        kappa=kappa,
        r_squared=r_squared,
        window=(start, end),
        exponential=kappa > KAPPA_FLOOR,
    )
