"""Patterson 密度：Perron 向量给出的精确锥测度与截断轨道和估计"""

import logging
import math
from typing import Optional, Sequence

import numpy as np

from src.core import TruncationError, ValidationError, cfg
from src.cover import BassSerreCover, Cone, CoverVertex, TransferOperator
from src.lattice import GraphOfGroups

from .cocycle import amplitude
from .conductances import Conductances
from .models import MeasureEstimate
from .series import MIN_RADIUS, critical_exponent

logger = logging.getLogger(__name__)

# 截断估计要求锥的深度不超过 R − CONE_MARGIN
CONE_MARGIN = 4


class PattersonDensity:
    """
    截断格上以基点为中心的共形密度

    从基点看，经过商图边路径 e₁…eₙ 的锥的测度为
    e^{Σ(c(eᵢ) − δ)}·φ(eₙ)/Z，其中 φ 是 N·diag(e^{c}) 的 Perron 右特征向量，
    δ = log ρ，Z 使总质量为 1。
    """

    def __init__(self, gog: GraphOfGroups, c: Conductances):
        self.gog = gog
        self.c = c
        self.operator = TransferOperator(gog)
        cvec = c.vector(self.operator.edges)
        rho, self.phi = self.operator.perron(cvec)
        self.delta = math.log(rho)
        self.log_weights = cvec - self.delta
        start = self.operator.index * np.exp(self.log_weights) * self.phi
        self.normaliser = math.fsum(start[self.operator.from_base])

    def path_mass(self, edges: Sequence[str]) -> float:
        """从基点出发沿给定商图边路径的锥测度"""
        if not edges:
            return 1.0
        ids = self.operator.edge_ids(edges)
        exponent = math.fsum(self.log_weights[i] for i in ids)
        return math.exp(exponent) * float(self.phi[ids[-1]]) / self.normaliser

    def cone_mass(self, cover: BassSerreCover, cone: Cone) -> float:
        """
        从基点看的锥测度

        指向基点的锥取补集。

        Raises:
            ValidationError: apex 与 target 不相邻
        """
        if cone.is_full:
            return 1.0
        apex, target = cone.apex, cone.target
        if target.depth == apex.depth + 1 and target.address[:-1] == apex.address:
            return self.path_mass([e for e, _ in target.address])
        if apex.depth == target.depth + 1 and apex.address[:-1] == target.address:
            return 1.0 - self.path_mass([e for e, _ in apex.address])
        raise ValidationError(f"锥的 apex {apex} 与 target {target} 不相邻")

    def mass_from(self, cover: BassSerreCover, x: CoverVertex, cone: Cone) -> float:
        """
        从 x 看的锥测度：dμ_x/dμ_base(ξ) = e^{−C_ξ(x, base)}

        只处理不含基点也不含 x 的锥，此时 C_ξ 在锥上为常数。
        """
        base = cover.base
        if cone.is_full or cover.in_cone(cone, base) or cover.in_cone(cone, x):
            raise ValidationError("共形变换只支持不含基点和观察点的锥")
        shift = amplitude(cover, base, cone.target, self.c, self.delta) - amplitude(
            cover, x, cone.target, self.c, self.delta
        )
        return math.exp(-shift) * self.cone_mass(cover, cone)


def is_homogeneous(gog: GraphOfGroups, c: Conductances) -> bool:
    """覆盖树正则（截断边界除外）且导通系数为零"""
    if not c.is_zero:
        return False
    degrees = {gog.lift_degree(v) for v in gog.vertices if v not in gog.frontier}
    return len(degrees) == 1


def patterson_shadow_measure(
    cover: BassSerreCover,
    x: CoverVertex,
    cone: Cone,
    c: Conductances,
    radius: int,
    s: Optional[float] = None,
    exact_shortcut: bool = True,
) -> MeasureEstimate:
    """
    截断轨道和给出的 Patterson 锥测度估计

    只计基点的提升（轨道点 γx*）：距 x 为 R−1 与 R 的轨道点按 e^{∫(F̃ − s)} 加权，
    取落在锥内的比例。每个轨道点的稳定子阶都是 |G_{x*}|，这一权重在比值中约去。
    误差估计为与半径 R−2 结果之差。

    Args:
        s: 指数；默认 δ̂ + cfg.patterson_offset
        exact_shortcut: 齐次情形直接返回均匀测度 1/(D(D−1)^{n−1})

    Raises:
        TruncationError: 锥深于 R − 4
    """
    if cone.is_full:
        return MeasureEstimate(1.0, 0.0, "exact")

    gog = cover.gog
    d_apex = cover.distance(x, cone.apex)
    d_target = cover.distance(x, cone.target)
    if d_target < d_apex:
        inner = patterson_shadow_measure(cover, x, Cone(cone.target, cone.apex), c, radius, s, exact_shortcut)
        return MeasureEstimate(max(0.0, 1.0 - inner.value), inner.error, inner.mode)

    n = d_target
    if n > radius - CONE_MARGIN:
        raise TruncationError(f"锥深度 {n} 超过截断半径 {radius} − {CONE_MARGIN}")

    if exact_shortcut and is_homogeneous(gog, c):
        degree = gog.lift_degree(gog.base_vertex)
        return MeasureEstimate(1.0 / (degree * (degree - 1) ** (n - 1)), 0.0, "exact")

    if s is None:
        s = critical_exponent(gog, c, max(radius, MIN_RADIUS), with_exact=False).delta_estimate
        s += cfg.patterson_offset

    operator = TransferOperator(gog)
    cvec = c.vector(operator.edges)
    horizon = operator.horizon_sums(radius, cvec, s, terminal=operator.to_base)
    weights = operator.weights(cvec, s)
    first = operator.out_of(x.projection)
    path = operator.edge_ids(cover.geodesic_path(x, cone.target).edges)
    path_weight = math.exp(math.fsum(cvec[i] - s for i in path))

    def estimate(m: int) -> float:
        inside = total = 0.0
        for k in (m - 1, m):
            inside += path_weight * horizon[k - n][path[-1]]
            total += math.fsum((operator.index * weights * horizon[k - 1])[first])
        return inside / total

    value = estimate(radius)
    error = abs(value - estimate(radius - 2))
    logger.debug(f"Patterson estimate at depth {n}: {value:.6g} ± {error:.2g} (s={s:.4f})")
    return MeasureEstimate(value, error, "truncated")
