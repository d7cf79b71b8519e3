"""Gibbs 测度：柱集质量、Gibbs 性质检查、总质量"""

import logging
import math
from functools import reduce
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse, stats

from src.algebra import Subgroup
from src.core import ValidationError
from src.lattice import GraphOfGroups
from src.thermo import Conductances, MeasureEstimate, PattersonDensity

from .models import CylinderSpec, GibbsCheck, TotalMass

logger = logging.getLogger(__name__)

# 几何尾部拟合使用的最后层数
TAIL_FIT_LEVELS = 3

# 前沿边质量占比超过此值时给出警告
FRONTIER_SHARE_WARNING = 1e-3


def path_stabiliser_order(gog: GraphOfGroups, edges: Sequence[str]) -> int:
    """
    覆盖树中一条提升路径的稳定子阶

    沿路径依次取边群像的交并经边传递；中间顶点群都是循环群时即为边群阶的 gcd。
    """
    graph = gog.graph
    if all(gog.vertex_groups[graph.t(e)].rank <= 1 for e in edges[:-1]):
        return reduce(math.gcd, (gog.edge_order(e) for e in edges))

    current: Subgroup = gog.monos[edges[0]].image
    for prev, e in zip(edges, edges[1:]):
        back = gog.monos[graph.bar(prev)]
        forward = gog.monos[prev]
        moved = Subgroup(back.target, tuple(back.apply(forward.preimage(g)) for g in current.generators))
        current = moved.intersection(gog.monos[e].image)
    return current.order


class GibbsMeasure:
    """
    相空间上的 Gibbs 测度（归一化为概率）

    提升柱集质量 e^{Σ(c − δ)}·φ̄(ē₁)·φ(eₙ)，其中 φ、φ̄ 分别是 c 与反演 c̄ 的
    Patterson 密度向量；商空间质量再除以路径稳定子阶并乘以归一化常数 K。
    """

    def __init__(self, gog: GraphOfGroups, c: Conductances):
        self.gog = gog
        self.c = c
        self.forward = PattersonDensity(gog, c)
        self.backward = PattersonDensity(gog, c.reversed())
        self.operator = self.forward.operator
        self.delta = self.forward.delta
        self.edges = self.operator.edges

        op = self.operator
        self.phi = self.forward.phi / self.forward.normaliser
        self.phi_bar = self.backward.phi / self.backward.normaliser
        self.log_weights = self.forward.log_weights
        self.phi_bar_opposite = self.phi_bar[op.opposite]

        raw = self.phi_bar_opposite * np.exp(self.log_weights) * self.phi / op.edge_orders
        self.raw_edge_mass = raw
        self.normaliser = 1.0 / math.fsum(raw)
        self.edge_law = raw * self.normaliser
        self.transition = self._transition_matrix()
        logger.debug(f"Gibbs measure on '{gog.name}': δ = {self.delta:.6f}, K = {self.normaliser:.6g}")
        if self.frontier_share > FRONTIER_SHARE_WARNING:
            logger.warning(
                f"⚠️ Gibbs mass on '{gog.name}' reaches the truncation frontier "
                f"(share {self.frontier_share:.3g}), the edge law is shaped by the cut"
            )

    @property
    def frontier_share(self) -> float:
        """端点落在截断前沿上的边的总概率"""
        frontier = self.gog.frontier
        if not frontier:
            return 0.0
        graph = self.gog.graph
        touching = np.array([graph.o(e) in frontier or graph.t(e) in frontier for e in self.edges])
        return float(self.edge_law[touching].sum())

    def _transition_matrix(self) -> sparse.csr_matrix:
        """P(e → e') = N[e,e']·e^{c(e')−δ}·φ(e')/φ(e)，按行归一化"""
        op = self.operator
        step = (op.counts @ sparse.diags(np.exp(self.log_weights) * self.phi)).tocsr()
        rows = np.asarray(step.sum(axis=1)).ravel()
        scale = np.divide(1.0, rows, out=np.zeros_like(rows), where=rows > 0)
        return (sparse.diags(scale) @ step).tocsr()

    def check_path(self, edges: Sequence[str]) -> List[int]:
        """
        Raises:
            ValidationError: 路径为空或在覆盖树中必然回溯
        """
        if not edges:
            raise ValidationError("路径长度必须 ≥ 1")
        try:
            ids = self.operator.edge_ids(edges)
        except KeyError as e:
            raise ValidationError(f"未知的边: {e}") from None
        for a, b in zip(ids, ids[1:]):
            if self.operator.counts[a, b] <= 0:
                raise ValidationError(f"路径 {self.edges[a]} → {self.edges[b]} 不可延续")
        return ids

    def lifted_mass(self, edges: Sequence[str]) -> float:
        """覆盖树中一条提升路径对应柱集的（未归一化）质量"""
        ids = self.check_path(edges)
        exponent = math.fsum(self.log_weights[i] for i in ids)
        return math.exp(exponent) * float(self.phi_bar_opposite[ids[0]]) * float(self.phi[ids[-1]])

    def quotient_mass(self, edges: Sequence[str]) -> float:
        """商空间中柱集的概率质量"""
        return self.normaliser * self.lifted_mass(edges) / path_stabiliser_order(self.gog, edges)

    def cylinder_mass(self, cyl: CylinderSpec) -> MeasureEstimate:
        """
        柱集质量（与基点位置和提升的选取无关）

        Returns:
            精确模式的 MeasureEstimate
        """
        return MeasureEstimate(self.quotient_mass(cyl.edges), 0.0, "exact")

    def extensions(self, edges: Sequence[str]) -> List[Tuple[str, int]]:
        """向前一步的全部延伸及其在覆盖树中的重数"""
        ids = self.check_path(edges)
        row = self.operator.counts.getrow(ids[-1])
        return [(self.edges[j], int(v)) for j, v in zip(row.indices, row.data)]

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "normaliser": self.normaliser,
            "edge_law": {e: float(p) for e, p in zip(self.edges, self.edge_law)},
        }


def gibbs_property_check(
    measure: GibbsMeasure,
    window: Optional[Iterable[str]] = None,
    max_length: int = 6,
    cylinders: Optional[Iterable[CylinderSpec]] = None,
) -> GibbsCheck:
    """
    比值 质量 / e^{Σ(c − δ)} 在紧窗口内的上下界

    Args:
        window: 起点与终点所在的商图顶点集合，默认基点及其邻居
        max_length: 自动生成柱集的最大长度
        cylinders: 直接给出的柱集，优先于自动生成
    """
    gog = measure.gog
    if window is None:
        window = {gog.base_vertex} | {gog.graph.t(e) for e in gog.graph.out_edges(gog.base_vertex)}
    window = sorted(set(window))

    if cylinders is None:
        paths = []
        op = measure.operator
        for v in window:
            for path in op.paths(max_length, start=v):
                if gog.graph.t(op.edges[path[-1]]) in window:
                    paths.append([op.edges[i] for i in path])
    else:
        paths = [list(cyl.edges) for cyl in cylinders]
    if not paths:
        raise ValidationError("窗口内没有柱集")

    ratios, lengths, residues = [], [], []
    for edges in paths:
        mass = measure.quotient_mass(edges)
        along = measure.c.along(edges)
        ratios.append(mass / math.exp(along - measure.delta * len(edges)))
        lengths.append(len(edges))
        residues.append(math.log(mass) - along)

    high, low = max(ratios), min(ratios)
    if len(set(lengths)) >= 2:
        slope = float(stats.linregress(lengths, residues).slope)
    else:
        slope = math.nan
    constant = max(high, 1.0 / low)
    logger.info(f"✅ Gibbs constant on window {window}: C_K = {constant:.6g} over {len(paths)} cylinders")
    return GibbsCheck(
        constant=constant,
        spread=high / low,
        slope=slope,
        delta=measure.delta,
        cylinders=len(paths),
        window=list(window),
    )


def _geometric_tail(levels: Sequence[float], fit_levels: int = TAIL_FIT_LEVELS) -> Tuple[Optional[float], float]:
    """
    用最后几层的几何比值外推尾部

    Returns:
        (比值, 尾部质量)；比值 ≥ 1 时尾部为无穷；非零层不足时比值为 None、尾部为 0
    """
    nonzero = [x for x in levels if x > 0]
    if len(nonzero) < 2:
        return None, 0.0
    tail = nonzero[-(fit_levels + 1):]
    ratio = (tail[-1] / tail[0]) ** (1.0 / (len(tail) - 1))
    if ratio >= 1.0:
        return ratio, math.inf
    return ratio, nonzero[-1] * ratio / (1.0 - ratio)


def total_mass(measure: GibbsMeasure, window: Optional[int] = None) -> TotalMass:
    """
    未归一化 Gibbs 测度（基点处归一化的 Patterson 密度）的总质量

    按边起点到基点的距离分层求和到 window 层，再按几何比值外推尾部。
    外推得到的尾部只是估计；只有不带截断前沿的有限商图被完整求和时才标记为 certified。
    """
    gog = measure.gog
    depth = gog.depth
    if window is None:
        window = max(depth - 2, 0) if gog.frontier else depth
    window = min(window, depth)
    distances = gog.distances

    levels = [0.0] * (window + 1)
    for e, mass in zip(measure.edges, measure.raw_edge_mass):
        d = distances[gog.graph.o(e)]
        if d <= window:
            levels[d] += float(mass)

    partial = math.fsum(levels)
    truncated = window < depth
    ratio, tail = _geometric_tail(levels) if truncated else (None, 0.0)
    infinite = math.isinf(tail)
    certified = not truncated and not gog.frontier

    if infinite:
        logger.warning(f"⚠️ Gibbs mass on '{gog.name}' looks infinite (level ratio {ratio:.4f})")
        estimate = MeasureEstimate(partial, 0.0, "truncated")
    else:
        mode = "truncated" if tail > 0 else "exact"
        estimate = MeasureEstimate(partial + tail, tail, mode)
        logger.info(f"✅ Gibbs mass on '{gog.name}': {estimate.value:.6g} ± {tail:.2g}")
    return TotalMass(estimate=estimate, levels=levels, ratio=ratio, infinite=infinite, certified=certified)
