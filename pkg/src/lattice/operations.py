"""群图运算：校验、提升度、体积、剪枝、长度谱"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy import sparse

from src.core import DegenerateLatticeError, cfg

from .models import GraphOfGroups, ValidationReport

logger = logging.getLogger(__name__)


def validate(gog: GraphOfGroups) -> ValidationReport:
    """
    检查对合、连通性、单同态和边群对称性，并列出低度顶点

    Args:
        gog: 群图

    Returns:
        ValidationReport，errors 中给出出错位置
    """
    report = ValidationReport()
    graph = gog.graph

    for e in graph.edges:
        bar = graph.opposite.get(e)
        if bar is None or bar not in graph.origin:
            report.errors.append(f"边 '{e}': 反向边 '{bar}' 不存在")
            continue
        if bar == e:
            report.errors.append(f"边 '{e}': 反向边不能是自身")
        if graph.bar(bar) != e:
            report.errors.append(f"边 '{e}': 对合不成立（ē̄ = '{graph.bar(bar)}'）")
        if graph.o(bar) != graph.t(e):
            report.errors.append(f"边 '{e}': o(ē) ≠ t(e)")
        if gog.edge_groups[e] != gog.edge_groups[bar]:
            report.errors.append(f"边 '{e}': 边群与反向边 '{bar}' 不一致")
        mono = gog.monos[e]
        if mono.source != gog.edge_groups[e] or mono.target != gog.vertex_groups[graph.o(e)]:
            report.errors.append(f"边 '{e}': 单同态的源或目标与群图不符")
        elif mono.image.order != mono.source.order:
            report.errors.append(f"边 '{e}': 单同态非单射")

    if not graph.is_connected():
        report.errors.append("商图不连通")

    for v in graph.vertices:
        degree = gog.lift_degree(v)
        if degree < 2:
            report.leaves.append(v)
        if degree < 3 and v not in gog.frontier:
            report.low_degree.append(v)

    if report.errors:
        logger.error(f"❌ Lattice '{gog.name}' invalid: {len(report.errors)} errors")
    elif report.low_degree:
        logger.warning(f"⚠️ Lattice '{gog.name}': {len(report.low_degree)} vertices with lift degree < 3")
    else:
        logger.info(f"✅ Lattice '{gog.name}' valid ({len(graph.vertices)} vertices)")
    return report


def lift_degree(gog: GraphOfGroups, v: str) -> int:
    """覆盖树中 v 的任一提升的度：Σ_{o(e)=v} [G_v : α_e(G_e)]"""
    return gog.lift_degree(v)


@dataclass
class VolumeEstimate:
    """群图体积 Σ 1/|G_x| 的部分和与尾部上界"""

    partial: Fraction
    tail_bound: Optional[Fraction]
    """None 表示尾部未知"""

    depth: int
    vertices: int
    infinite: bool = False

    @property
    def upper(self) -> Optional[Fraction]:
        if self.tail_bound is None:
            return None
        return self.partial + self.tail_bound

    def brackets(self, value: Fraction | float, tol: float = 0.0) -> bool:
        if self.upper is None:
            return False
        return float(self.partial) - tol <= float(value) <= float(self.upper) + tol

    def to_dict(self) -> dict:
        return {
            "partial": float(self.partial),
            "partial_exact": str(self.partial),
            "tail_bound": None if self.tail_bound is None else float(self.tail_bound),
            "depth": self.depth,
            "vertices": self.vertices,
            "infinite": self.infinite,
        }


def volume(gog: GraphOfGroups, depth: int) -> VolumeEstimate:
    """
    到给定深度为止的体积部分和，以及可证明的几何尾部上界

    Args:
        gog: 群图
        depth: 枚举深度

    Returns:
        VolumeEstimate；超出顶点预算时尾部为未知
    """
    ranked = sorted(
        ((d, v) for v, d in gog.distances.items() if d <= depth),
        key=lambda item: (item[0], item[1]),
    )
    truncated_by_budget = len(ranked) > cfg.vertex_budget
    if truncated_by_budget:
        ranked = ranked[: cfg.vertex_budget]
        logger.warning(f"⚠️ Vertex budget {cfg.vertex_budget} reached, volume tail unknown")

    partial = sum((Fraction(1, gog.vertex_order(v)) for _, v in ranked), Fraction(0))
    reached = ranked[-1][0] if ranked else 0

    tail: Optional[Fraction]
    if truncated_by_budget:
        tail = None
    elif gog.tail is not None:
        tail = gog.tail.volume_tail(min(depth, gog.depth))
    elif not gog.frontier and depth >= gog.depth:
        tail = Fraction(0)
    else:
        tail = None

    return VolumeEstimate(partial=partial, tail_bound=tail, depth=reached, vertices=len(ranked))


def sphere_volumes(gog: GraphOfGroups, depth: int) -> List[Fraction]:
    """Σ_{d(x,*)=n} 1/|G_x|，n = 0..depth"""
    spheres = [Fraction(0)] * (depth + 1)
    for v, d in gog.distances.items():
        if d <= depth:
            spheres[d] += Fraction(1, gog.vertex_order(v))
    return spheres


def sphere_bound_certificate(gog: GraphOfGroups, q: int, d: int, branching: int, depth: int) -> List[dict]:
    """
    逐层验证球面体积不超过 dⁿ/qⁿ（以及更紧的 bⁿ/q^{n+1}）

    Args:
        q: 生成器参数
        d: 树的最大度
        branching: 每个顶点最多的子节点数 b
    """
    rows = []
    for n, sphere in enumerate(sphere_volumes(gog, depth)):
        bound_d = Fraction(d**n, q**n)
        bound_b = gog.tail.sphere_bound(n) if gog.tail is not None else Fraction(branching**n, q ** (n + 1))
        rows.append({
            "n": n,
            "sphere": sphere,
            "bound_d": bound_d,
            "bound_b": bound_b,
            "ok": sphere <= bound_d and sphere <= bound_b,
        })
    return rows


def core_prune(gog: GraphOfGroups) -> GraphOfGroups:
    """
    反复删除提升度 ≤ 1 的顶点直到稳定

    Raises:
        DegenerateLatticeError: 全部被删除
    """
    keep = set(gog.vertices)
    changed = True
    while changed:
        changed = False
        for v in sorted(keep):
            degree = sum(
                gog.edge_index(e) for e in gog.graph.out_edges(v) if gog.graph.t(e) in keep
            )
            if degree <= 1:
                keep.discard(v)
                changed = True

    if not keep:
        raise DegenerateLatticeError(f"格 '{gog.name}' 剪枝后为空，没有双无穷测地线")
    if len(keep) == len(gog.vertices):
        return gog

    logger.info(f"Pruned {len(gog.vertices) - len(keep)} vertices from '{gog.name}'")
    return gog.restrict(frozenset(keep))


def edge_transitions(gog: GraphOfGroups) -> Tuple[List[str], Dict[str, int], sparse.csr_matrix]:
    """
    非回溯边转移计数 N[e,e'] = [t(e)=o(e')]·(index(e') − [e' = ē])

    Returns:
        (边列表, 边 → 下标, 稀疏矩阵 N)
    """
    edges = list(gog.edges)
    position = {e: i for i, e in enumerate(edges)}
    rows, cols, vals = [], [], []
    graph = gog.graph
    for e in edges:
        bar = graph.bar(e)
        for f in graph.out_edges(graph.t(e)):
            count = gog.edge_index(f) - (1 if f == bar else 0)
            if count > 0:
                rows.append(position[e])
                cols.append(position[f])
                vals.append(float(count))
    n = len(edges)
    matrix = sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))
    return edges, position, matrix


def length_spectrum_gcd(gog: GraphOfGroups, max_length: int) -> Optional[int]:
    """
    长度不超过 max_length 的周期非回溯回路长度的最大公约数

    Returns:
        gcd；找到 1 立即返回；没有回路时返回 None
    """
    _, _, counts = edge_transitions(gog)
    adjacency = (counts > 0).astype(np.int64).tocsr()
    power = adjacency.copy()
    result = 0
    for n in range(1, max_length + 1):
        if power.diagonal().any():
            result = math.gcd(result, n)
            if result == 1:
                return 1
        power = ((power @ adjacency) > 0).astype(np.int64).tocsr()
    return result or None
