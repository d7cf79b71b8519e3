"""振幅、上同调检查与 Gibbs 上循环"""

import logging
import math
from typing import Mapping, Sequence

from src.core import TruncationError
from src.cover import BassSerreCover, CoverVertex, Step, common_prefix
from src.lattice import GraphOfGroups

from .conductances import Conductances

logger = logging.getLogger(__name__)


def amplitude(cover: BassSerreCover, x: CoverVertex, y: CoverVertex, c: Conductances, shift: float = 0.0) -> float:
    """
    x 到 y 测地线上 c̃ − shift 之和

    Args:
        shift: 每步减去的常数（重整化时取 δ）
    """
    edges = cover.geodesic_path(x, y).edges
    return math.fsum(c[e] - shift for e in edges)


def cocycle_check(
    gog: GraphOfGroups,
    c: Conductances,
    c_other: Conductances,
    f: Mapping[str, float],
    tol: float = 1e-12,
) -> bool:
    """检查 c'(e) − c(e) = f(t(e)) − f(o(e)) 是否对所有边成立"""
    graph = gog.graph
    for e in gog.edges:
        expected = f.get(graph.t(e), 0.0) - f.get(graph.o(e), 0.0)
        if abs(c_other[e] - c[e] - expected) > tol:
            logger.debug(f"Cocycle identity fails on edge '{e}'")
            return False
    return True


def gibbs_cocycle(
    cover: BassSerreCover,
    xi: Sequence[Step],
    x: CoverVertex,
    y: CoverVertex,
    c: Conductances,
    delta: float,
) -> float:
    """
    C_ξ(x, y) = lim_t [∫_y^{ξ_t} (F − δ) − ∫_x^{ξ_t} (F − δ)]

    树上只要 ξ_t 越过 x 与 y 在射线上的投影，差值就已稳定。

    Args:
        xi: 从基点出发的射线前缀（地址）

    Raises:
        TruncationError: 前缀太短
    """
    xi = tuple(xi)
    needed = max(common_prefix(x.address, xi), common_prefix(y.address, xi))
    if len(xi) <= needed:
        raise TruncationError(f"extend ray: 射线前缀长度 {len(xi)} 需超过 {needed}")
    end = cover.vertex_at(xi)
    return amplitude(cover, y, end, c, delta) - amplitude(cover, x, end, c, delta)
