"""影子引理检查"""

import logging
import math
from typing import Optional

from src.core import cfg
from src.lattice import GraphOfGroups

from .conductances import Conductances
from .models import ShadowLemmaReport
from .patterson import CONE_MARGIN, PattersonDensity

logger = logging.getLogger(__name__)


def shadow_lemma_check(
    gog: GraphOfGroups,
    c: Conductances,
    radius: int,
    r: Optional[int] = None,
    density: Optional[PattersonDensity] = None,
) -> ShadowLemmaReport:
    """
    比较 μ_{x*}(O_{x*} B(γx*, r)) 与 e^{∫(F̃ − δ)}

    从基点看，球 B(γx*, r) 的影子是测地线上距 γx* 为 r 处的锥，
    所以比值只依赖商图边路径；遍历长度不超过 R − 4 的回到基点的路径即可。

    Returns:
        ShadowLemmaReport，kappa = max(最大比值, 1/最小比值)
    """
    r = cfg.shadow_radius if r is None else r
    density = density or PattersonDensity(gog, c)
    operator = density.operator
    base = gog.base_vertex

    by_depth: dict = {}
    inside = 0
    for path in operator.paths(radius - CONE_MARGIN, end=base):
        n = len(path)
        if n <= r:
            inside += 1
            continue
        edges = [operator.edges[i] for i in path]
        mass = density.path_mass(edges[: n - r])
        weight = math.exp(math.fsum(density.log_weights[i] for i in path))
        ratio = mass / weight
        low, high = by_depth.get(n, (ratio, ratio))
        by_depth[n] = (min(low, ratio), max(high, ratio))

    rows = [{"depth": n, "min": low, "max": high} for n, (low, high) in sorted(by_depth.items())]
    if rows:
        kappa = max(max(row["max"] for row in rows), 1.0 / min(row["min"] for row in rows))
    else:
        kappa = math.inf
        logger.warning(f"⚠️ No orbit points deeper than r={r} within radius {radius}")

    logger.info(f"✅ Shadow lemma on '{gog.name}': κ̂ = {kappa:.6g} (r={r}, R={radius})")
    return ShadowLemmaReport(kappa=kappa, r=r, radius=radius, ratios=rows, inside=inside)
