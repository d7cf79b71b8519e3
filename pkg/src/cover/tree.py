"""Bass–Serre 覆盖树的惰性枚举

顶点以从基点出发的约化地址表示，每一步为 (商图边 e, G_{o(e)} 中模 α_e(G_e)
的典范陪集代表元)。父节点是标签为 (ē_last, 0) 的邻居。
"""

import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx

from src.algebra import GroupElement
from src.core import ResourceCapError, TruncationError, ValidationError, cfg
from src.lattice import GraphOfGroups

from .models import Cone, CoverBall, CoverPath, CoverVertex, OrbitPoint, Step, common_prefix
from .transfer import TransferOperator

logger = logging.getLogger(__name__)


class BassSerreCover:
    """群图的万有覆盖树"""

    def __init__(self, gog: GraphOfGroups):
        self.gog = gog
        self.graph = gog.graph
        self._reps: Dict[str, List[GroupElement]] = {}

    @property
    def base(self) -> CoverVertex:
        return CoverVertex((), self.gog.base_vertex)

    def identity(self, v: str) -> GroupElement:
        return self.gog.vertex_groups[v].identity

    def coset_reps(self, e: str) -> List[GroupElement]:
        """
        G_{o(e)} / α_e(G_e) 的典范代表元

        Raises:
            ResourceCapError: 指数超过枚举上限，只能使用测度模式
        """
        if e not in self._reps:
            idx = self.gog.edge_index(e)
            if idx > cfg.enumeration_cap:
                raise ResourceCapError(
                    f"enumeration cap: 边 '{e}' 的陪集数 {idx} 超过上限 {cfg.enumeration_cap}"
                )
            self._reps[e] = self.gog.monos[e].image.coset_reps()
        return self._reps[e]

    def rep(self, e: str, g: Sequence[int]) -> GroupElement:
        return self.gog.monos[e].image.coset_rep(g)

    def vertex_at(self, address: Sequence[Step]) -> CoverVertex:
        address = tuple(address)
        projection = self.graph.t(address[-1][0]) if address else self.gog.base_vertex
        return CoverVertex(address, projection)

    def _move(self, v: CoverVertex, e: str, c: GroupElement) -> CoverVertex:
        target = self.graph.t(e)
        if v.address and e == self.graph.bar(v.last_edge) and c == self.identity(v.projection):
            return CoverVertex(v.address[:-1], target)
        return CoverVertex(v.address + ((e, c),), target)

    def parent(self, v: CoverVertex) -> Optional[CoverVertex]:
        return self.vertex_at(v.address[:-1]) if v.address else None

    def neighbors(self, v: CoverVertex) -> List[Tuple[str, CoverVertex]]:
        """
        按商图边、再按陪集代表元排序的全部邻居

        Returns:
            [(商图边, 邻居)]，个数等于 lift_degree(v.projection)
        """
        result = []
        for e in self.graph.out_edges(v.projection):
            for c in self.coset_reps(e):
                result.append((e, self._move(v, e, c)))
        return result

    def children(self, v: CoverVertex) -> List[Tuple[str, CoverVertex]]:
        return [(e, w) for e, w in self.neighbors(v) if w.depth > v.depth]

    def step(self, v: CoverVertex, e: str, g: Sequence[int]) -> CoverVertex:
        """沿标签为 (e, g·α_e(G_e)) 的边走一步"""
        if self.graph.o(e) != v.projection:
            raise ValidationError(f"边 '{e}' 不从 {v.projection} 出发")
        group = self.gog.vertex_groups[v.projection]
        return self._move(v, e, self.rep(e, group.reduce(g)))

    def label(self, x: CoverVertex, y: CoverVertex) -> Step:
        """
        邻居 y 在 x 的局部坐标中的标签

        Raises:
            ValidationError: x 与 y 不相邻
        """
        if x.address and y.address == x.address[:-1]:
            return self.graph.bar(x.last_edge), self.identity(x.projection)
        if y.depth == x.depth + 1 and y.address[:-1] == x.address:
            return y.address[-1]
        raise ValidationError(f"{x} 与 {y} 不相邻")

    def lift_path(
        self,
        start: CoverVertex,
        edges: Sequence[str],
        cosets: Optional[Sequence[Sequence[int]]] = None,
    ) -> List[CoverVertex]:
        """
        商图边路径的提升

        未给出陪集时取不回溯的最小代表元。

        Raises:
            ValidationError: 路径不连贯，或给出的陪集导致回溯
        """
        vertices = [start]
        current = start
        previous: Optional[CoverVertex] = None
        for i, e in enumerate(edges):
            if self.graph.o(e) != current.projection:
                raise ValidationError(f"路径在第 {i} 步断开: 边 '{e}' 不从 {current.projection} 出发")
            if cosets is not None:
                nxt = self.step(current, e, cosets[i])
            else:
                nxt = next(
                    (w for c in self.coset_reps(e) if (w := self._move(current, e, c)) != previous),
                    None,
                )
                if nxt is None:
                    raise ValidationError(f"边 '{e}' 只能回溯")
            if nxt == previous:
                raise ValidationError(f"提升在第 {i} 步回溯")
            previous, current = current, nxt
            vertices.append(current)
        return vertices

    def canonical_lift(self, v: str) -> CoverVertex:
        """商图顶点的典范提升：最短商图路径，陪集全取单位元"""
        path = nx.shortest_path(self.graph.to_networkx(), self.gog.base_vertex, v)
        current = self.base
        for a, b in zip(path, path[1:]):
            e = next(f for f in self.graph.out_edges(a) if self.graph.t(f) == b)
            current = self._move(current, e, self.identity(a))
        return current

    def geodesic_path(self, u: CoverVertex, v: CoverVertex) -> CoverPath:
        """通过地址消去得到的测地路径"""
        k = common_prefix(u.address, v.address)
        up = [self.vertex_at(u.address[:j]) for j in range(u.depth, k - 1, -1)]
        down = [self.vertex_at(v.address[:j]) for j in range(k + 1, v.depth + 1)]
        vertices = up + down
        edges = [self.label(a, b)[0] for a, b in zip(vertices, vertices[1:])]
        return CoverPath(vertices=vertices, edges=edges)

    def distance(self, u: CoverVertex, v: CoverVertex) -> int:
        return u.depth + v.depth - 2 * common_prefix(u.address, v.address)

    def ball(self, radius: int) -> CoverBall:
        """
        以基点为中心、半径 radius 的球

        超出顶点预算时返回部分球；陪集数超过枚举上限时退化为测度模式，只给出球面计数。
        """
        if radius < 0:
            raise ValidationError(f"半径必须 ≥ 0: {radius}")
        sphere = [self.base]
        vertices = [self.base]
        sizes = [1]
        achieved = 0
        try:
            for n in range(1, radius + 1):
                nxt = [w for v in sphere for _, w in self.children(v)]
                if len(vertices) + len(nxt) > cfg.vertex_budget:
                    logger.warning(
                        f"⚠️ Vertex budget {cfg.vertex_budget} reached, ball stops at radius {achieved}"
                    )
                    break
                nxt.sort()
                vertices.extend(nxt)
                sizes.append(len(nxt))
                sphere = nxt
                achieved = n
        except ResourceCapError as e:
            logger.warning(f"⚠️ Falling back to measure-only ball: {e}")
            counts = TransferOperator(self.gog).sphere_counts(radius)
            return CoverBall(radius=radius, radius_achieved=radius, sphere_sizes=counts, measure_only=True)

        orders = {v: self.gog.vertex_order(v.projection) for v in vertices}
        logger.debug(f"Ball of radius {achieved}: {len(vertices)} vertices")
        return CoverBall(
            radius=radius,
            radius_achieved=achieved,
            sphere_sizes=sizes,
            vertices=vertices,
            stabiliser_orders=orders,
        )

    def orbit_points(self, radius: int) -> List[OrbitPoint]:
        """
        球内基点顶点的全部提升

        Raises:
            ResourceCapError: 只能得到测度模式的球
        """
        ball = self.ball(radius)
        if ball.measure_only:
            raise ResourceCapError("enumeration cap: 测度模式下没有轨道点地址")
        base = self.gog.base_vertex
        return [
            OrbitPoint(v, v.depth, ball.stabiliser_orders[v])
            for v in ball.vertices
            if v.projection == base
        ]

    def gromov_product(self, x: CoverVertex, xi: Sequence[Step], eta: Sequence[Step]) -> int:
        """
        x 到双无穷测地线 [ξ, η] 的距离

        Raises:
            TruncationError: 前缀不足以确定分叉点
        """
        xi, eta = tuple(xi), tuple(eta)
        b = common_prefix(xi, eta)
        if b >= min(len(xi), len(eta)):
            raise TruncationError("extend ray: 两条射线在给定前缀内尚未分开")
        mx = common_prefix(x.address, xi)
        my = common_prefix(x.address, eta)
        if mx >= len(xi) or my >= len(eta):
            raise TruncationError("extend ray: 射线前缀短于 x 的地址")
        m = max(mx, my)
        return x.depth - m + max(0, b - m)

    def visual_distance(self, x: CoverVertex, xi: Sequence[Step], eta: Sequence[Step]) -> float:
        """d_x(ξ, η) = e^{−(ξ|η)_x}；相同射线返回 0（对角线）"""
        if tuple(xi) == tuple(eta):
            logger.debug("Identical rays: visual distance on the diagonal")
            return 0.0
        return math.exp(-self.gromov_product(x, xi, eta))

    def shadow(self, x: CoverVertex, center: CoverVertex, radius: int) -> List[Cone]:
        """
        从 x 看球 B(center, radius) 的影子

        球是凸的，所以影子就是 x 在球上投影点之后的单个锥。
        x 在球内时返回全边界标记。
        """
        d = self.distance(x, center)
        if d <= radius:
            return [Cone.full_boundary()]
        path = self.geodesic_path(x, center)
        z = path.vertices[d - radius]
        apex = path.vertices[d - radius - 1]
        return [Cone(apex=apex, target=z, edge=path.edges[d - radius - 1])]

    def in_cone(self, cone: Cone, w: CoverVertex) -> bool:
        if cone.is_full:
            return True
        return self.distance(cone.apex, w) == self.distance(cone.target, w) + 1

    def translate(self, anchor: CoverVertex, g: Sequence[int], y: CoverVertex) -> CoverVertex:
        """
        以 anchor 的稳定子中元素 g 作用于 y

        沿 anchor → y 的测地线逐步传递扭转量：局部标签 c 变为 c + t，
        下一顶点的扭转量由两侧回指标签之差加上边群部分给出。

        Raises:
            ResourceCapError: 边群过大无法求原像
        """
        group = self.gog.vertex_groups[anchor.projection]
        twist = group.reduce(g)
        current, image = anchor, anchor
        path = self.geodesic_path(anchor, y)
        for w, w_next in zip(path.vertices, path.vertices[1:]):
            e, c = self.label(w, w_next)
            source = self.gog.vertex_groups[w.projection]
            s = source.add(c, twist)
            rep = self.rep(e, s)
            h = self.gog.monos[e].preimage(source.sub(s, rep))
            image_next = self._move(image, e, rep)

            target = self.gog.vertex_groups[w_next.projection]
            back = self.label(w_next, current)[1]
            back_image = self.label(image_next, image)[1]
            lifted = self.gog.monos[self.graph.bar(e)].apply(h)
            twist = target.add(target.sub(back_image, back), lifted)
            current, image = w_next, image_next
        return image
