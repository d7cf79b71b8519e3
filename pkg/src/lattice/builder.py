"""群图构造器"""

import json
import logging
from typing import Dict, Iterable, Optional, Sequence

from src.algebra import FiniteAbelianGroup, Monomorphism
from src.core import ValidationError

from .models import GraphOfGroups, QuotientGraph, TailModel

logger = logging.getLogger(__name__)


class GraphBuilder:
    """逐个添加顶点和边，最后生成 GraphOfGroups"""

    def __init__(self, name: str = "explicit"):
        self.name = name
        self._vertex_groups: Dict[str, FiniteAbelianGroup] = {}
        self._origin: Dict[str, str] = {}
        self._terminus: Dict[str, str] = {}
        self._opposite: Dict[str, str] = {}
        self._edge_groups: Dict[str, FiniteAbelianGroup] = {}
        self._monos: Dict[str, Monomorphism] = {}

    def add_vertex(self, vertex_id: str, factors: Sequence[int] = ()) -> "GraphBuilder":
        if vertex_id in self._vertex_groups:
            raise ValidationError(f"顶点 '{vertex_id}' 重复")
        self._vertex_groups[vertex_id] = FiniteAbelianGroup(tuple(factors))
        return self

    def add_edge(
        self,
        edge_id: str,
        origin: str,
        terminus: str,
        opposite: str,
        edge_factors: Sequence[int] = (),
        images: Sequence[Sequence[int]] = (),
    ) -> "GraphBuilder":
        """
        添加一条有向边

        Args:
            edge_id: 边标识
            origin: 起点 o(e)
            terminus: 终点 t(e)
            opposite: 反向边标识 ē
            edge_factors: 边群不变因子
            images: 边群生成元在 G_{o(e)} 中的像

        Raises:
            ValidationError: 顶点未定义、边重复或单同态不合法
        """
        if edge_id in self._origin:
            raise ValidationError(f"边 '{edge_id}' 重复")
        for v in (origin, terminus):
            if v not in self._vertex_groups:
                raise ValidationError(f"边 '{edge_id}' 引用了未定义的顶点 '{v}'")
        group = FiniteAbelianGroup(tuple(edge_factors))
        try:
            mono = Monomorphism(group, self._vertex_groups[origin], tuple(tuple(i) for i in images))
        except ValidationError as e:
            raise ValidationError(f"边 '{edge_id}': {e}") from e
        self._origin[edge_id] = origin
        self._terminus[edge_id] = terminus
        self._opposite[edge_id] = opposite
        self._edge_groups[edge_id] = group
        self._monos[edge_id] = mono
        return self

    def add_edge_pair(
        self,
        edge_id: str,
        opposite_id: str,
        origin: str,
        terminus: str,
        edge_factors: Sequence[int] = (),
        images_at_origin: Sequence[Sequence[int]] = (),
        images_at_terminus: Sequence[Sequence[int]] = (),
    ) -> "GraphBuilder":
        """同时添加 e 与 ē"""
        self.add_edge(edge_id, origin, terminus, opposite_id, edge_factors, images_at_origin)
        self.add_edge(opposite_id, terminus, origin, edge_id, edge_factors, images_at_terminus)
        return self

    def build(
        self,
        base_vertex: str,
        frontier: Iterable[str] = (),
        tail: Optional[TailModel] = None,
    ) -> GraphOfGroups:
        if base_vertex not in self._vertex_groups:
            raise ValidationError(f"基点 '{base_vertex}' 未定义")
        for e, bar in self._opposite.items():
            if bar not in self._origin:
                raise ValidationError(f"边 '{e}' 的反向边 '{bar}' 未定义")
        graph = QuotientGraph(
            vertices=tuple(self._vertex_groups),
            origin=dict(self._origin),
            terminus=dict(self._terminus),
            opposite=dict(self._opposite),
        )
        return GraphOfGroups(
            graph=graph,
            vertex_groups=dict(self._vertex_groups),
            edge_groups=dict(self._edge_groups),
            monos=dict(self._monos),
            base_vertex=base_vertex,
            frontier=frozenset(frontier),
            tail=tail,
            name=self.name,
        )


def parse_config(text: str) -> GraphOfGroups:
    """
    解析 JSON 描述的群图

    格式：{"vertices":[{"id","factors"}], "edges":[{"id","from","to","opposite",
    "edge_factors","mono_images"}], "base_vertex": id}

    Raises:
        ValidationError: JSON 或字段不合法
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValidationError(f"配置不是合法 JSON: {e}") from e

    try:
        builder = GraphBuilder(name=data.get("name", "explicit"))
        for vertex in data["vertices"]:
            builder.add_vertex(str(vertex["id"]), vertex.get("factors", []))
        for edge in data["edges"]:
            builder.add_edge(
                str(edge["id"]),
                str(edge["from"]),
                str(edge["to"]),
                str(edge["opposite"]),
                edge.get("edge_factors", []),
                edge.get("mono_images", []),
            )
        gog = builder.build(str(data["base_vertex"]))
    except (KeyError, TypeError) as e:
        raise ValidationError(f"配置缺少字段或类型错误: {e}") from e

    logger.debug(f"Parsed explicit lattice: {len(gog.vertices)} vertices, {len(gog.edges)} edges")
    return gog
