"""有根树格生成器

深度为 n 的顶点群 Z/q^{n+1}；父子之间的边群等于父顶点群，
在父顶点中指数 1，在子顶点中指数 q。
"""

import logging
from collections import deque
from fractions import Fraction
from itertools import cycle

from ...builder import GraphBuilder
from ...models import GeneratorSpec, GraphOfGroups, TailModel
from ..base import BaseGenerator

logger = logging.getLogger(__name__)


class RootedTreeGenerator(BaseGenerator):
    """有根树上的格"""

    @property
    def kind(self) -> str:
        return "rooted_tree_lattice"

    def build(self, spec: GeneratorSpec) -> GraphOfGroups:
        q, depth = spec.q, spec.depth
        counts = cycle(spec.children)
        builder = GraphBuilder(name=f"rooted_tree_lattice(children={list(spec.children)}, q={q})")

        builder.add_vertex("t0", (q,))
        frontier = []
        queue = deque([("t0", 0)])
        next_id = 1
        while queue:
            parent, level = queue.popleft()
            n_children = next(counts)
            if level == depth:
                if n_children:
                    frontier.append(parent)
                continue
            for _ in range(n_children):
                child = f"t{next_id}"
                next_id += 1
                builder.add_vertex(child, (q ** (level + 2),))
                builder.add_edge_pair(
                    f"a{child[1:]}",
                    f"b{child[1:]}",
                    parent,
                    child,
                    edge_factors=(q ** (level + 1),),
                    images_at_origin=((1,),),
                    images_at_terminus=((q,),),
                )
                queue.append((child, level + 1))

        logger.debug(f"Rooted tree lattice with {next_id} vertices up to depth {depth}")
        return builder.build(
            "t0",
            frontier=frontier,
            tail=TailModel(scale=Fraction(1, q), ratio=Fraction(max(spec.children), q)),
        )
