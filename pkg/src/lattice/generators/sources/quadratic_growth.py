"""二次增长格生成器（q 为偶数）

x* 的群 Z/(q/2+1)，经两条平凡边连到左射线 l₁ 和 a₁。左射线 l_k 的群
Z/(q+1)^k；a₁ 的群 Z/q，向下连到 a₂、b₂（群 Z/q × Z/(q+1)），a₂、b₂
之间再连一条指数为 1 的边，形成奇圈 a₁a₂b₂。覆盖树 (q+2)-正则。
"""

from fractions import Fraction

from ...builder import GraphBuilder
from ...models import GeneratorSpec, GraphOfGroups, TailModel
from ..base import BaseGenerator


class QuadraticGrowthGenerator(BaseGenerator):
    """二次增长例子"""

    @property
    def kind(self) -> str:
        return "quadratic_growth"

    def build(self, spec: GeneratorSpec) -> GraphOfGroups:
        q, depth = spec.q, spec.depth
        Q = q + 1
        builder = GraphBuilder(name=f"quadratic_growth(q={q})")

        builder.add_vertex("x", (q // 2 + 1,))
        for k in range(1, depth + 1):
            builder.add_vertex(f"l{k}", (Q**k,))
        builder.add_vertex("a1", (q,))
        builder.add_vertex("a2", (q, Q))
        builder.add_vertex("b2", (q, Q))

        builder.add_edge_pair("xl", "lx", "x", "l1")
        builder.add_edge_pair("xa", "ax", "x", "a1")
        for k in range(1, depth):
            builder.add_edge_pair(
                f"l{k}+",
                f"l{k + 1}-",
                f"l{k}",
                f"l{k + 1}",
                edge_factors=(Q**k,),
                images_at_origin=((1,),),
                images_at_terminus=((Q,),),
            )
        for target in ("a2", "b2"):
            builder.add_edge_pair(
                f"a1{target}",
                f"{target}a1",
                "a1",
                target,
                edge_factors=(q,),
                images_at_origin=((1,),),
                images_at_terminus=((1, 0),),
            )
        builder.add_edge_pair(
            "a2b2",
            "b2a2",
            "a2",
            "b2",
            edge_factors=(q, Q),
            images_at_origin=((1, 0), (0, 1)),
            images_at_terminus=((1, 0), (0, 1)),
        )

        return builder.build(
            "x",
            frontier=[f"l{depth}"],
            tail=TailModel(scale=Fraction(4), ratio=Fraction(1, Q)),
        )
