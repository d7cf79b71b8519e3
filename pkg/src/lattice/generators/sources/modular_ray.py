"""模射线格生成器

v₀-v₁-v₂-… 的射线，顶点群 Z/(q+1), Z/q, Z/q², …；v₀v₁ 边群平凡，
vₙvₙ₊₁ 边群 Z/qⁿ（在 vₙ 中指数 1，在 vₙ₊₁ 中指数 q），覆盖树 (q+1)-正则。
"""

from fractions import Fraction

from ...builder import GraphBuilder
from ...models import GeneratorSpec, GraphOfGroups, TailModel
from ..base import BaseGenerator


class ModularRayGenerator(BaseGenerator):
    """模射线"""

    @property
    def kind(self) -> str:
        return "modular_ray"

    @property
    def description(self) -> str:
        return "指数 1 向上、q 向下的射线，原点处指数 q+1"

    def build(self, spec: GeneratorSpec) -> GraphOfGroups:
        q, depth = spec.q, spec.depth
        builder = GraphBuilder(name=f"modular_ray(q={q})")

        builder.add_vertex("v0", (q + 1,))
        for n in range(1, depth + 1):
            builder.add_vertex(f"v{n}", (q**n,))

        builder.add_edge_pair("u0", "d0", "v0", "v1")
        for n in range(1, depth):
            builder.add_edge_pair(
                f"u{n}",
                f"d{n}",
                f"v{n}",
                f"v{n + 1}",
                edge_factors=(q**n,),
                images_at_origin=((1,),),
                images_at_terminus=((q,),),
            )

        return builder.build(
            "v0",
            frontier=[f"v{depth}"],
            tail=TailModel(scale=Fraction(1), ratio=Fraction(1, q)),
        )
