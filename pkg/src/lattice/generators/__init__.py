"""格生成器模块"""

from typing import Sequence

from ..models import GeneratorSpec, GraphOfGroups
from .base import BaseGenerator
from .registry import GeneratorRegistry
from .sources import (
    ExplicitGenerator,
    ModularRayGenerator,
    QuadraticGrowthGenerator,
    RootedTreeGenerator,
)

# 自动注册所有生成器
GeneratorRegistry.register(ModularRayGenerator())
GeneratorRegistry.register(QuadraticGrowthGenerator())
GeneratorRegistry.register(RootedTreeGenerator())
GeneratorRegistry.register(ExplicitGenerator())


def build(spec: GeneratorSpec) -> GraphOfGroups:
    """按参数构造群图"""
    return GeneratorRegistry.get(spec.kind).build(spec)


def modular_ray(q: int, depth: int) -> GraphOfGroups:
    return build(GeneratorSpec(kind="modular_ray", q=q, depth=depth))


def quadratic_growth(q: int, depth: int) -> GraphOfGroups:
    return build(GeneratorSpec(kind="quadratic_growth", q=q, depth=depth))


def rooted_tree_lattice(children: Sequence[int], q: int, depth: int) -> GraphOfGroups:
    return build(GeneratorSpec(kind="rooted_tree_lattice", q=q, depth=depth, children=tuple(children)))


def from_config(text: str) -> GraphOfGroups:
    return build(GeneratorSpec(kind="explicit", config_text=text))


__all__ = [
    "BaseGenerator",
    "GeneratorRegistry",
    "ExplicitGenerator",
    "ModularRayGenerator",
    "QuadraticGrowthGenerator",
    "RootedTreeGenerator",
    "build",
    "modular_ray",
    "quadratic_growth",
    "rooted_tree_lattice",
    "from_config",
]
