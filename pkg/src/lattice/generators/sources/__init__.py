"""格生成器实现"""

from .explicit import ExplicitGenerator
from .modular_ray import ModularRayGenerator
from .quadratic_growth import QuadraticGrowthGenerator
from .rooted_tree import RootedTreeGenerator

__all__ = [
    "ExplicitGenerator",
    "ModularRayGenerator",
    "QuadraticGrowthGenerator",
    "RootedTreeGenerator",
]
