"""格模块：商图上的群图、体积、剪枝、长度谱与例子生成器"""

from .builder import GraphBuilder, parse_config
from .generators import (
    GeneratorRegistry,
    build,
    from_config,
    modular_ray,
    quadratic_growth,
    rooted_tree_lattice,
)
from .models import (
    GeneratorSpec,
    GraphOfGroups,
    QuotientGraph,
    TailModel,
    ValidationReport,
)
from .operations import (
    VolumeEstimate,
    core_prune,
    edge_transitions,
    sphere_bound_certificate,
    length_spectrum_gcd,
    lift_degree,
    sphere_volumes,
    validate,
    volume,
)

__all__ = [
    "GraphBuilder",
    "parse_config",
    "GeneratorRegistry",
    "GeneratorSpec",
    "GraphOfGroups",
    "QuotientGraph",
    "TailModel",
    "ValidationReport",
    "VolumeEstimate",
    "build",
    "modular_ray",
    "quadratic_growth",
    "rooted_tree_lattice",
    "from_config",
    "validate",
    "lift_degree",
    "volume",
    "sphere_volumes",
    "sphere_bound_certificate",
    "core_prune",
    "edge_transitions",
    "length_spectrum_gcd",
]
