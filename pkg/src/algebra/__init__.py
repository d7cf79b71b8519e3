"""群论模块：有限阿贝尔群、单同态、双陪集"""

from .cosets import DoubleCosetDecomposition, as_subgroup, double_cosets, index, subgroup_join
from .groups import FiniteAbelianGroup, GroupElement, Subgroup, hermite_basis
from .morphisms import Monomorphism

__all__ = [
    "FiniteAbelianGroup",
    "GroupElement",
    "Subgroup",
    "Monomorphism",
    "DoubleCosetDecomposition",
    "hermite_basis",
    "as_subgroup",
    "subgroup_join",
    "double_cosets",
    "index",
]
