"""子群和与双陪集

阿贝尔群中 H\\G/K 就是 G/(H+K)，类数 |G|/|H+K|。
"""

from dataclasses import dataclass
from typing import List, Sequence, Union

from src.core import ResourceCapError, ValidationError, cfg

from .groups import FiniteAbelianGroup, GroupElement, Subgroup
from .morphisms import Monomorphism

SubgroupLike = Union[Subgroup, Sequence[Sequence[int]]]


def as_subgroup(G: FiniteAbelianGroup, H: SubgroupLike) -> Subgroup:
    """把生成元集合或元素集合包装成 Subgroup"""
    if isinstance(H, Subgroup):
        if H.group != G:
            raise ValidationError(f"子群不属于 {G}")
        return H
    return Subgroup(G, tuple(tuple(g) for g in H))


def subgroup_join(G: FiniteAbelianGroup, H: SubgroupLike, K: SubgroupLike) -> Subgroup:
    """
    H ∪ K 生成的子群 H + K

    Raises:
        ValidationError: 生成元未按 G 约化
    """
    return as_subgroup(G, H).join(as_subgroup(G, K))


@dataclass(frozen=True)
class DoubleCosetDecomposition:
    """H\\G/K 的典范分解"""

    group: FiniteAbelianGroup
    H: Subgroup
    K: Subgroup
    joined: Subgroup
    representatives: tuple
    """典范代表元（字典序最小），第 0 个是单位类"""

    @property
    def count(self) -> int:
        return len(self.representatives)

    @property
    def identity_index(self) -> int:
        return 0

    @property
    def class_size(self) -> int:
        """每个双陪集包含的 K-陪集个数 |H+K|/|K|"""
        return self.joined.order // self.K.order

    def class_of(self, g: Sequence[int]) -> GroupElement:
        """g 所在双陪集的典范代表元"""
        return self.joined.coset_rep(g)

    def is_identity_class(self, g: Sequence[int]) -> bool:
        return self.joined.contains(g)


def double_cosets(G: FiniteAbelianGroup, H: SubgroupLike, K: SubgroupLike) -> DoubleCosetDecomposition:
    """
    计算 H\\G/K 的代表元

    Raises:
        ResourceCapError: 类数超过枚举上限
    """
    H_sub = as_subgroup(G, H)
    K_sub = as_subgroup(G, K)
    joined = H_sub.join(K_sub)
    if joined.index > cfg.enumeration_cap:
        raise ResourceCapError(f"双陪集个数 {joined.index} 超过枚举上限 {cfg.enumeration_cap}")
    reps: List[GroupElement] = joined.coset_reps()
    return DoubleCosetDecomposition(G, H_sub, K_sub, joined, tuple(reps))


def index(mono: Monomorphism) -> int:
    """单同态像的指数 |目标|/|源|"""
    return mono.index
