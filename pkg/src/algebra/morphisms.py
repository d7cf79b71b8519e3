"""群单同态"""

from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Sequence, Tuple

from src.core import ResourceCapError, ValidationError, cfg

from .groups import FiniteAbelianGroup, GroupElement, Subgroup


@dataclass(frozen=True)
class Monomorphism:
    """边群到顶点群的单同态，由生成元的像给出"""

    source: FiniteAbelianGroup
    target: FiniteAbelianGroup
    generator_images: Tuple[GroupElement, ...] = ()

    def __post_init__(self):
        """数据验证：良定义且单射"""
        images = tuple(tuple(int(v) for v in img) for img in self.generator_images)
        if len(images) != self.source.rank:
            raise ValidationError(
                f"生成元像的个数 {len(images)} 与源群秩 {self.source.rank} 不符"
            )
        for img, n in zip(images, self.source.invariant_factors):
            if not self.target.is_reduced(img):
                raise ValidationError(f"像 {img} 未按 {self.target} 约化")
            if self.target.scale(n, img) != self.target.identity:
                raise ValidationError(f"像 {img} 不满足关系 {n}·g = 0，同态不良定义")
        object.__setattr__(self, "generator_images", images)
        if self.image.order != self.source.order:
            raise ValidationError(
                f"同态 {self.source} → {self.target} 非单射"
                f"（像的阶 {self.image.order} ≠ {self.source.order}）"
            )

    @classmethod
    def identity(cls, group: FiniteAbelianGroup) -> "Monomorphism":
        return cls(group, group, tuple(group.generators()))

    @classmethod
    def from_trivial(cls, target: FiniteAbelianGroup) -> "Monomorphism":
        """平凡群的嵌入"""
        return cls(FiniteAbelianGroup.trivial(), target, ())

    @classmethod
    def cyclic(cls, n: int, m: int, multiplier: int) -> "Monomorphism":
        """
        Z/n → Z/m，生成元映到 multiplier

        Args:
            n: 源群的阶
            m: 目标群的阶
            multiplier: 生成元的像（按 m 约化）
        """
        source = FiniteAbelianGroup.cyclic(n)
        target = FiniteAbelianGroup.cyclic(m)
        images = ((multiplier % m,),) if source.rank else ()
        return cls(source, target, images)

    @cached_property
    def image(self) -> Subgroup:
        return Subgroup(self.target, self.generator_images)

    @property
    def index(self) -> int:
        """[目标 : 像] = |目标| / |源|"""
        return self.target.order // self.source.order

    def apply(self, g: Sequence[int]) -> GroupElement:
        acc = list(self.target.identity)
        for coeff, img in zip(g, self.generator_images):
            acc = [a + coeff * b for a, b in zip(acc, img)]
        return self.target.reduce(acc)

    def then(self, other: "Monomorphism") -> "Monomorphism":
        """复合 other ∘ self"""
        if other.source != self.target:
            raise ValidationError("复合的中间群不一致")
        return Monomorphism(
            self.source,
            other.target,
            tuple(other.apply(img) for img in self.generator_images),
        )

    @cached_property
    def _inverse_table(self) -> Dict[GroupElement, GroupElement]:
        if self.source.order > cfg.enumeration_cap:
            raise ResourceCapError(
                f"源群阶 {self.source.order} 超过枚举上限 {cfg.enumeration_cap}，无法求原像"
            )
        return {self.apply(h): h for h in self.source.elements()}

    def preimage(self, y: Sequence[int]) -> GroupElement:
        """
        像中元素的唯一原像

        Raises:
            ValidationError: y 不在像中
            ResourceCapError: 源群过大
        """
        key = self.target.reduce(y)
        try:
            return self._inverse_table[key]
        except KeyError:
            raise ValidationError(f"元素 {key} 不在单同态的像中") from None
