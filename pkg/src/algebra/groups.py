"""有限阿贝尔群与子群

群由不变因子给出，元素是逐分量取模的余数元组。子群以生成元列表保存，
阶、指数、成员判定和典范陪集代表元都通过整数 Hermite 基计算，
因此不需要枚举元素；只有显式要求元素列表时才受枚举上限约束。
"""

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, List, Sequence, Tuple

from src.core import ResourceCapError, ValidationError, cfg

GroupElement = Tuple[int, ...]


def hermite_basis(rows: Iterable[Sequence[int]], moduli: Sequence[int]) -> List[List[int]]:
    """
    计算 rows ∪ {nᵢeᵢ} 张成的整数格的上三角基

    第 i 行的主元位于第 i 列且为正，主元左侧全为 0。

    Args:
        rows: 生成元（整数向量）
        moduli: 各分量的模 nᵢ

    Returns:
        按列排列的基向量
    """
    width = len(moduli)
    pending = [list(r) for r in rows if any(r)]
    pending += [[n if j == i else 0 for j in range(width)] for i, n in enumerate(moduli)]

    basis: List[List[int]] = []
    for col in range(width):
        active = [r for r in pending if r[col] != 0]
        rest = [r for r in pending if r[col] == 0]
        while len(active) > 1:
            active.sort(key=lambda r: abs(r[col]))
            pivot = active[0]
            kept = [pivot]
            for row in active[1:]:
                k = row[col] // pivot[col]
                reduced = [a - k * b for a, b in zip(row, pivot)]
                # 右侧分量可以按模约化，格不变
                for j in range(col + 1, width):
                    reduced[j] %= moduli[j]
                if reduced[col] != 0:
                    kept.append(reduced)
                elif any(reduced):
                    rest.append(reduced)
            active = kept
        pivot = active[0]
        if pivot[col] < 0:
            pivot = [-a for a in pivot]
        basis.append(pivot)
        pending = rest
    return basis


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """有限阿贝尔群 Z/n₁ × … × Z/n_k"""

    invariant_factors: Tuple[int, ...] = ()
    """不变因子，空元组表示平凡群"""

    def __post_init__(self):
        """数据验证"""
        factors = tuple(int(n) for n in self.invariant_factors)
        if any(n < 2 for n in factors):
            raise ValidationError(f"不变因子必须 ≥ 2: {factors}")
        object.__setattr__(self, "invariant_factors", factors)

    @classmethod
    def cyclic(cls, n: int) -> "FiniteAbelianGroup":
        """循环群 Z/n；n = 1 时返回平凡群"""
        if n < 1:
            raise ValidationError(f"循环群的阶必须为正: {n}")
        return cls(() if n == 1 else (n,))

    @classmethod
    def trivial(cls) -> "FiniteAbelianGroup":
        return cls(())

    @property
    def order(self) -> int:
        return math.prod(self.invariant_factors)

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)

    @property
    def identity(self) -> GroupElement:
        return (0,) * self.rank

    def is_cyclic(self) -> bool:
        factors = self.invariant_factors
        for a, b in itertools.combinations(factors, 2):
            if math.gcd(a, b) != 1:
                return False
        return True

    def reduce(self, values: Sequence[int]) -> GroupElement:
        """把整数向量逐分量约化为群元素"""
        if len(values) != self.rank:
            raise ValidationError(f"元素长度 {len(values)} 与群秩 {self.rank} 不符")
        return tuple(int(v) % n for v, n in zip(values, self.invariant_factors))

    def is_reduced(self, g: Sequence[int]) -> bool:
        return len(g) == self.rank and all(0 <= v < n for v, n in zip(g, self.invariant_factors))

    def add(self, a: GroupElement, b: GroupElement) -> GroupElement:
        return tuple((x + y) % n for x, y, n in zip(a, b, self.invariant_factors))

    def sub(self, a: GroupElement, b: GroupElement) -> GroupElement:
        return tuple((x - y) % n for x, y, n in zip(a, b, self.invariant_factors))

    def neg(self, a: GroupElement) -> GroupElement:
        return tuple((-x) % n for x, n in zip(a, self.invariant_factors))

    def scale(self, k: int, a: GroupElement) -> GroupElement:
        return tuple((k * x) % n for x, n in zip(a, self.invariant_factors))

    def generators(self) -> List[GroupElement]:
        """标准生成元（单位向量）"""
        return [tuple(1 if j == i else 0 for j in range(self.rank)) for i in range(self.rank)]

    def elements(self) -> Iterator[GroupElement]:
        """
        按字典序枚举全部元素

        Raises:
            ResourceCapError: 群阶超过枚举上限
        """
        if self.order > cfg.enumeration_cap:
            raise ResourceCapError(f"群阶 {self.order} 超过枚举上限 {cfg.enumeration_cap}")
        return itertools.product(*(range(n) for n in self.invariant_factors))

    def __str__(self) -> str:
        if not self.invariant_factors:
            return "1"
        return " × ".join(f"Z/{n}" for n in self.invariant_factors)


@dataclass(frozen=True)
class Subgroup:
    """由生成元给出的子群"""

    group: FiniteAbelianGroup
    generators: Tuple[GroupElement, ...] = ()

    def __post_init__(self):
        """数据验证"""
        gens = tuple(tuple(int(v) for v in g) for g in self.generators)
        for g in gens:
            if not self.group.is_reduced(g):
                raise ValidationError(f"生成元 {g} 未按 {self.group} 约化")
        object.__setattr__(self, "generators", gens)

    @classmethod
    def trivial(cls, group: FiniteAbelianGroup) -> "Subgroup":
        return cls(group, ())

    @classmethod
    def full(cls, group: FiniteAbelianGroup) -> "Subgroup":
        return cls(group, tuple(group.generators()))

    @cached_property
    def basis(self) -> List[List[int]]:
        return hermite_basis(self.generators, self.group.invariant_factors)

    @cached_property
    def pivots(self) -> Tuple[int, ...]:
        return tuple(row[i] for i, row in enumerate(self.basis))

    @property
    def index(self) -> int:
        """|G / H|"""
        return math.prod(self.pivots)

    @property
    def order(self) -> int:
        return self.group.order // self.index

    def coset_rep(self, g: Sequence[int]) -> GroupElement:
        """陪集 g + H 中字典序最小的代表元"""
        vec = list(g)
        for col, row in enumerate(self.basis):
            k = vec[col] // row[col]
            if k:
                vec = [a - k * b for a, b in zip(vec, row)]
        return self.group.reduce(vec)

    def contains(self, g: Sequence[int]) -> bool:
        return self.coset_rep(g) == self.group.identity

    def coset_reps(self) -> List[GroupElement]:
        """全部典范陪集代表元，按字典序排列"""
        return [tuple(r) for r in itertools.product(*(range(p) for p in self.pivots))]

    def join(self, other: "Subgroup") -> "Subgroup":
        """H + K"""
        if other.group != self.group:
            raise ValidationError("子群不在同一个群中")
        return Subgroup(self.group, self.generators + other.generators)

    def same_as(self, other: "Subgroup") -> bool:
        """作为子群相等（与生成元的写法无关）"""
        return (
            self.group == other.group
            and self.index == other.index
            and self.is_subgroup_of(other)
        )

    def is_subgroup_of(self, other: "Subgroup") -> bool:
        return all(other.contains(g) for g in self.generators)

    def elements(self) -> List[GroupElement]:
        """
        枚举子群元素（字典序）

        Raises:
            ResourceCapError: 子群阶超过枚举上限
        """
        if self.order > cfg.enumeration_cap:
            raise ResourceCapError(f"子群阶 {self.order} 超过枚举上限 {cfg.enumeration_cap}")
        seen = {self.group.identity}
        frontier = [self.group.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for g in self.generators:
                    y = self.group.add(x, g)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return sorted(seen)

    def intersection(self, other: "Subgroup") -> "Subgroup":
        """
        H ∩ K

        循环群中子群由阶唯一决定，直接用 gcd；否则枚举元素。

        Raises:
            ResourceCapError: 非循环群且阶超过枚举上限
        """
        if other.group != self.group:
            raise ValidationError("子群不在同一个群中")
        group = self.group
        if group.rank == 1:
            n = group.invariant_factors[0]
            order = math.gcd(self.order, other.order)
            return Subgroup(group, (((n // order) % n,),) if order > 1 else ())
        if group.rank == 0:
            return Subgroup.trivial(group)
        if group.order > cfg.enumeration_cap:
            raise ResourceCapError(f"群阶 {group.order} 超过枚举上限，无法求交")
        common = [g for g in self.elements() if other.contains(g)]
        gens: List[GroupElement] = []
        span = Subgroup.trivial(group)
        for g in common:
            if not span.contains(g):
                gens.append(g)
                span = Subgroup(group, tuple(gens))
        return span

    def __str__(self) -> str:
        return f"⟨{', '.join(map(str, self.generators))}⟩ ≤ {self.group}"
