"""格生成器注册器"""

from typing import Dict, List, Optional

from src.core import ValidationError

from .base import BaseGenerator


class GeneratorRegistry:
    """格生成器注册表"""

    _generators: Dict[str, BaseGenerator] = {}

    @classmethod
    def register(cls, generator: BaseGenerator) -> None:
        """
        注册格生成器

        Args:
            generator: 生成器实例
        """
        cls._generators[generator.kind] = generator

    @classmethod
    def get(cls, kind: str) -> BaseGenerator:
        """
        获取指定类型的生成器

        Args:
            kind: 生成器类型

        Returns:
            生成器实例

        Raises:
            ValidationError: 生成器未注册
        """
        if kind not in cls._generators:
            raise ValidationError(f"生成器 '{kind}' 未注册，已注册: {', '.join(cls.list_kinds())}")
        return cls._generators[kind]

    @classmethod
    def get_optional(cls, kind: str) -> Optional[BaseGenerator]:
        """
        获取指定类型的生成器（可选）

        Args:
            kind: 生成器类型

        Returns:
            生成器实例，未注册则返回 None
        """
        return cls._generators.get(kind)

    @classmethod
    def all(cls) -> Dict[str, BaseGenerator]:
        """
        获取所有已注册的生成器

        Returns:
            类型到生成器的映射
        """
        return cls._generators.copy()

    @classmethod
    def list_kinds(cls) -> List[str]:
        """
        获取所有已注册的生成器类型

        Returns:
            类型列表
        """
        return list(cls._generators.keys())

    @classmethod
    def count(cls) -> int:
        """
        获取已注册的生成器数量

        Returns:
            生成器数量
        """
        return len(cls._generators)
