"""格生成器基类"""

from abc import ABC, abstractmethod

from ..models import GeneratorSpec, GraphOfGroups


class BaseGenerator(ABC):
    """格生成器基类"""

    @property
    @abstractmethod
    def kind(self) -> str:
        """
        生成器唯一标识符

        Returns:
            生成器类型字符串
        """
        pass

    @property
    def description(self) -> str:
        """
        生成器说明

        Returns:
            说明文字
        """
        return self.kind

    @abstractmethod
    def build(self, spec: GeneratorSpec) -> GraphOfGroups:
        """
        按参数构造截断的群图

        Args:
            spec: 生成器参数

        Returns:
            GraphOfGroups 实例
        """
        pass
